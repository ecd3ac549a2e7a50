#include "tmac/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "tmac/netlist.hpp"
#include "tmac/version.hpp"

namespace tmac {

namespace {

// Per-class polarity masks over the flat clause bit vector, so a class sum is
// two popcounts, exactly like the hardware's two accumulation adders.
struct SumMasks {
  std::vector<BitVec> pos, neg;
  std::uint32_t classes;

  explicit SumMasks(const CompiledModel& model) : classes(model.classes) {
    pos.assign(classes, BitVec(model.flat_count()));
    neg.assign(classes, BitVec(model.flat_count()));
    for (std::size_t i = 0; i < model.clauses.size(); ++i) {
      const ClauseExpr& c = model.clauses[i];
      (c.polarity > 0 ? pos : neg)[c.cls].set(i);
    }
  }

  Prediction sums(const BitVec& clause_bits) const {
    Prediction p;
    p.class_sums.resize(classes);
    for (std::uint32_t c = 0; c < classes; ++c) {
      std::int32_t sum = 0;
      for (std::size_t w = 0; w < clause_bits.word_count(); ++w) {
        sum += __builtin_popcountll(clause_bits.word(w) & pos[c].word(w));
        sum -= __builtin_popcountll(clause_bits.word(w) & neg[c].word(w));
      }
      p.class_sums[c] = sum;
    }
    p.argmax_class = 0;
    for (std::uint32_t c = 1; c < classes; ++c) {
      if (p.class_sums[c] > p.class_sums[p.argmax_class]) p.argmax_class = c;
    }
    return p;
  }
};

std::uint64_t clause_crc(const BitVec& bits) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t w = 0; w < bits.word_count(); ++w) h = fnv1a64_u64(bits.word(w), h);
  return h;
}

}  // namespace

SimReport simulate_stream(const CompiledModel& model, const PacketPlan& plan,
                          const std::vector<BitVec>& samples, const SimConfig& config) {
  if (plan.feature_count != model.feature_count) {
    throw std::invalid_argument("simulate_stream: packet plan does not match the model");
  }
  if (config.bandwidth != plan.bandwidth) {
    throw std::invalid_argument("simulate_stream: config bandwidth does not match the plan");
  }
  for (const BitVec& x : samples) {
    if (x.size() != model.feature_count) {
      throw std::invalid_argument("simulate_stream: sample width does not match the model");
    }
  }

  const auto hcbs = partition(model, plan);
  const SumMasks masks(model);
  const std::uint32_t p_count = plan.packet_count;
  const std::uint32_t k = config.pipeline_depth();
  const std::unordered_set<std::uint64_t> stalls(config.stall_cycles.begin(),
                                                 config.stall_cycles.end());

  SimReport report;
  report.predictions.resize(samples.size());

  // Post-HCB pipeline: cs_stages + am_stages register slots; a completed
  // clause vector emerges as a prediction k cycles after its last packet.
  std::deque<std::optional<std::pair<std::size_t, BitVec>>> pipe(k, std::nullopt);

  BitVec clause_regs(model.flat_count());
  std::size_t in_sample = 0;   // sample currently streaming in
  std::uint32_t in_packet = 0; // next packet index for it
  std::vector<BitVec> words;   // its packetized words
  std::size_t results = 0;
  std::uint64_t cycle = 0;

  while (results < samples.size()) {
    const bool input_left = in_sample < samples.size();
    const bool offered = input_left && !stalls.contains(cycle);
    char fsm = 'I';
    std::int64_t accepted = -1;
    std::optional<std::pair<std::size_t, BitVec>> completed;

    if (offered) {
      if (in_packet == 0) words = packetize(samples[in_sample], plan);
      // HCB in_packet: partial conjunction ANDed into the clause registers
      BitVec partial(model.flat_count());
      for (std::size_t c = 0; c < model.flat_count(); ++c) {
        if (hcbs[in_packet].eval(c, words[in_packet])) partial.set(c);
      }
      if (in_packet == 0) {
        clause_regs = std::move(partial);  // HCB 0 seeds all clauses to 1
      } else {
        clause_regs.and_with(partial);
      }
      fsm = 'C';
      accepted = in_packet;
      if (++in_packet == p_count) {
        completed = std::make_pair(in_sample, clause_regs);
        ++in_sample;
        in_packet = 0;
      }
    } else if (input_left && in_packet != 0) {
      fsm = 'S';  // stalled mid-datapoint
    }

    // pipeline advances every cycle; bubbles flow through
    std::optional<std::pair<std::size_t, BitVec>> out;
    if (k == 0) {
      out = std::move(completed);
    } else {
      out = std::move(pipe.front());
      pipe.pop_front();
      pipe.push_back(std::move(completed));
    }
    if (out) {
      const Prediction p = masks.sums(out->second);
      report.predictions[out->first] = p.argmax_class;
      report.result_cycles.push_back(cycle);
      ++results;
    }

    if (config.record_trace) {
      report.trace.push_back(TraceRecord{cycle, fsm, accepted, clause_crc(clause_regs)});
    }
    ++cycle;
  }

  report.total_cycles = cycle;
  const double clock_hz = config.clock_mhz * 1e6;
  if (!report.result_cycles.empty()) {
    report.first_latency_cycles = report.result_cycles.front() + 1;
    report.first_latency_us = static_cast<double>(report.first_latency_cycles) / config.clock_mhz;
  }
  if (report.result_cycles.size() >= 2) {
    const std::size_t n = report.result_cycles.size();
    report.initiation_interval = report.result_cycles[n - 1] - report.result_cycles[n - 2];
  } else {
    report.initiation_interval = p_count;
  }
  report.throughput_inf_s = clock_hz / static_cast<double>(report.initiation_interval);
  return report;
}

LatencyEstimate latency_model(std::uint32_t features, std::uint32_t bandwidth,
                              std::uint32_t cs_stages, std::uint32_t am_stages, double clock_mhz) {
  if (clock_mhz <= 0) throw std::invalid_argument("latency_model: clock must be positive");
  const PacketPlan plan = plan_packets(features, bandwidth);
  LatencyEstimate est;
  est.packet_count = plan.packet_count;
  est.latency_cycles = plan.packet_count + cs_stages + am_stages;
  est.latency_us = static_cast<double>(est.latency_cycles) / clock_mhz;
  est.throughput_inf_s = clock_mhz * 1e6 / static_cast<double>(plan.packet_count);
  return est;
}

VerifyVerdict compare_with_reference(const TaStateMatrix& reference, const CompiledModel& compiled,
                                     const std::vector<BitVec>& samples, const SimConfig& config) {
  VerifyVerdict verdict;
  verdict.samples = samples.size();
  if (samples.empty()) {
    verdict.pass = true;
    verdict.empty_warning = true;
    return verdict;
  }
  const PacketPlan plan = plan_packets(compiled.feature_count, config.bandwidth);
  const SimReport sim = simulate_stream(compiled, plan, samples, config);
  const Inference ref(reference);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (ref.predict(samples[i]).argmax_class != sim.predictions[i]) {
      verdict.mismatches.push_back(i);
    }
  }
  verdict.pass = verdict.mismatches.empty();
  return verdict;
}

std::string trace_to_jsonl(const std::vector<TraceRecord>& trace) {
  std::ostringstream os;
  for (const TraceRecord& t : trace) {
    os << "{\"cycle\":" << t.cycle << ",\"fsm\":\"" << t.fsm << "\",\"packet\":" << t.packet
       << ",\"clause_crc\":\"" << hex64(t.clause_crc) << "\"}\n";
  }
  return os.str();
}

std::string report_to_json(const SimReport& report, const SimConfig& config) {
  nlohmann::json j;
  j["clock_mhz"] = config.clock_mhz;
  j["cs_stages"] = config.cs_stages;
  j["am_stages"] = config.am_stages;
  j["first_latency_cycles"] = report.first_latency_cycles;
  j["first_latency_us"] = report.first_latency_us;
  j["initiation_interval"] = report.initiation_interval;
  j["throughput_inf_s"] = report.throughput_inf_s;
  j["total_cycles"] = report.total_cycles;
  j["samples"] = report.predictions.size();
  j["predictions"] = report.predictions;
  j["tool_version"] = std::string(kToolVersion);
  return j.dump(2) + "\n";
}

}  // namespace tmac
