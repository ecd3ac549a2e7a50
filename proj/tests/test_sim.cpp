#include <doctest.h>

#include "test_util.hpp"
#include "tmac/compile.hpp"
#include "tmac/sim.hpp"

using namespace tmac;

namespace {

BitVec input_from_bits(std::uint32_t bits, std::uint32_t f) {
  BitVec x(f);
  for (std::uint32_t i = 0; i < f; ++i) {
    if ((bits >> i) & 1) x.set(i);
  }
  return x;
}

SimConfig config_for(std::uint32_t bandwidth) {
  SimConfig cfg;
  cfg.bandwidth = bandwidth;
  return cfg;
}

}  // namespace

TEST_CASE("latency model reproduces the published table rows") {
  SUBCASE("784 features over 64-bit channel at 50 MHz") {
    const LatencyEstimate e = latency_model(784, 64, 1, 2, 50);
    CHECK(e.packet_count == 13);
    CHECK(e.latency_cycles == 16);
    CHECK(e.latency_us == doctest::Approx(0.32));
    CHECK(std::abs(e.throughput_inf_s - 3846153.0) <= 1.0);
  }
  SUBCASE("377 features") {
    const LatencyEstimate e = latency_model(377, 64, 1, 2, 50);
    CHECK(e.packet_count == 6);
    CHECK(e.latency_cycles == 9);
    CHECK(e.latency_us == doctest::Approx(0.18));
    CHECK(std::abs(e.throughput_inf_s - 8333333.0) <= 1.0);
  }
  SUBCASE("1024 features") {
    const LatencyEstimate e = latency_model(1024, 64, 1, 2, 50);
    CHECK(e.latency_cycles == 19);
    CHECK(e.latency_us == doctest::Approx(0.38));
    CHECK(e.throughput_inf_s == doctest::Approx(3125000.0));
  }
  SUBCASE("single packet at 100 MHz, no pipeline") {
    const LatencyEstimate e = latency_model(64, 64, 0, 0, 100);
    CHECK(e.packet_count == 1);
    CHECK(e.throughput_inf_s == doctest::Approx(1e8));
  }
}

TEST_CASE("simulated cycle counts match the closed form") {
  tmac::testutil::Gen gen(55);
  for (int iter = 0; iter < 10; ++iter) {
    const auto f = static_cast<std::uint32_t>(4 + gen.below(100));
    const auto w = static_cast<std::uint32_t>(2 + gen.below(40));
    const auto model = tmac::testutil::random_model(gen, 2, 4, f, 20, 0.1);
    const CompiledModel cm = compile_model(model);
    const PacketPlan plan = plan_packets(f, w);
    SimConfig cfg = config_for(w);
    cfg.cs_stages = static_cast<std::uint32_t>(gen.below(3));
    cfg.am_stages = static_cast<std::uint32_t>(gen.below(3));
    std::vector<BitVec> samples;
    for (int s = 0; s < 4; ++s) samples.push_back(gen.bitvec(f));
    const SimReport rep = simulate_stream(cm, plan, samples, cfg);
    const LatencyEstimate est = latency_model(f, w, cfg.cs_stages, cfg.am_stages, cfg.clock_mhz);
    CHECK(rep.first_latency_cycles == est.latency_cycles);
    CHECK(rep.initiation_interval == plan.packet_count);
    CHECK(rep.throughput_inf_s == doctest::Approx(est.throughput_inf_s));
  }
}

TEST_CASE("MNIST-shaped stream hits the published latency and throughput") {
  tmac::testutil::Gen gen(77);
  const auto model = tmac::testutil::random_model(gen, 10, 8, 784, 20, 0.01);
  const CompiledModel cm = compile_model(model);
  const PacketPlan plan = plan_packets(784, 64);
  std::vector<BitVec> samples;
  for (int s = 0; s < 8; ++s) samples.push_back(gen.bitvec(784, 0.2));
  const SimReport rep = simulate_stream(cm, plan, samples, config_for(64));
  CHECK(rep.first_latency_cycles == 16);
  CHECK(rep.first_latency_us == doctest::Approx(0.32));
  CHECK(rep.initiation_interval == 13);
  CHECK(std::abs(rep.throughput_inf_s - 3846153.0) <= 1.0);
}

TEST_CASE("simulator equals reference inference exhaustively for small F") {
  tmac::testutil::Gen gen(808);
  for (int iter = 0; iter < 25; ++iter) {
    const auto f = static_cast<std::uint32_t>(1 + gen.below(8));
    const auto w = static_cast<std::uint32_t>(1 + gen.below(10));
    const auto classes = static_cast<std::uint32_t>(2 + gen.below(4));
    const auto model = tmac::testutil::random_model(gen, classes, 6, f, 20, 0.25);
    const CompiledModel cm = compile_model(model);
    const PacketPlan plan = plan_packets(f, w);
    const Inference ref(model);
    std::vector<BitVec> samples;
    for (std::uint32_t bits = 0; bits < (1u << f); ++bits) {
      samples.push_back(input_from_bits(bits, f));
    }
    const SimReport rep = simulate_stream(cm, plan, samples, config_for(w));
    for (std::size_t i = 0; i < samples.size(); ++i) {
      CHECK(rep.predictions[i] == ref.predict(samples[i]).argmax_class);
    }
  }
}

TEST_CASE("stall injection changes timing but not predictions") {
  tmac::testutil::Gen gen(909);
  const auto model = tmac::testutil::random_model(gen, 3, 4, 40, 20, 0.15);
  const CompiledModel cm = compile_model(model);
  const PacketPlan plan = plan_packets(40, 8);  // P = 5
  std::vector<BitVec> samples;
  for (int s = 0; s < 6; ++s) samples.push_back(gen.bitvec(40));

  const SimReport clean = simulate_stream(cm, plan, samples, config_for(8));

  SimConfig stalled = config_for(8);
  for (std::uint64_t c = 1; c < 200; c += 2) stalled.stall_cycles.push_back(c);
  const SimReport rep = simulate_stream(cm, plan, samples, stalled);

  CHECK(rep.predictions == clean.predictions);
  CHECK(rep.first_latency_cycles > clean.first_latency_cycles);
  // every other cycle stalls: last packet lands at 2P-2, pipeline drains as usual
  CHECK(rep.first_latency_cycles == 2 * plan.packet_count - 1 + 3);
}

TEST_CASE("trace records one packet per compute cycle") {
  tmac::testutil::Gen gen(111);
  const auto model = tmac::testutil::random_model(gen, 2, 4, 12, 20, 0.2);
  const CompiledModel cm = compile_model(model);
  const PacketPlan plan = plan_packets(12, 4);  // P = 3
  SimConfig cfg = config_for(4);
  cfg.record_trace = true;
  std::vector<BitVec> samples = {gen.bitvec(12), gen.bitvec(12)};
  const SimReport rep = simulate_stream(cm, plan, samples, cfg);
  std::uint64_t compute_cycles = 0;
  for (const TraceRecord& t : rep.trace) {
    if (t.fsm == 'C') {
      ++compute_cycles;
      CHECK(t.packet >= 0);
    }
  }
  CHECK(compute_cycles == 2 * plan.packet_count);
  const std::string jsonl = trace_to_jsonl(rep.trace);
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == static_cast<long>(rep.trace.size()));
}

TEST_CASE("config/plan bandwidth mismatch is rejected") {
  tmac::testutil::Gen gen(5);
  const auto model = tmac::testutil::random_model(gen, 2, 4, 16, 20, 0.2);
  const CompiledModel cm = compile_model(model);
  const PacketPlan plan = plan_packets(16, 8);
  CHECK_THROWS_AS(simulate_stream(cm, plan, {}, config_for(16)), std::invalid_argument);
}

TEST_CASE("compare_with_reference verdicts") {
  tmac::testutil::Gen gen(606);
  const auto f = 8u;
  const auto model = tmac::testutil::random_model(gen, 2, 6, f, 20, 0.25);
  const CompiledModel cm = compile_model(model);

  SUBCASE("faithful compilation has zero mismatches") {
    std::vector<BitVec> samples;
    for (std::uint32_t bits = 0; bits < 256; ++bits) samples.push_back(input_from_bits(bits, f));
    const VerifyVerdict v = compare_with_reference(model, cm, samples, config_for(64));
    CHECK(v.pass);
    CHECK(v.mismatches.empty());
    CHECK(v.samples == 256);
  }
  SUBCASE("a flipped include is caught on some input") {
    // class 0 votes for x0, class 1 votes for ~x0; dropping the x0 include
    // makes the corrupted clause constant 1 and flips the x0=0 prediction
    TaStateMatrix crafted(2, 2, 1, 10);
    crafted.set_state(0, 0, 0, 11);  // x0
    crafted.set_state(1, 0, 1, 11);  // ~x0
    const CompiledModel faithful = compile_model(crafted);
    CompiledModel corrupted = faithful;
    corrupted.clauses[0].pos_includes.clear();
    std::vector<BitVec> samples = {input_from_bits(0, 1), input_from_bits(1, 1)};
    const VerifyVerdict ok = compare_with_reference(crafted, faithful, samples, config_for(64));
    CHECK(ok.pass);
    const VerifyVerdict v = compare_with_reference(crafted, corrupted, samples, config_for(64));
    CHECK_FALSE(v.pass);
    REQUIRE(v.mismatches.size() == 1);
    CHECK(v.mismatches[0] == 0);
  }
  SUBCASE("empty dataset passes with a warning") {
    const VerifyVerdict v = compare_with_reference(model, cm, {}, config_for(64));
    CHECK(v.pass);
    CHECK(v.empty_warning);
    CHECK(v.samples == 0);
  }
}
