#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tmac/compile.hpp"
#include "tmac/packet.hpp"
#include "tmac/tm.hpp"

namespace tmac {

// Mirrors EmitConfig's timing fields; the simulator and the emitted RTL are
// twins of the same cycle contract.
struct SimConfig {
  double clock_mhz = 50.0;
  std::uint32_t bandwidth = 64;            // W, must match the packet plan
  std::uint32_t cs_stages = 1;             // class-sum pipeline registers
  std::uint32_t am_stages = 2;             // argmax registers (last one is the output register)
  std::vector<std::uint64_t> stall_cycles; // cycles with no packet on offer
  bool record_trace = false;

  std::uint32_t pipeline_depth() const { return cs_stages + am_stages; }  // k
};

struct TraceRecord {
  std::uint64_t cycle = 0;
  char fsm = 'I';             // R/I/C/S
  std::int64_t packet = -1;   // packet index accepted this cycle, -1 when none
  std::uint64_t clause_crc = 0;
};

struct SimReport {
  std::vector<std::uint32_t> predictions;
  std::uint64_t first_latency_cycles = 0;
  double first_latency_us = 0.0;
  std::uint64_t initiation_interval = 0;  // steady-state cycles between results
  double throughput_inf_s = 0.0;
  std::uint64_t total_cycles = 0;
  std::vector<std::uint64_t> result_cycles;
  std::vector<TraceRecord> trace;
};

// Cycle-accurate stream simulation: one packet consumed per non-stalled
// cycle, HCB p ANDs its partial outputs into the clause registers, and the
// class-sum/argmax pipeline drains k = cs_stages + am_stages cycles later.
SimReport simulate_stream(const CompiledModel& model, const PacketPlan& plan,
                          const std::vector<BitVec>& samples, const SimConfig& config);

struct LatencyEstimate {
  std::uint32_t packet_count = 0;
  std::uint64_t latency_cycles = 0;
  double latency_us = 0.0;
  double throughput_inf_s = 0.0;
};

// Closed form, no simulation: P = ceil(F/W), latency = P + cs + am cycles,
// throughput = clock / P.
LatencyEstimate latency_model(std::uint32_t features, std::uint32_t bandwidth,
                              std::uint32_t cs_stages, std::uint32_t am_stages, double clock_mhz);

struct VerifyVerdict {
  std::uint64_t samples = 0;
  std::vector<std::uint64_t> mismatches;
  bool pass = false;
  bool empty_warning = false;
};

// Runs the simulator against the automaton-level reference on every sample.
VerifyVerdict compare_with_reference(const TaStateMatrix& reference, const CompiledModel& compiled,
                                     const std::vector<BitVec>& samples, const SimConfig& config);

std::string trace_to_jsonl(const std::vector<TraceRecord>& trace);
std::string report_to_json(const SimReport& report, const SimConfig& config);

}  // namespace tmac
