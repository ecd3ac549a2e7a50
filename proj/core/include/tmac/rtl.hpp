#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tmac/compile.hpp"
#include "tmac/netlist.hpp"
#include "tmac/packet.hpp"

namespace tmac {

// Emission knobs. Timing fields mirror SimConfig: the post-HCB pipeline depth
// is cs_stages + am_stages, with the final argmax stage doubling as the
// output register (defaults give the 3-cycle depth behind the published
// latencies).
struct EmitConfig {
  std::uint32_t bandwidth = 64;
  std::uint32_t cs_stages = 1;
  std::uint32_t am_stages = 2;
  std::uint32_t sum_width = 0;  // 0 = smallest signed width holding [-m/2, m/2]
  std::string prefix = "tm";
  std::string stream_prefix = "s_axis";  // tdata/tvalid/tready/tlast port names
  std::string result_prefix = "result";

  std::uint32_t pipeline_depth() const { return cs_stages + am_stages; }
};

// Derived widths shared by emitter, simulator and tests.
std::uint32_t sum_bits(std::uint32_t clauses_per_class);
std::uint32_t argmax_leaves(std::uint32_t classes);
std::uint32_t index_bits(std::uint32_t classes);

std::string emit_hcb(const CompiledModel& model, const PacketPlan& plan,
                     const SharedNetlist& netlist, const EmitConfig& cfg, std::uint32_t packet);
std::string emit_class_sum(const CompiledModel& model, const EmitConfig& cfg);
std::string emit_argmax(const CompiledModel& model, const EmitConfig& cfg);
std::string emit_controller(const CompiledModel& model, const PacketPlan& plan,
                            const EmitConfig& cfg);
std::string emit_top(const CompiledModel& model, const PacketPlan& plan, const EmitConfig& cfg);
std::string emit_testbench(const CompiledModel& model, const PacketPlan& plan,
                           const EmitConfig& cfg, std::size_t sample_count);

struct RtlFileSet {
  std::vector<std::pair<std::string, std::string>> files;  // name -> content, canonical order
  std::string manifest_json;

  const std::string* find(const std::string& name) const;
};

// Full deterministic file set: top.v, hcb_<p>.v, class_sum.v, argmax.v,
// controller.v, tb_top.v, vectors.mem, expected.mem (+ manifest JSON).
// Expected outputs are computed from the compiled model; the explicit
// overload throws when samples and expectations disagree in length.
RtlFileSet emit_design(const CompiledModel& model, const PacketPlan& plan,
                       const SharedNetlist& netlist, const EmitConfig& cfg,
                       const std::vector<BitVec>& tb_samples);
RtlFileSet emit_design(const CompiledModel& model, const PacketPlan& plan,
                       const SharedNetlist& netlist, const EmitConfig& cfg,
                       const std::vector<BitVec>& tb_samples,
                       const std::vector<std::uint32_t>& expected);

void write_file_set(const std::filesystem::path& dir, const RtlFileSet& files);

}  // namespace tmac
