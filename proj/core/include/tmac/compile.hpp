#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tmac/bitvec.hpp"
#include "tmac/packet.hpp"
#include "tmac/tm.hpp"

namespace tmac {

// One clause as a sparse boolean expression: AND over the included feature
// literals. A clause may include both x_i and ~x_i; it is then constant 0 and
// is reported, not dropped (indexing and polarity bookkeeping stay intact).
struct ClauseExpr {
  std::uint32_t cls = 0;
  std::uint32_t clause = 0;
  int polarity = +1;
  std::vector<std::uint32_t> pos_includes;  // feature indices, sorted
  std::vector<std::uint32_t> neg_includes;  // feature indices, sorted

  bool empty() const { return pos_includes.empty() && neg_includes.empty(); }
  bool contradictory() const;
  std::size_t include_count() const { return pos_includes.size() + neg_includes.size(); }
  bool eval(const BitVec& x) const;
};

struct CompiledModel {
  std::uint32_t classes = 0;
  std::uint32_t clauses_per_class = 0;  // nominal m (before any pruning)
  std::uint32_t feature_count = 0;
  bool pruned = false;
  std::vector<ClauseExpr> clauses;  // sorted by (cls, clause)

  // provenance, embedded in every serialized artifact
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string tool_version;

  std::size_t flat_count() const { return clauses.size(); }
  Prediction predict(const BitVec& x) const;
};

// Include sets are exactly the automata with state > N; polarity alternates
// with clause index parity.
CompiledModel compile_model(const TaStateMatrix& model);

// Removes constant-0 clauses. `remap[i]` gives the new flat index of old flat
// clause i, or -1 when it was removed.
struct PruneResult {
  CompiledModel model;
  std::vector<std::int64_t> remap;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> removed;  // (class, clause)
};
PruneResult prune_contradictions(const CompiledModel& model);

// Partial clauses for one packet: per flat clause, the include bits whose
// features arrive in this packet, as packet-local masks.
struct HcbPartial {
  BitVec pos_mask;  // bit b: feature (lo + b) must be 1
  BitVec neg_mask;  // bit b: feature (lo + b) must be 0
  bool empty() const { return pos_mask.none() && neg_mask.none(); }
};

struct HcbPlan {
  std::uint32_t packet = 0;
  std::uint32_t feature_lo = 0;
  std::uint32_t feature_hi = 0;
  std::vector<HcbPartial> partials;  // one per flat clause

  bool eval(std::size_t flat_clause, const BitVec& packet_word) const {
    const HcbPartial& p = partials[flat_clause];
    return packet_word.contains_all(p.pos_mask) && !packet_word.intersects(p.neg_mask);
  }
};

std::vector<HcbPlan> partition(const CompiledModel& model, const PacketPlan& plan);

struct SparsityReport {
  std::uint64_t total_actions = 0;  // classes * clauses * 2F
  std::uint64_t include_count = 0;
  double include_density = 0.0;
  std::vector<std::uint64_t> includes_per_class;
  std::uint64_t empty_clauses = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> contradictory;  // (class, clause)

  // filled in by the netlist pass
  std::uint64_t flat_and_nodes = 0;
  std::uint64_t shared_and_nodes = 0;
  std::uint64_t luts_unshared = 0;
  std::uint64_t luts_shared = 0;
  std::uint32_t lut_inputs = 6;
};

SparsityReport analyze_sparsity(const CompiledModel& model);

}  // namespace tmac
