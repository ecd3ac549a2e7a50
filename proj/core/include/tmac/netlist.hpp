#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "tmac/compile.hpp"
#include "tmac/packet.hpp"

namespace tmac {

// Hash-consed AND-node DAG over literal leaves, one root per non-empty
// (packet, clause) partial. Identical include subsets collapse to one node;
// common intersections above `factor_min` literals are greedily factored out
// as internal nodes when that does not worsen the LUT estimate.
//
// Leaves are global literal ids: literal l < F is feature l, literal F + l is
// the negation of feature l. Sharing can only occur inside one packet (their
// literal ranges are disjoint), so every node belongs to a packet.
class SharedNetlist {
 public:
  using NodeId = std::uint32_t;
  static constexpr NodeId kConstOne = std::numeric_limits<NodeId>::max();

  struct Node {
    std::uint32_t packet = 0;
    std::vector<std::uint32_t> literals;  // remaining leaf literals, sorted
    std::vector<NodeId> factors;          // shared sub-conjunctions, sorted
    std::uint32_t refs = 0;               // root uses + parent uses
    std::size_t fan_in() const { return literals.size() + factors.size(); }
  };

  struct BuildOptions {
    std::uint32_t factor_min = 4;   // smallest intersection worth a node
    std::uint32_t lut_inputs = 6;   // cost model the factoring guard optimizes
  };

  static SharedNetlist build(const CompiledModel& model, const std::vector<HcbPlan>& plans,
                             const BuildOptions& opts);
  static SharedNetlist build(const CompiledModel& model, const std::vector<HcbPlan>& plans) {
    return build(model, plans, BuildOptions{});
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t flat_node_count() const { return flat_nodes_; }
  const Node& node(NodeId id) const { return nodes_[id]; }
  std::uint32_t packet_count() const { return packets_; }
  std::size_t clause_count() const { return packets_ ? roots_.size() / packets_ : 0; }

  NodeId root(std::uint32_t packet, std::size_t flat_clause) const {
    return roots_[static_cast<std::size_t>(packet) * clause_count_ + flat_clause];
  }

  // Evaluates every node once for this input; index by NodeId.
  std::vector<char> eval_all(const BitVec& literals) const;
  bool eval_root(NodeId id, const BitVec& literals) const;
  // Full clause value: AND over this clause's per-packet roots.
  bool eval_clause(std::size_t flat_clause, const BitVec& literals) const;

 private:
  std::vector<Node> nodes_;
  std::vector<NodeId> roots_;  // [packet][flat_clause]
  std::size_t clause_count_ = 0;
  std::uint32_t packets_ = 0;
  std::size_t flat_nodes_ = 0;
};

struct ResourceEstimate {
  std::uint64_t shared_luts = 0;
  std::uint64_t unshared_luts = 0;
  std::uint32_t lut_inputs = 6;
};

// LUT packing estimate: an AND with fan-in f costs ceil((f-1)/(k-1)) k-input
// LUTs; inverters and single-input nodes are absorbed (cost 0).
ResourceEstimate estimate_resources(const SharedNetlist& netlist, const CompiledModel& model,
                                    const std::vector<HcbPlan>& plans, std::uint32_t lut_inputs = 6);

// Sparsity report augmented with sharing and LUT numbers.
SparsityReport analyze_with_netlist(const CompiledModel& model, const std::vector<HcbPlan>& plans,
                                    const SharedNetlist& netlist, std::uint32_t lut_inputs = 6);

}  // namespace tmac
