#include "tmac/netlist.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>

namespace tmac {

namespace {

std::uint64_t lut_cost(std::size_t fan_in, std::uint32_t k) {
  if (fan_in <= 1) return 0;
  return (fan_in - 2) / (k - 1) + 1;  // ceil((fan_in - 1) / (k - 1))
}

std::vector<std::uint32_t> intersect_sorted(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool includes_sorted(const std::vector<std::uint32_t>& hay, const std::vector<std::uint32_t>& sub) {
  return std::includes(hay.begin(), hay.end(), sub.begin(), sub.end());
}

void subtract_sorted(std::vector<std::uint32_t>& hay, const std::vector<std::uint32_t>& sub) {
  std::vector<std::uint32_t> out;
  out.reserve(hay.size() - sub.size());
  std::set_difference(hay.begin(), hay.end(), sub.begin(), sub.end(), std::back_inserter(out));
  hay = std::move(out);
}

}  // namespace

SharedNetlist SharedNetlist::build(const CompiledModel& model, const std::vector<HcbPlan>& plans,
                                   const BuildOptions& opts) {
  SharedNetlist net;
  net.packets_ = static_cast<std::uint32_t>(plans.size());
  net.clause_count_ = model.flat_count();
  net.roots_.assign(static_cast<std::size_t>(net.packets_) * net.clause_count_, kConstOne);

  const std::uint32_t f = model.feature_count;
  // Stage 1: hash-cons identical flat include sets per packet.
  std::map<std::vector<std::uint32_t>, NodeId> interned;  // literal set -> node
  std::vector<std::vector<NodeId>> packet_pool(plans.size());
  for (std::uint32_t p = 0; p < plans.size(); ++p) {
    const HcbPlan& hcb = plans[p];
    for (std::size_t c = 0; c < net.clause_count_; ++c) {
      const HcbPartial& part = hcb.partials[c];
      std::vector<std::uint32_t> lits;
      for (std::uint32_t b = 0; b < part.pos_mask.size(); ++b) {
        if (part.pos_mask.get(b)) lits.push_back(hcb.feature_lo + b);
      }
      for (std::uint32_t b = 0; b < part.neg_mask.size(); ++b) {
        if (part.neg_mask.get(b)) lits.push_back(f + hcb.feature_lo + b);
      }
      if (lits.empty()) continue;
      ++net.flat_nodes_;
      auto [it, inserted] = interned.try_emplace(lits, 0);
      if (inserted) {
        it->second = static_cast<NodeId>(net.nodes_.size());
        net.nodes_.push_back(Node{p, std::move(lits), {}, 0});
        packet_pool[p].push_back(it->second);
      }
      net.nodes_[it->second].refs += 1;
      net.roots_[static_cast<std::size_t>(p) * net.clause_count_ + c] = it->second;
    }
  }

  // Stage 2: greedy intersection factoring inside each packet. A candidate is
  // accepted only when the LUT estimate does not grow.
  const std::uint32_t k = opts.lut_inputs;
  for (std::uint32_t p = 0; p < plans.size(); ++p) {
    auto& pool = packet_pool[p];
    for (;;) {
      std::vector<std::uint32_t> best;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        const Node& a = net.nodes_[pool[i]];
        if (a.literals.size() < opts.factor_min) continue;
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
          const Node& b = net.nodes_[pool[j]];
          if (b.literals.size() < opts.factor_min) continue;
          std::vector<std::uint32_t> inter = intersect_sorted(a.literals, b.literals);
          if (inter.size() < opts.factor_min || inter.size() <= best.size()) continue;

          // existing node with exactly this content?
          NodeId fid = kConstOne;
          for (NodeId cand : pool) {
            const Node& n = net.nodes_[cand];
            if (n.factors.empty() && n.literals == inter) {
              fid = cand;
              break;
            }
          }
          std::int64_t delta = fid == kConstOne
                                   ? static_cast<std::int64_t>(lut_cost(inter.size(), k))
                                   : 0;
          for (NodeId host : pool) {
            const Node& n = net.nodes_[host];
            if (host == fid || !includes_sorted(n.literals, inter)) continue;
            delta += static_cast<std::int64_t>(
                         lut_cost(n.fan_in() - inter.size() + 1, k)) -
                     static_cast<std::int64_t>(lut_cost(n.fan_in(), k));
          }
          if (delta <= 0) best = std::move(inter);
        }
      }
      if (best.empty()) break;

      NodeId fid = kConstOne;
      for (NodeId cand : pool) {
        const Node& n = net.nodes_[cand];
        if (n.factors.empty() && n.literals == best) {
          fid = cand;
          break;
        }
      }
      if (fid == kConstOne) {
        fid = static_cast<NodeId>(net.nodes_.size());
        net.nodes_.push_back(Node{p, best, {}, 0});
        pool.push_back(fid);
      }
      for (NodeId host : pool) {
        Node& n = net.nodes_[host];
        if (host == fid || !includes_sorted(n.literals, best)) continue;
        subtract_sorted(n.literals, best);
        n.factors.insert(std::upper_bound(n.factors.begin(), n.factors.end(), fid), fid);
        net.nodes_[fid].refs += 1;
      }
    }
  }
  return net;
}

std::vector<char> SharedNetlist::eval_all(const BitVec& literals) const {
  std::vector<char> value(nodes_.size(), 0);
  std::vector<char> ready(nodes_.size(), 0);
  std::function<bool(NodeId)> eval = [&](NodeId id) -> bool {
    if (ready[id]) return value[id] != 0;
    bool v = true;
    const Node& n = nodes_[id];
    for (std::uint32_t l : n.literals) {
      if (!literals.get(l)) {
        v = false;
        break;
      }
    }
    if (v) {
      for (NodeId c : n.factors) {
        if (!eval(c)) {
          v = false;
          break;
        }
      }
    }
    ready[id] = 1;
    value[id] = v ? 1 : 0;
    return v;
  };
  for (NodeId id = 0; id < nodes_.size(); ++id) eval(id);
  return value;
}

bool SharedNetlist::eval_root(NodeId id, const BitVec& literals) const {
  if (id == kConstOne) return true;
  const Node& n = nodes_[id];
  for (std::uint32_t l : n.literals) {
    if (!literals.get(l)) return false;
  }
  for (NodeId c : n.factors) {
    if (!eval_root(c, literals)) return false;
  }
  return true;
}

bool SharedNetlist::eval_clause(std::size_t flat_clause, const BitVec& literals) const {
  for (std::uint32_t p = 0; p < packets_; ++p) {
    if (!eval_root(root(p, flat_clause), literals)) return false;
  }
  return true;
}

ResourceEstimate estimate_resources(const SharedNetlist& netlist, const CompiledModel& model,
                                    const std::vector<HcbPlan>& plans, std::uint32_t lut_inputs) {
  if (lut_inputs < 2) throw std::invalid_argument("estimate_resources: lut_inputs must be >= 2");
  ResourceEstimate est;
  est.lut_inputs = lut_inputs;
  for (std::size_t id = 0; id < netlist.node_count(); ++id) {
    est.shared_luts += lut_cost(netlist.node(static_cast<SharedNetlist::NodeId>(id)).fan_in(),
                                lut_inputs);
  }
  for (const HcbPlan& hcb : plans) {
    for (std::size_t c = 0; c < model.flat_count(); ++c) {
      const HcbPartial& part = hcb.partials[c];
      const std::size_t n = part.pos_mask.count() + part.neg_mask.count();
      if (n) est.unshared_luts += lut_cost(n, lut_inputs);
    }
  }
  return est;
}

SparsityReport analyze_with_netlist(const CompiledModel& model, const std::vector<HcbPlan>& plans,
                                    const SharedNetlist& netlist, std::uint32_t lut_inputs) {
  SparsityReport r = analyze_sparsity(model);
  r.flat_and_nodes = netlist.flat_node_count();
  r.shared_and_nodes = netlist.node_count();
  const ResourceEstimate est = estimate_resources(netlist, model, plans, lut_inputs);
  r.luts_shared = est.shared_luts;
  r.luts_unshared = est.unshared_luts;
  r.lut_inputs = lut_inputs;
  return r;
}

}  // namespace tmac
