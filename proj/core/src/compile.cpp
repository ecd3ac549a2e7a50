#include "tmac/compile.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace tmac {

bool ClauseExpr::contradictory() const {
  // both sorted; any common feature makes the clause constant 0
  auto a = pos_includes.begin();
  auto b = neg_includes.begin();
  while (a != pos_includes.end() && b != neg_includes.end()) {
    if (*a == *b) return true;
    if (*a < *b) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

bool ClauseExpr::eval(const BitVec& x) const {
  for (std::uint32_t f : pos_includes) {
    if (!x.get(f)) return false;
  }
  for (std::uint32_t f : neg_includes) {
    if (x.get(f)) return false;
  }
  return true;
}

Prediction CompiledModel::predict(const BitVec& x) const {
  if (x.size() != feature_count) {
    throw std::invalid_argument("predict: input width does not match the model");
  }
  Prediction p;
  p.class_sums.assign(classes, 0);
  for (const ClauseExpr& c : clauses) {
    if (c.eval(x)) p.class_sums[c.cls] += c.polarity;
  }
  p.argmax_class = 0;
  for (std::uint32_t c = 1; c < classes; ++c) {
    if (p.class_sums[c] > p.class_sums[p.argmax_class]) p.argmax_class = c;
  }
  return p;
}

CompiledModel compile_model(const TaStateMatrix& model) {
  CompiledModel out;
  out.classes = model.classes();
  out.clauses_per_class = model.clauses_per_class();
  out.feature_count = model.features();
  out.clauses.reserve(static_cast<std::size_t>(out.classes) * out.clauses_per_class);
  const std::uint32_t f = model.features();
  for (std::uint32_t c = 0; c < out.classes; ++c) {
    for (std::uint32_t j = 0; j < out.clauses_per_class; ++j) {
      ClauseExpr expr;
      expr.cls = c;
      expr.clause = j;
      expr.polarity = clause_polarity(j);
      for (std::uint32_t l = 0; l < 2 * f; ++l) {
        if (model.include(c, j, l)) {
          if (l < f) {
            expr.pos_includes.push_back(l);
          } else {
            expr.neg_includes.push_back(l - f);
          }
        }
      }
      out.clauses.push_back(std::move(expr));
    }
  }
  return out;
}

PruneResult prune_contradictions(const CompiledModel& model) {
  PruneResult result;
  result.model.classes = model.classes;
  result.model.clauses_per_class = model.clauses_per_class;
  result.model.feature_count = model.feature_count;
  result.model.pruned = true;
  result.model.seed = model.seed;
  result.model.config_hash = model.config_hash;
  result.model.tool_version = model.tool_version;
  result.remap.assign(model.clauses.size(), -1);
  for (std::size_t i = 0; i < model.clauses.size(); ++i) {
    const ClauseExpr& c = model.clauses[i];
    if (c.contradictory()) {
      result.removed.emplace_back(c.cls, c.clause);
    } else {
      result.remap[i] = static_cast<std::int64_t>(result.model.clauses.size());
      result.model.clauses.push_back(c);
    }
  }
  return result;
}

std::vector<HcbPlan> partition(const CompiledModel& model, const PacketPlan& plan) {
  if (plan.feature_count != model.feature_count) {
    throw std::invalid_argument("partition: packet plan does not cover the model's features");
  }
  std::vector<HcbPlan> plans(plan.packet_count);
  for (std::uint32_t p = 0; p < plan.packet_count; ++p) {
    auto& hcb = plans[p];
    hcb.packet = p;
    const auto [lo, hi] = plan.feature_range(p);
    hcb.feature_lo = lo;
    hcb.feature_hi = hi;
    hcb.partials.assign(model.flat_count(), HcbPartial{BitVec(plan.bandwidth), BitVec(plan.bandwidth)});
  }
  for (std::size_t i = 0; i < model.clauses.size(); ++i) {
    const ClauseExpr& c = model.clauses[i];
    for (std::uint32_t f : c.pos_includes) {
      const std::uint32_t p = f / plan.bandwidth;
      plans[p].partials[i].pos_mask.set(f - plans[p].feature_lo);
    }
    for (std::uint32_t f : c.neg_includes) {
      const std::uint32_t p = f / plan.bandwidth;
      plans[p].partials[i].neg_mask.set(f - plans[p].feature_lo);
    }
  }
  return plans;
}

SparsityReport analyze_sparsity(const CompiledModel& model) {
  SparsityReport r;
  r.total_actions = static_cast<std::uint64_t>(model.classes) * model.clauses_per_class * 2 *
                    model.feature_count;
  r.includes_per_class.assign(model.classes, 0);
  for (const ClauseExpr& c : model.clauses) {
    const std::uint64_t n = c.include_count();
    r.include_count += n;
    r.includes_per_class[c.cls] += n;
    if (c.empty()) ++r.empty_clauses;
    if (c.contradictory()) r.contradictory.emplace_back(c.cls, c.clause);
  }
  r.include_density =
      r.total_actions ? static_cast<double>(r.include_count) / static_cast<double>(r.total_actions)
                      : 0.0;
  return r;
}

}  // namespace tmac
