#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tmac/bitvec.hpp"
#include "tmac/dataset.hpp"
#include "tmac/rng.hpp"

namespace tmac {

struct Hyperparams {
  std::uint32_t clauses_per_class = 200;  // m, must be even so +/- polarities balance
  std::uint32_t threshold = 25;           // T
  double specificity = 10.0;              // s
  std::uint32_t states_per_action = 128;  // N; automaton states span [1, 2N]
  std::uint32_t epochs = 30;
  std::uint64_t seed = 42;

  void validate() const;  // throws std::invalid_argument
};

struct Prediction {
  std::vector<std::int32_t> class_sums;
  std::uint32_t argmax_class = 0;
};

// Automaton states for every (class, clause, literal). Feature i produces
// literal i (x_i) and literal F + i (~x_i). States live in [1, 2N]; states
// above N mean the literal is included in the clause.
class TaStateMatrix {
 public:
  TaStateMatrix() = default;
  TaStateMatrix(std::uint32_t classes, std::uint32_t clauses_per_class,
                std::uint32_t features, std::uint32_t states_per_action);

  std::uint32_t classes() const { return classes_; }
  std::uint32_t clauses_per_class() const { return clauses_; }
  std::uint32_t features() const { return features_; }
  std::uint32_t literal_count() const { return 2 * features_; }
  std::uint32_t states_per_action() const { return n_; }

  std::int16_t state(std::uint32_t cls, std::uint32_t clause, std::uint32_t literal) const {
    return states_[flat(cls, clause, literal)];
  }
  void set_state(std::uint32_t cls, std::uint32_t clause, std::uint32_t literal, std::int16_t s) {
    states_[flat(cls, clause, literal)] = s;
  }
  bool include(std::uint32_t cls, std::uint32_t clause, std::uint32_t literal) const {
    return state(cls, clause, literal) > static_cast<std::int16_t>(n_);
  }

  std::span<std::int16_t> clause_states(std::uint32_t cls, std::uint32_t clause) {
    return {&states_[flat(cls, clause, 0)], literal_count()};
  }
  std::span<const std::int16_t> clause_states(std::uint32_t cls, std::uint32_t clause) const {
    return {&states_[flat(cls, clause, 0)], literal_count()};
  }
  std::span<const std::int16_t> raw() const { return states_; }
  std::span<std::int16_t> raw() { return states_; }

  friend bool operator==(const TaStateMatrix&, const TaStateMatrix&) = default;

 private:
  std::size_t flat(std::uint32_t cls, std::uint32_t clause, std::uint32_t literal) const {
    return (static_cast<std::size_t>(cls) * clauses_ + clause) * literal_count() + literal;
  }

  std::uint32_t classes_ = 0;
  std::uint32_t clauses_ = 0;
  std::uint32_t features_ = 0;
  std::uint32_t n_ = 0;
  std::vector<std::int16_t> states_;
};

// Clause polarity alternates with clause index: even -> +1, odd -> -1.
inline int clause_polarity(std::uint32_t clause) { return (clause & 1) ? -1 : +1; }

// Boolean action of one automaton: include iff state > N. Throws
// std::out_of_range when state is outside [1, 2N].
bool include_action(int state, int states_per_action);

// Literal vector for input x: bits [0, F) = x, bits [F, 2F) = ~x.
BitVec make_literals(const BitVec& x);

// AND over the listed literals; the empty conjunction is 1 (the hardware
// seeds clause registers to 1, and training uses the same convention).
bool clause_output(std::span<const std::uint32_t> included_literals, const BitVec& literals);

// Resource-allocation gate: clamp the class sum to [-T, T], then
// target: (T - clamp) / 2T, non-target: (T + clamp) / 2T.
double feedback_probability(int class_sum, int threshold, bool is_target);

// Vanilla TM updates for one clause's automata. `include_mask`, when given,
// is kept in sync as states cross the include boundary.
void type_i_feedback(std::span<std::int16_t> states, bool clause_out, const BitVec& literals,
                     std::uint32_t states_per_action, double specificity, const CounterRng& rng,
                     std::uint64_t epoch, std::uint64_t sample, std::uint32_t cls,
                     std::uint32_t clause, BitVec* include_mask = nullptr);
void type_ii_feedback(std::span<std::int16_t> states, bool clause_out, const BitVec& literals,
                      std::uint32_t states_per_action, BitVec* include_mask = nullptr);

// Immutable inference view of a model: include masks are materialized once so
// clause evaluation is a masked word compare. Safe to share across threads.
class Inference {
 public:
  explicit Inference(const TaStateMatrix& model);

  std::uint32_t classes() const { return classes_; }
  std::uint32_t clauses_per_class() const { return clauses_; }
  std::uint32_t features() const { return features_; }

  const BitVec& include_mask(std::uint32_t cls, std::uint32_t clause) const {
    return masks_[static_cast<std::size_t>(cls) * clauses_ + clause];
  }
  bool clause_output(std::uint32_t cls, std::uint32_t clause, const BitVec& literals) const {
    return literals.contains_all(include_mask(cls, clause));
  }

  Prediction predict_literals(const BitVec& literals) const;
  Prediction predict(const BitVec& x) const { return predict_literals(make_literals(x)); }

 private:
  std::uint32_t classes_ = 0;
  std::uint32_t clauses_ = 0;
  std::uint32_t features_ = 0;
  std::vector<BitVec> masks_;
};

// Convenience single-shot prediction (builds the masks each call).
Prediction predict(const TaStateMatrix& model, const BitVec& x);

// Trains a model from scratch. Deterministic for a fixed seed regardless of
// `workers`; parallelism is over (class, clause) pairs within one sample.
TaStateMatrix train(const BooleanizedDataset& data, const Hyperparams& hp, unsigned workers = 1);

// Fraction of samples whose argmax class equals the label.
double accuracy(const TaStateMatrix& model, const BooleanizedDataset& data, unsigned workers = 1);

}  // namespace tmac
