#include <doctest.h>

#include <cmath>
#include <vector>

#include "test_util.hpp"
#include "tmac/tm.hpp"

using namespace tmac;

TEST_CASE("include_action flips exactly at N/N+1") {
  const int n = 100;
  CHECK_FALSE(include_action(n, n));
  CHECK(include_action(n + 1, n));
  CHECK(include_action(2 * n, n));
  CHECK_FALSE(include_action(1, n));
  CHECK_THROWS_AS(include_action(0, n), std::out_of_range);
  CHECK_THROWS_AS(include_action(2 * n + 1, n), std::out_of_range);
}

TEST_CASE("make_literals appends the negated half") {
  const BitVec x = BitVec::from_numeral("010");  // x0=0 x1=1 x2=0
  const BitVec lit = make_literals(x);
  REQUIRE(lit.size() == 6);
  CHECK_FALSE(lit.get(0));
  CHECK(lit.get(1));
  CHECK_FALSE(lit.get(2));
  CHECK(lit.get(3));   // ~x0
  CHECK_FALSE(lit.get(4));
  CHECK(lit.get(5));   // ~x2
}

TEST_CASE("clause_output is an AND with empty = 1") {
  const BitVec x = BitVec::from_numeral("111");
  const BitVec lit = make_literals(x);
  SUBCASE("a false negated literal kills the AND") {
    const std::vector<std::uint32_t> inc = {0, 5};  // x0 and ~x2
    CHECK_FALSE(clause_output(inc, lit));
  }
  SUBCASE("empty include set outputs 1") {
    CHECK(clause_output({}, lit));
    CHECK(clause_output({}, make_literals(BitVec(3))));
  }
  SUBCASE("satisfied single literal") {
    const BitVec lit2 = make_literals(BitVec::from_numeral("010"));
    const std::vector<std::uint32_t> inc = {1};  // x1
    CHECK(clause_output(inc, lit2));
  }
  SUBCASE("out-of-range literal index") {
    const std::vector<std::uint32_t> inc = {6};
    CHECK_THROWS_AS(clause_output(inc, lit), std::out_of_range);
  }
}

namespace {

// Model whose clause outputs on a fixed input are chosen directly: clause j
// of class c is forced to `outputs[c][j]` for the all-zeros input by
// including x0 (kills the clause) or ~x0 (satisfies it).
TaStateMatrix model_with_outputs(const std::vector<std::vector<int>>& outputs, std::uint32_t n) {
  const auto classes = static_cast<std::uint32_t>(outputs.size());
  const auto clauses = static_cast<std::uint32_t>(outputs[0].size());
  TaStateMatrix model(classes, clauses, 1, n);
  for (std::uint32_t c = 0; c < classes; ++c) {
    for (std::uint32_t j = 0; j < clauses; ++j) {
      const std::uint32_t literal = outputs[c][j] ? 1u : 0u;  // ~x0 : x0
      model.set_state(c, j, literal, static_cast<std::int16_t>(n + 1));
    }
  }
  return model;
}

}  // namespace

TEST_CASE("class sums follow alternating polarity") {
  const BitVec x(1);  // x0 = 0
  SUBCASE("outputs 1,1,0,1 with +,-,+,- give -1") {
    const Prediction p = predict(model_with_outputs({{1, 1, 0, 1}}, 10), x);
    CHECK(p.class_sums[0] == -1);
  }
  SUBCASE("all clauses silent give 0") {
    const Prediction p = predict(model_with_outputs({{0, 0, 0, 0}}, 10), x);
    CHECK(p.class_sums[0] == 0);
  }
  SUBCASE("argmax tie-break picks the lowest class index") {
    const Prediction p = predict(model_with_outputs({{1, 0, 1, 0}, {1, 0, 1, 0}}, 10), x);
    CHECK(p.class_sums[0] == 2);
    CHECK(p.class_sums[1] == 2);
    CHECK(p.argmax_class == 0);
  }
}

TEST_CASE("argmax equals a linear-scan oracle on random models") {
  tmac::testutil::Gen gen(31);
  for (int iter = 0; iter < 50; ++iter) {
    const auto classes = static_cast<std::uint32_t>(2 + gen.below(6));
    const auto model = tmac::testutil::random_model(gen, classes, 4, 5, 50, 0.2);
    const Inference inf(model);
    for (int s = 0; s < 20; ++s) {
      const Prediction p = inf.predict(gen.bitvec(5));
      std::uint32_t best = 0;
      for (std::uint32_t c = 1; c < classes; ++c) {
        if (p.class_sums[c] > p.class_sums[best]) best = c;
      }
      CHECK(p.argmax_class == best);
      // class sum bound: one polarity can contribute at most m/2
      for (const auto sum : p.class_sums) CHECK(std::abs(sum) <= 2);
    }
  }
}

TEST_CASE("feedback_probability ramps with the clamped class sum") {
  const int t = 15;
  CHECK(feedback_probability(t, t, true) == doctest::Approx(0.0));
  CHECK(feedback_probability(-t, t, true) == doctest::Approx(1.0));
  CHECK(feedback_probability(0, t, false) == doctest::Approx(0.5));
  CHECK(feedback_probability(100 * t, t, true) == doctest::Approx(0.0));   // clamped
  CHECK(feedback_probability(-100 * t, t, false) == doctest::Approx(0.0));
}

TEST_CASE("type II pushes excluded false literals toward include") {
  const std::uint32_t n = 100;
  std::vector<std::int16_t> states = {static_cast<std::int16_t>(n)};
  BitVec lit(1);  // literal value 0
  type_ii_feedback(states, true, lit, n);
  CHECK(states[0] == static_cast<std::int16_t>(n + 1));
  // silent clause: no change
  states[0] = static_cast<std::int16_t>(n);
  type_ii_feedback(states, false, lit, n);
  CHECK(states[0] == static_cast<std::int16_t>(n));
  // true literals untouched
  BitVec lit1(1);
  lit1.set(0);
  type_ii_feedback(states, true, lit1, n);
  CHECK(states[0] == static_cast<std::int16_t>(n));
}

TEST_CASE("type I clamps at the deepest include state") {
  const std::uint32_t n = 100;
  const CounterRng rng(5);
  std::vector<std::int16_t> states = {static_cast<std::int16_t>(2 * n)};
  BitVec lit(1);
  lit.set(0);
  for (int rep = 0; rep < 50; ++rep) {
    type_i_feedback(states, true, lit, n, 3.9, rng, 0, static_cast<std::uint64_t>(rep), 0, 0);
    CHECK(states[0] == static_cast<std::int16_t>(2 * n));
  }
}

TEST_CASE("type I firing frequencies match the specificity formula") {
  const std::uint32_t count = 100000;
  const std::uint32_t n = 100;
  const CounterRng rng(123);

  auto run = [&](double s, bool literal_value) {
    std::vector<std::int16_t> states(count, static_cast<std::int16_t>(n));
    BitVec lit(count);
    if (literal_value) lit.fill(true);
    type_i_feedback(states, true, lit, n, s, rng, 0, 0, 0, 0);
    std::size_t moved = 0;
    for (std::int16_t st : states) {
      if (st != static_cast<std::int16_t>(n)) ++moved;
    }
    return static_cast<double>(moved) / count;
  };

  CHECK(run(3.0, true) == doctest::Approx(2.0 / 3.0).epsilon(0.015));
  CHECK(run(3.0, false) == doctest::Approx(1.0 / 3.0).epsilon(0.015));
  // s -> infinity limit: true literals always reinforced, false ones never decay
  CHECK(run(1e9, true) >= 0.99);
  CHECK(run(1e9, false) <= 0.01);
}

TEST_CASE("zero epochs returns the initialization") {
  const BooleanizedDataset data = make_xor_dataset(100, 4, 3);
  Hyperparams hp;
  hp.clauses_per_class = 10;
  hp.threshold = 5;
  hp.specificity = 3.9;
  hp.states_per_action = 100;
  hp.epochs = 0;
  const TaStateMatrix model = train(data, hp);
  for (std::int16_t st : model.raw()) CHECK(st == 100);
}

TEST_CASE("train rejects bad input") {
  Hyperparams hp;
  hp.clauses_per_class = 10;
  BooleanizedDataset empty;
  empty.feature_count = 4;
  empty.class_count = 2;
  CHECK_THROWS_AS(train(empty, hp), std::invalid_argument);

  BooleanizedDataset bad = make_xor_dataset(10, 2, 1);
  bad.labels[0] = 9;
  CHECK_THROWS_AS(train(bad, hp), std::invalid_argument);

  Hyperparams odd = hp;
  odd.clauses_per_class = 7;
  CHECK_THROWS_AS(odd.validate(), std::invalid_argument);
  Hyperparams low_s = hp;
  low_s.specificity = 1.0;
  CHECK_THROWS_AS(low_s.validate(), std::invalid_argument);
}

TEST_CASE("repeated single sample drives the target class sum toward +T") {
  BooleanizedDataset data;
  data.feature_count = 4;
  data.class_count = 2;
  data.samples.assign(1, BitVec::from_numeral("1010"));
  data.labels = {0};

  Hyperparams hp;
  hp.clauses_per_class = 10;
  hp.threshold = 5;
  hp.specificity = 3.9;
  hp.states_per_action = 100;

  double first = 0.0, last = 0.0;
  const int n_seeds = 5;
  for (std::uint64_t seed = 0; seed < n_seeds; ++seed) {
    hp.seed = 1000 + seed;
    hp.epochs = 1;
    first += predict(train(data, hp), data.samples[0]).class_sums[0];
    hp.epochs = 30;
    last += predict(train(data, hp), data.samples[0]).class_sums[0];
  }
  first /= n_seeds;
  last /= n_seeds;
  CHECK(last > first);
  CHECK(last >= hp.threshold - 1);
}

TEST_CASE("states stay in [1, 2N] through training") {
  tmac::testutil::Gen gen(77);
  for (int iter = 0; iter < 5; ++iter) {
    BooleanizedDataset data;
    data.feature_count = static_cast<std::uint32_t>(2 + gen.below(6));
    data.class_count = static_cast<std::uint32_t>(2 + gen.below(3));
    for (int i = 0; i < 40; ++i) {
      data.samples.push_back(gen.bitvec(data.feature_count));
      data.labels.push_back(static_cast<std::uint16_t>(gen.below(data.class_count)));
    }
    Hyperparams hp;
    hp.clauses_per_class = 8;
    hp.threshold = 4;
    hp.specificity = 3.0;
    hp.states_per_action = 6;
    hp.epochs = 10;
    hp.seed = gen.bits();
    const TaStateMatrix model = train(data, hp);
    for (std::int16_t st : model.raw()) {
      CHECK(st >= 1);
      CHECK(st <= 12);
    }
  }
}

TEST_CASE("training is bit-reproducible across runs and worker counts") {
  const BooleanizedDataset data = make_xor_dataset(300, 6, 11);
  Hyperparams hp;
  hp.clauses_per_class = 12;
  hp.threshold = 8;
  hp.specificity = 3.9;
  hp.states_per_action = 64;
  hp.epochs = 5;
  hp.seed = 2024;
  const TaStateMatrix a = train(data, hp, 1);
  const TaStateMatrix b = train(data, hp, 1);
  const TaStateMatrix c = train(data, hp, 3);
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("noisy XOR is learnable to 95%") {
  const BooleanizedDataset trainset = make_xor_dataset(5000, 10, 421);
  const BooleanizedDataset testset = make_xor_dataset(2000, 10, 9001);
  Hyperparams hp;
  hp.clauses_per_class = 20;
  hp.threshold = 15;
  hp.specificity = 3.9;
  hp.states_per_action = 128;
  hp.epochs = 50;
  hp.seed = 7;
  const TaStateMatrix model = train(trainset, hp);
  const double acc = accuracy(model, testset);
  CHECK(acc >= 0.95);
}
