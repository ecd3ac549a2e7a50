#include "tmac/tm.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cassert>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace tmac {

namespace {

// Reserved class ids for draws that are not tied to a clause.
constexpr std::uint32_t kShuffleStream = 0xfffffffe;
constexpr std::uint32_t kNegativePickStream = 0xffffffff;

// Persistent pool for the per-sample (class, clause) feedback fan-out. The
// main thread participates in every batch.
class WorkerPool {
 public:
  explicit WorkerPool(unsigned workers) {
    for (unsigned i = 1; i < workers; ++i) {
      threads_.emplace_back([this] { worker_loop(); });
    }
  }
  ~WorkerPool() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    cv_start_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void run(std::uint32_t count, const std::function<void(std::uint32_t)>& fn) {
    if (threads_.empty()) {
      for (std::uint32_t i = 0; i < count; ++i) fn(i);
      return;
    }
    {
      std::lock_guard lock(mu_);
      fn_ = &fn;
      count_ = count;
      next_.store(0, std::memory_order_relaxed);
      pending_ = static_cast<std::uint32_t>(threads_.size());
      ++generation_;
    }
    cv_start_.notify_all();
    drain();
    std::unique_lock lock(mu_);
    cv_done_.wait(lock, [this] { return pending_ == 0; });
    fn_ = nullptr;
  }

 private:
  void drain() {
    std::uint32_t i;
    while ((i = next_.fetch_add(1, std::memory_order_relaxed)) < count_) (*fn_)(i);
  }
  void worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
      {
        std::unique_lock lock(mu_);
        cv_start_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
      }
      drain();
      {
        std::lock_guard lock(mu_);
        if (--pending_ == 0) cv_done_.notify_one();
      }
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_start_, cv_done_;
  const std::function<void(std::uint32_t)>* fn_ = nullptr;
  std::atomic<std::uint32_t> next_{0};
  std::uint32_t count_ = 0;
  std::uint32_t pending_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace

void Hyperparams::validate() const {
  if (clauses_per_class < 2 || (clauses_per_class & 1)) {
    throw std::invalid_argument("clauses_per_class must be even and >= 2");
  }
  if (threshold < 1) throw std::invalid_argument("threshold must be >= 1");
  if (!(specificity > 1.0)) throw std::invalid_argument("specificity must be > 1");
  if (states_per_action < 1 || states_per_action > 16383) {
    throw std::invalid_argument("states_per_action must be in [1, 16383]");
  }
}

TaStateMatrix::TaStateMatrix(std::uint32_t classes, std::uint32_t clauses_per_class,
                             std::uint32_t features, std::uint32_t states_per_action)
    : classes_(classes),
      clauses_(clauses_per_class),
      features_(features),
      n_(states_per_action),
      states_(static_cast<std::size_t>(classes) * clauses_per_class * 2 * features,
              static_cast<std::int16_t>(states_per_action)) {}

bool include_action(int state, int states_per_action) {
  if (state < 1 || state > 2 * states_per_action) {
    throw std::out_of_range("automaton state " + std::to_string(state) + " outside [1, " +
                            std::to_string(2 * states_per_action) + "]");
  }
  return state > states_per_action;
}

BitVec make_literals(const BitVec& x) {
  const std::size_t f = x.size();
  BitVec lit(2 * f);
  for (std::size_t i = 0; i < f; i += 64) {
    const unsigned n = static_cast<unsigned>(std::min<std::size_t>(64, f - i));
    const std::uint64_t v = x.extract(i, n);
    lit.deposit(i, n, v);
    lit.deposit(f + i, n, ~v);
  }
  return lit;
}

bool clause_output(std::span<const std::uint32_t> included_literals, const BitVec& literals) {
  for (std::uint32_t l : included_literals) {
    if (l >= literals.size()) throw std::out_of_range("literal index out of range");
    if (!literals.get(l)) return false;
  }
  return true;
}

double feedback_probability(int class_sum, int threshold, bool is_target) {
  assert(threshold >= 1);
  const int c = std::clamp(class_sum, -threshold, threshold);
  const double t = static_cast<double>(threshold);
  return is_target ? (t - c) / (2.0 * t) : (t + c) / (2.0 * t);
}

void type_i_feedback(std::span<std::int16_t> states, bool clause_out, const BitVec& literals,
                     std::uint32_t states_per_action, double specificity, const CounterRng& rng,
                     std::uint64_t epoch, std::uint64_t sample, std::uint32_t cls,
                     std::uint32_t clause, BitVec* include_mask) {
  const double p_inc = (specificity - 1.0) / specificity;
  const double p_dec = 1.0 / specificity;
  const auto n = static_cast<std::int16_t>(states_per_action);
  const auto top = static_cast<std::int16_t>(2 * states_per_action);
  const std::uint64_t base = rng.event_base(epoch, sample, cls, clause);
  const std::uint32_t count = static_cast<std::uint32_t>(states.size());

  for (std::uint32_t w = 0; w < count; w += 64) {
    const std::uint64_t lw = literals.word(w >> 6);
    const std::uint32_t here = std::min(64u, count - w);
    for (std::uint32_t b = 0; b < here; ++b) {
      const std::uint32_t l = w + b;
      std::int16_t st = states[l];
      if (clause_out && ((lw >> b) & 1)) {
        // True literal in a firing clause: push toward include.
        if (st < top && CounterRng::to_unit(CounterRng::item_bits(base, l)) < p_inc) {
          states[l] = ++st;
          if (st == n + 1 && include_mask) include_mask->set(l);
        }
      } else {
        // False literal, or silent clause: decay toward exclude.
        if (st > 1 && CounterRng::to_unit(CounterRng::item_bits(base, l)) < p_dec) {
          states[l] = --st;
          if (st == n && include_mask) include_mask->set(l, false);
        }
      }
    }
  }
}

void type_ii_feedback(std::span<std::int16_t> states, bool clause_out, const BitVec& literals,
                      std::uint32_t states_per_action, BitVec* include_mask) {
  if (!clause_out) return;
  const auto n = static_cast<std::int16_t>(states_per_action);
  const std::uint32_t count = static_cast<std::uint32_t>(states.size());
  for (std::uint32_t w = 0; w < count; w += 64) {
    const std::uint64_t lw = literals.word(w >> 6);
    const std::uint32_t here = std::min(64u, count - w);
    for (std::uint32_t b = 0; b < here; ++b) {
      if ((lw >> b) & 1) continue;  // only false literals block a firing clause
      const std::uint32_t l = w + b;
      const std::int16_t st = states[l];
      if (st <= n) {
        states[l] = static_cast<std::int16_t>(st + 1);
        if (st == n && include_mask) include_mask->set(l);
      }
    }
  }
}

Inference::Inference(const TaStateMatrix& model)
    : classes_(model.classes()), clauses_(model.clauses_per_class()), features_(model.features()) {
  masks_.reserve(static_cast<std::size_t>(classes_) * clauses_);
  for (std::uint32_t c = 0; c < classes_; ++c) {
    for (std::uint32_t j = 0; j < clauses_; ++j) {
      BitVec mask(model.literal_count());
      for (std::uint32_t l = 0; l < model.literal_count(); ++l) {
        if (model.include(c, j, l)) mask.set(l);
      }
      masks_.push_back(std::move(mask));
    }
  }
}

Prediction Inference::predict_literals(const BitVec& literals) const {
  Prediction p;
  p.class_sums.resize(classes_);
  for (std::uint32_t c = 0; c < classes_; ++c) {
    std::int32_t sum = 0;
    const std::size_t row = static_cast<std::size_t>(c) * clauses_;
    for (std::uint32_t j = 0; j < clauses_; ++j) {
      if (literals.contains_all(masks_[row + j])) sum += clause_polarity(j);
    }
    assert(std::abs(sum) <= static_cast<std::int32_t>(clauses_ / 2));
    p.class_sums[c] = sum;
  }
  p.argmax_class = 0;
  for (std::uint32_t c = 1; c < classes_; ++c) {
    if (p.class_sums[c] > p.class_sums[p.argmax_class]) p.argmax_class = c;
  }
  return p;
}

Prediction predict(const TaStateMatrix& model, const BitVec& x) {
  return Inference(model).predict(x);
}

namespace {

class Trainer {
 public:
  Trainer(const BooleanizedDataset& data, const Hyperparams& hp, unsigned workers)
      : data_(data),
        hp_(hp),
        rng_(hp.seed),
        model_(data.class_count, hp.clauses_per_class, data.feature_count, hp.states_per_action),
        masks_(static_cast<std::size_t>(data.class_count) * hp.clauses_per_class,
               BitVec(2 * data.feature_count)),
        pool_(workers == 0 ? 1 : workers) {
    literals_.reserve(data.size());
    for (const BitVec& x : data.samples) literals_.push_back(make_literals(x));
  }

  TaStateMatrix run() {
    std::vector<std::uint32_t> order(data_.size());
    std::iota(order.begin(), order.end(), 0u);
    for (std::uint32_t epoch = 0; epoch < hp_.epochs; ++epoch) {
      shuffle(order, epoch);
      for (std::uint32_t idx : order) train_sample(epoch, idx);
    }
    return std::move(model_);
  }

 private:
  void shuffle(std::vector<std::uint32_t>& order, std::uint32_t epoch) {
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng_.below(epoch, i, kShuffleStream, 0, 0, i + 1));
      std::swap(order[i], order[j]);
    }
  }

  BitVec& mask(std::uint32_t cls, std::uint32_t j) {
    return masks_[static_cast<std::size_t>(cls) * hp_.clauses_per_class + j];
  }

  void train_sample(std::uint32_t epoch, std::uint32_t idx) {
    const BitVec& literals = literals_[idx];
    const std::uint32_t target = data_.labels[idx];
    const std::uint32_t classes = data_.class_count;

    std::uint32_t chosen[2] = {target, target};
    std::uint32_t n_chosen = 1;
    if (classes >= 2) {
      auto pick = static_cast<std::uint32_t>(
          rng_.below(epoch, idx, kNegativePickStream, 0, 0, classes - 1));
      chosen[1] = pick >= target ? pick + 1 : pick;
      n_chosen = 2;
    }

    const std::uint32_t m = hp_.clauses_per_class;
    const std::uint32_t gate_item = 2 * data_.feature_count;  // distinct from literal items

    // Clause outputs and gate probabilities from the pre-update states.
    std::array<std::vector<std::uint8_t>, 2> outs;
    std::array<double, 2> gate_p{};
    for (std::uint32_t k = 0; k < n_chosen; ++k) {
      const std::uint32_t cls = chosen[k];
      outs[k].resize(m);
      std::int32_t sum = 0;
      for (std::uint32_t j = 0; j < m; ++j) {
        const bool out = literals.contains_all(mask(cls, j));
        outs[k][j] = out;
        if (out) sum += clause_polarity(j);
      }
      gate_p[k] = feedback_probability(sum, static_cast<int>(hp_.threshold), k == 0);
    }

    const auto task = [&](std::uint32_t t) {
      const std::uint32_t k = t / m;
      const std::uint32_t j = t % m;
      const std::uint32_t cls = chosen[k];
      if (rng_.unit(epoch, idx, cls, j, gate_item) >= gate_p[k]) return;
      const bool is_target = k == 0;
      const bool out = outs[k][j] != 0;
      if (is_target == (clause_polarity(j) > 0)) {
        type_i_feedback(model_.clause_states(cls, j), out, literals, hp_.states_per_action,
                        hp_.specificity, rng_, epoch, idx, cls, j, &mask(cls, j));
      } else {
        type_ii_feedback(model_.clause_states(cls, j), out, literals, hp_.states_per_action,
                         &mask(cls, j));
      }
    };
    pool_.run(n_chosen * m, task);
  }

  const BooleanizedDataset& data_;
  Hyperparams hp_;
  CounterRng rng_;
  TaStateMatrix model_;
  std::vector<BitVec> masks_;
  std::vector<BitVec> literals_;
  WorkerPool pool_;
};

}  // namespace

TaStateMatrix train(const BooleanizedDataset& data, const Hyperparams& hp, unsigned workers) {
  hp.validate();
  if (data.samples.empty()) throw std::invalid_argument("train: empty dataset");
  if (data.class_count == 0) throw std::invalid_argument("train: class_count is zero");
  for (std::uint16_t l : data.labels) {
    if (l >= data.class_count) throw std::invalid_argument("train: label out of range");
  }
  if (hp.epochs == 0) {
    return TaStateMatrix(data.class_count, hp.clauses_per_class, data.feature_count,
                         hp.states_per_action);
  }
  return Trainer(data, hp, workers).run();
}

double accuracy(const TaStateMatrix& model, const BooleanizedDataset& data, unsigned workers) {
  if (data.samples.empty()) return 0.0;
  const Inference inf(model);
  const unsigned n_threads = std::max(1u, workers);
  std::vector<std::size_t> hits(n_threads, 0);
  auto worker = [&](unsigned t) {
    for (std::size_t i = t; i < data.size(); i += n_threads) {
      if (inf.predict(data.samples[i]).argmax_class == data.labels[i]) ++hits[t];
    }
  };
  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned t = 1; t < n_threads; ++t) threads.emplace_back(worker, t);
    worker(0);
    for (auto& t : threads) t.join();
  }
  std::size_t total = 0;
  for (std::size_t h : hits) total += h;
  return static_cast<double>(total) / static_cast<double>(data.size());
}

}  // namespace tmac
