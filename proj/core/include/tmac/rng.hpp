#pragma once

#include <cstdint>

namespace tmac {

// Counter-based random source: every draw is a pure function of
// (seed, epoch, sample, class, clause, item), so results do not depend on
// evaluation order or worker count. Draws may be skipped freely when the
// outcome cannot matter (there is no stream position to preserve).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // splitmix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Base hash for one (epoch, sample, class, clause) feedback event; per-item
  // draws derive from it with one extra mix.
  std::uint64_t event_base(std::uint64_t epoch, std::uint64_t sample,
                           std::uint32_t cls, std::uint32_t clause) const {
    std::uint64_t h = mix(seed_ ^ 0x8a5cd789635d2dffull);
    h = mix(h ^ epoch);
    h = mix(h ^ sample);
    h = mix(h ^ ((static_cast<std::uint64_t>(cls) << 32) | clause));
    return h;
  }

  static std::uint64_t item_bits(std::uint64_t base, std::uint32_t item) {
    return mix(base ^ (0x9e3779b97f4a7c15ull * (item + 1)));
  }

  // Uniform double in [0, 1).
  static double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  double unit(std::uint64_t epoch, std::uint64_t sample, std::uint32_t cls,
              std::uint32_t clause, std::uint32_t item) const {
    return to_unit(item_bits(event_base(epoch, sample, cls, clause), item));
  }

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t epoch, std::uint64_t sample, std::uint32_t cls,
                      std::uint32_t clause, std::uint32_t item, std::uint64_t bound) const {
    return item_bits(event_base(epoch, sample, cls, clause), item) % bound;
  }

 private:
  std::uint64_t seed_;
};

}  // namespace tmac
