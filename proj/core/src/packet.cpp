#include "tmac/packet.hpp"

#include <stdexcept>

namespace tmac {

PacketPlan plan_packets(std::uint32_t feature_count, std::uint32_t bandwidth) {
  if (feature_count < 1 || bandwidth < 1) {
    throw std::invalid_argument("plan_packets: feature count and bandwidth must be >= 1");
  }
  PacketPlan plan;
  plan.bandwidth = bandwidth;
  plan.feature_count = feature_count;
  plan.packet_count = (feature_count + bandwidth - 1) / bandwidth;
  plan.pad_bits = plan.packet_count * bandwidth - feature_count;
  return plan;
}

std::vector<BitVec> packetize(const BitVec& x, const PacketPlan& plan) {
  if (x.size() != plan.feature_count) {
    throw std::invalid_argument("packetize: input length does not match the plan");
  }
  std::vector<BitVec> words;
  words.reserve(plan.packet_count);
  for (std::uint32_t p = 0; p < plan.packet_count; ++p) {
    BitVec word(plan.bandwidth);
    const auto [lo, hi] = plan.feature_range(p);
    for (std::uint32_t f = lo; f < hi; f += 64) {
      const unsigned n = static_cast<unsigned>(std::min<std::uint32_t>(64, hi - f));
      word.deposit(f - lo, n, x.extract(f, n));
    }
    words.push_back(std::move(word));
  }
  return words;
}

BitVec depacketize(const std::vector<BitVec>& words, const PacketPlan& plan) {
  if (words.size() != plan.packet_count) {
    throw std::invalid_argument("depacketize: word count does not match the plan");
  }
  BitVec x(plan.feature_count);
  for (std::uint32_t p = 0; p < plan.packet_count; ++p) {
    if (words[p].size() != plan.bandwidth) {
      throw std::invalid_argument("depacketize: word width does not match the plan");
    }
    const auto [lo, hi] = plan.feature_range(p);
    for (std::uint32_t f = lo; f < hi; f += 64) {
      const unsigned n = static_cast<unsigned>(std::min<std::uint32_t>(64, hi - f));
      x.deposit(f, n, words[p].extract(f - lo, n));
    }
  }
  return x;
}

}  // namespace tmac
