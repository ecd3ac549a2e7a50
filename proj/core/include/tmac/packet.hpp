#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tmac/bitvec.hpp"

namespace tmac {

// Bandwidth-driven split of an F-bit datapoint into P = ceil(F / W) words of
// W bits. Feature i maps to bit (i mod W) of word (i / W); the pad bits at
// the top of the last word are always zero.
struct PacketPlan {
  std::uint32_t bandwidth = 0;     // W
  std::uint32_t feature_count = 0; // F
  std::uint32_t packet_count = 0;  // P
  std::uint32_t pad_bits = 0;      // P*W - F

  // Half-open feature interval carried by packet p.
  std::pair<std::uint32_t, std::uint32_t> feature_range(std::uint32_t p) const {
    const std::uint32_t lo = p * bandwidth;
    const std::uint32_t hi = std::min((p + 1) * bandwidth, feature_count);
    return {lo, hi};
  }
};

PacketPlan plan_packets(std::uint32_t feature_count, std::uint32_t bandwidth);

std::vector<BitVec> packetize(const BitVec& x, const PacketPlan& plan);
BitVec depacketize(const std::vector<BitVec>& words, const PacketPlan& plan);

}  // namespace tmac
