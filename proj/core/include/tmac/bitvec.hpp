#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace tmac {

// Fixed-size bit vector backed by 64-bit words. Bit i lives at bit (i % 64)
// of word (i / 64); bits past size() are kept zero so whole-word compares
// and popcounts stay valid.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t nbits, bool fill = false)
      : nbits_(nbits), words_((nbits + 63) / 64, fill ? ~0ull : 0ull) {
    trim();
  }

  // Parses a binary numeral (MSB on the left), so "1011" has bit 0 == 1,
  // bit 1 == 1, bit 2 == 0, bit 3 == 1.
  static BitVec from_numeral(std::string_view digits) {
    BitVec v(digits.size());
    for (std::size_t i = 0; i < digits.size(); ++i) {
      v.set(digits.size() - 1 - i, digits[i] == '1');
    }
    return v;
  }

  std::size_t size() const { return nbits_; }
  bool empty() const { return nbits_ == 0; }

  bool get(std::size_t i) const {
    assert(i < nbits_);
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i, bool value = true) {
    assert(i < nbits_);
    const std::uint64_t mask = 1ull << (i & 63);
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
  }
  bool none() const {
    for (std::uint64_t w : words_) {
      if (w) return false;
    }
    return true;
  }

  std::size_t word_count() const { return words_.size(); }
  std::uint64_t word(std::size_t w) const { return words_[w]; }
  void set_word(std::size_t w, std::uint64_t value) {
    words_[w] = value;
    if (w + 1 == words_.size()) trim();
  }

  // Bits [pos, pos + n) as an integer, n <= 64. Reads past size() yield zeros.
  std::uint64_t extract(std::size_t pos, unsigned n) const {
    assert(n <= 64);
    if (n == 0) return 0;
    const std::size_t w = pos >> 6;
    const unsigned off = static_cast<unsigned>(pos & 63);
    std::uint64_t lo = w < words_.size() ? words_[w] >> off : 0;
    if (off + n > 64 && w + 1 < words_.size()) {
      lo |= words_[w + 1] << (64 - off);
    }
    return n == 64 ? lo : lo & ((1ull << n) - 1);
  }

  // Copies the n low bits of value into [pos, pos + n).
  void deposit(std::size_t pos, unsigned n, std::uint64_t value) {
    for (unsigned i = 0; i < n; ++i) set(pos + i, (value >> i) & 1u);
  }

  // True iff every bit of mask is also set here: (*this & mask) == mask.
  bool contains_all(const BitVec& mask) const {
    assert(mask.words_.size() <= words_.size());
    for (std::size_t w = 0; w < mask.words_.size(); ++w) {
      if ((words_[w] & mask.words_[w]) != mask.words_[w]) return false;
    }
    return true;
  }
  // Same check restricted to words [wlo, whi).
  bool contains_all_in(const BitVec& mask, std::size_t wlo, std::size_t whi) const {
    for (std::size_t w = wlo; w < whi && w < mask.words_.size(); ++w) {
      if ((words_[w] & mask.words_[w]) != mask.words_[w]) return false;
    }
    return true;
  }

  bool intersects(const BitVec& other) const {
    const std::size_t n = std::min(words_.size(), other.words_.size());
    for (std::size_t w = 0; w < n; ++w) {
      if (words_[w] & other.words_[w]) return true;
    }
    return false;
  }

  void and_with(const BitVec& other) {
    assert(other.nbits_ == nbits_);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
  }
  void or_with(const BitVec& other) {
    assert(other.nbits_ == nbits_);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
  }
  void fill(bool value) {
    for (auto& w : words_) w = value ? ~0ull : 0ull;
    trim();
  }

  friend bool operator==(const BitVec& a, const BitVec& b) {
    return a.nbits_ == b.nbits_ && a.words_ == b.words_;
  }

 private:
  void trim() {
    if (nbits_ & 63) {
      if (!words_.empty()) words_.back() &= (1ull << (nbits_ & 63)) - 1;
    }
  }

  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace tmac
