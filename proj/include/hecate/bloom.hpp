#pragma once

// Bloom filter over fixed-length grams. Double hashing from one 64-bit
// mix; inserts are exact, so membership tests can never report a false
// negative.

#include <cstdint>
#include <vector>

#include "hecate/bytes.hpp"

namespace hecate {

class BloomFilter {
 public:
  BloomFilter(std::uint64_t expected_elements, int bits_per_element = 10, int probes = 7)
      : probes_(probes) {
    std::uint64_t bits = std::max<std::uint64_t>(64, expected_elements * static_cast<std::uint64_t>(bits_per_element));
    mask_ = std::uint64_t(1);
    while (mask_ < bits) mask_ <<= 1;
    words_.assign(mask_ / 64, 0);
    --mask_;
  }

  void insert(std::uint64_t key) {
    std::uint64_t h1 = mix64(key);
    std::uint64_t h2 = mix64(key ^ 0xa5a5a5a5a5a5a5a5ull) | 1;
    for (int i = 0; i < probes_; ++i) {
      std::uint64_t b = (h1 + static_cast<std::uint64_t>(i) * h2) & mask_;
      words_[b >> 6] |= 1ull << (b & 63);
    }
  }

  bool maybe_contains(std::uint64_t key) const {
    std::uint64_t h1 = mix64(key);
    std::uint64_t h2 = mix64(key ^ 0xa5a5a5a5a5a5a5a5ull) | 1;
    for (int i = 0; i < probes_; ++i) {
      std::uint64_t b = (h1 + static_cast<std::uint64_t>(i) * h2) & mask_;
      if (!(words_[b >> 6] & (1ull << (b & 63)))) return false;
    }
    return true;
  }

 private:
  std::vector<std::uint64_t> words_;
  std::uint64_t mask_ = 0;
  int probes_;
};

inline std::uint64_t gram_key(ByteView data, std::size_t pos, std::size_t q) {
  return fnv1a64(data.subspan(pos, q));
}

}  // namespace hecate
