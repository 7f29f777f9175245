#pragma once

// Deterministic test randomness. Only mt19937_64 raw draws are used (their
// sequence is pinned by the standard); bounded values go through explicit
// modulo so expected values frozen in tests stay stable everywhere.

#include <cstdint>
#include <random>

#include "hecate/bytes.hpp"

namespace testsupport {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t u64() { return gen_(); }
  std::uint64_t below(std::uint64_t n) { return n ? gen_() % n : 0; }
  std::uint64_t range(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  bool chance(double p) { return static_cast<double>(gen_()) < p * 18446744073709551616.0; }

  hecate::Bytes bytes(std::size_t n) {
    hecate::Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(below(256));
    return out;
  }

  hecate::Bytes acgt(std::size_t n) {
    static const char* abc = "ACGT";
    hecate::Bytes out(n);
    std::uint64_t bits = 0;
    int left = 0;
    for (auto& b : out) {
      if (left == 0) {
        bits = gen_();
        left = 32;
      }
      b = static_cast<std::uint8_t>(abc[bits & 3]);
      bits >>= 2;
      --left;
    }
    return out;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace testsupport
