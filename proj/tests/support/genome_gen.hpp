#pragma once

// Assembly-like synthetic genome: an order-4 Markov base composition with
// planted mutated repeat families, N gaps, soft-masked (lowercase) runs and
// FASTA wrapping. Used where a realistic single-chromosome input is needed.

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>

#include "hecate/bytes.hpp"
#include "support/rng.hpp"

namespace testsupport {

inline hecate::Bytes synthetic_chromosome(Rng& rng, std::size_t length) {
  static const char* acgt = "ACGT";
  std::array<std::array<std::uint32_t, 4>, 256> weight{};
  for (auto& row : weight) {
    std::uint32_t preferred = static_cast<std::uint32_t>(rng.below(4));
    for (std::uint32_t s = 0; s < 4; ++s) row[s] = 100;
    row[preferred] = 100 + static_cast<std::uint32_t>(rng.below(500));
  }

  hecate::Bytes seq;
  seq.reserve(length);
  std::uint32_t ctx = 0;
  auto emit = [&](std::uint8_t base_code) {
    seq.push_back(static_cast<std::uint8_t>(acgt[base_code]));
    ctx = ((ctx << 2) | base_code) & 255;
  };

  while (seq.size() < length) {
    if (seq.size() > 60000 && rng.chance(2e-5)) {
      // Mutated copy of an earlier segment.
      std::size_t len = 200 + rng.below(20000);
      len = std::min(len, length - seq.size() + 1);
      std::size_t src = rng.below(seq.size() - len);
      for (std::size_t i = 0; i < len && seq.size() < length; ++i) {
        std::uint8_t c = seq[src + i];
        std::uint8_t code = c == 'A' ? 0 : c == 'C' ? 1 : c == 'G' ? 2 : 3;
        if (rng.chance(0.01)) code = static_cast<std::uint8_t>(rng.below(4));
        emit(code);
      }
      continue;
    }
    const auto& row = weight[ctx];
    std::uint32_t total = row[0] + row[1] + row[2] + row[3];
    std::uint32_t pick = static_cast<std::uint32_t>(rng.below(total));
    std::uint8_t code = 0;
    while (pick >= row[code]) {
      pick -= row[code];
      ++code;
    }
    emit(code);
  }

  // Assembly gaps.
  std::size_t gaps = 3 + rng.below(4);
  for (std::size_t g = 0; g < gaps; ++g) {
    std::size_t at = rng.below(seq.size());
    std::size_t len = 50 + rng.below(2000);
    for (std::size_t i = 0; i < len && at + i < seq.size(); ++i) seq[at + i] = 'N';
  }

  // Soft-masked runs, roughly a tenth of the sequence.
  std::size_t masked = 0;
  while (masked < seq.size() / 10) {
    std::size_t at = rng.below(seq.size());
    std::size_t len = 500 + rng.below(5000);
    for (std::size_t i = 0; i < len && at + i < seq.size(); ++i) {
      std::uint8_t& c = seq[at + i];
      if (c >= 'A' && c <= 'Z') c += 32;
    }
    masked += len;
  }
  return seq;
}

inline hecate::Bytes wrap_fasta(const std::string& header, hecate::ByteView seq,
                                std::size_t width = 80) {
  hecate::Bytes out;
  out.push_back('>');
  out.insert(out.end(), header.begin(), header.end());
  out.push_back('\n');
  for (std::size_t i = 0; i < seq.size(); i += width) {
    std::size_t e = std::min(seq.size(), i + width);
    out.insert(out.end(), seq.begin() + i, seq.begin() + e);
    out.push_back('\n');
  }
  return out;
}

inline hecate::Bytes synthetic_assembly_fasta(std::uint64_t seed, std::size_t length) {
  Rng rng(seed);
  hecate::Bytes seq = synthetic_chromosome(rng, length);
  return wrap_fasta("chr1 synthetic assembly", hecate::to_view(seq));
}

}  // namespace testsupport
