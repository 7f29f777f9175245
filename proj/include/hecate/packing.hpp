#pragma once

// Nucleotide bit-packing: 2-bit ACGT or 4-bit IUPAC codes, MSB-first within
// each byte, with an exact side channel (EXTRA) of delta-coded positions for
// out-of-alphabet bytes. Exception slots carry placeholder code 0.

#include <cstdint>

#include "hecate/bytes.hpp"
#include "hecate/error.hpp"
#include "hecate/fastx.hpp"

namespace hecate {

inline constexpr char kIupac16[16] = {'A', 'C', 'G', 'T', 'N', 'R', 'Y', 'S',
                                      'W', 'K', 'M', 'B', 'D', 'H', 'V', 'U'};

inline int iupac4_code(std::uint8_t c) { return detail::iupac4_table()[c]; }
inline int acgt_code(std::uint8_t c) {
  int v = iupac4_code(c);
  return v < 4 ? v : -1;
}

struct PackedNuc {
  std::uint8_t width_bits = 2;  // 2 or 4
  Bytes payload;                // ceil(n_symbols * width_bits / 8) bytes, MSB-first
  std::uint64_t n_symbols = 0;
  Bytes extra;  // (varint position delta, raw byte) pairs; first delta is absolute
};

inline PackedNuc pack(ByteView nuc, int width_bits) {
  if (width_bits != 2 && width_bits != 4) fail(Errc::invalid_config, "pack width must be 2 or 4");
  PackedNuc p;
  p.width_bits = static_cast<std::uint8_t>(width_bits);
  p.n_symbols = nuc.size();
  p.payload.assign((nuc.size() * width_bits + 7) / 8, 0);

  std::uint64_t prev_pos = 0;
  bool first = true;
  for (std::uint64_t i = 0; i < nuc.size(); ++i) {
    int code = width_bits == 2 ? acgt_code(nuc[i]) : iupac4_code(nuc[i]);
    if (code < 0) {
      put_varint(p.extra, first ? i : i - prev_pos);
      p.extra.push_back(nuc[i]);
      prev_pos = i;
      first = false;
      code = 0;  // placeholder; overwritten from extra on unpack
    }
    if (width_bits == 2)
      p.payload[i >> 2] |= static_cast<std::uint8_t>(code << (6 - 2 * (i & 3)));
    else
      p.payload[i >> 1] |= static_cast<std::uint8_t>(code << (4 - 4 * (i & 1)));
  }
  return p;
}

inline int packed_code_at(const PackedNuc& p, std::uint64_t i) {
  if (p.width_bits == 2) return (p.payload[i >> 2] >> (6 - 2 * (i & 3))) & 3;
  return (p.payload[i >> 1] >> (4 - 4 * (i & 1))) & 15;
}

inline Bytes unpack(const PackedNuc& p) {
  if (p.payload.size() != (p.n_symbols * p.width_bits + 7) / 8)
    fail(Errc::corrupt_extra, "payload size disagrees with symbol count");
  Bytes out(p.n_symbols, 0);
  for (std::uint64_t i = 0; i < p.n_symbols; ++i)
    out[i] = static_cast<std::uint8_t>(kIupac16[packed_code_at(p, i)]);

  ByteReader rd(to_view(p.extra), Errc::corrupt_extra);
  std::uint64_t pos = 0;
  bool first = true;
  while (!rd.empty()) {
    std::uint64_t d = rd.varint();
    pos = first ? d : pos + d;
    if (!first && d == 0) fail(Errc::corrupt_extra, "extra positions not increasing");
    first = false;
    if (pos >= p.n_symbols) fail(Errc::corrupt_extra, "extra position beyond symbol count");
    out[pos] = rd.u8();
  }
  return out;
}

enum class WidthChoice : std::uint8_t { none = 0, pack2 = 2, pack4 = 4 };

// A width is worth it when the exception fraction satisfies e/n < (8-k)/40,
// i.e. below 15% non-ACGT for 2-bit and below 10% non-IUPAC for 4-bit.
inline WidthChoice choose_width(ByteView nuc) {
  if (nuc.empty()) return WidthChoice::pack2;
  std::uint64_t e2 = 0, e4 = 0;
  for (std::uint8_t c : nuc) {
    int v = iupac4_code(c);
    if (v < 0) {
      ++e2;
      ++e4;
    } else if (v >= 4) {
      ++e2;
    }
  }
  const std::uint64_t n = nuc.size();
  if (e2 * 40 < n * 6) return WidthChoice::pack2;
  if (e4 * 40 < n * 4) return WidthChoice::pack4;
  return WidthChoice::none;
}

}  // namespace hecate
