#pragma once

// Burrows-Wheeler transform over whole blocks, no sentinel appended: the
// output is the last column of the sorted rotation table plus either the
// primary index alone (small blocks) or a 256-entry auxiliary anchor table
// that lets inversion restart every `stride` text positions.

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <vector>

#include "hecate/bytes.hpp"
#include "hecate/error.hpp"
#include "hecate/parallel.hpp"
#include "hecate/suffix_array.hpp"

namespace hecate {

inline constexpr std::uint64_t kBwtAuxMinBlock = 32 * 1024;
inline constexpr std::uint64_t kBwtMaxBlock = 1ull << 40;
inline constexpr std::uint64_t kCmChunk = 1ull << 24;  // arithmetic-coder chunk size

struct BwtBlock {
  Bytes l;                     // last column
  std::uint64_t n = 0;         // block length
  int sa_width = 32;           // serialized anchor word width (32 or 64)
  std::uint64_t primary = 0;   // row with text position 0
  std::uint64_t stride = 1;    // anchor spacing r
  bool has_aux = false;        // present iff n >= 32 KiB
  std::array<std::uint64_t, 256> aux{};  // rows of text positions j*stride
};

inline std::uint64_t bwt_stride(std::uint64_t n) {
  return std::bit_floor(std::max<std::uint64_t>(1, n / 8));
}

namespace detail {

// Rotation order of a block, computed as the suffix order of the doubled
// text restricted to start positions below n. Equal rotations tie-break by
// descending start index (the shorter doubled-text suffix sorts first).
template <class Index>
std::vector<Index> rotation_order(ByteView t) {
  const std::size_t n = t.size();
  Bytes tt(2 * n);
  std::copy(t.begin(), t.end(), tt.begin());
  std::copy(t.begin(), t.end(), tt.begin() + n);
  std::vector<Index> sa2 = suffix_array<Index>(to_view(tt));
  std::vector<Index> rot(n);
  std::size_t k = 0;
  for (Index p : sa2)
    if (static_cast<std::size_t>(p) < n) rot[k++] = p;
  return rot;
}

template <class Index>
void bwt_fill(ByteView block, BwtBlock& b) {
  const std::uint64_t n = block.size();
  std::vector<Index> rot = rotation_order<Index>(block);
  b.l.resize(n);
  const std::uint64_t r = b.stride;
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t pos = static_cast<std::uint64_t>(rot[i]);
    b.l[i] = block[(pos + n - 1) % n];
    if (pos == 0) b.primary = i;
    if (b.has_aux && pos % r == 0) b.aux[pos / r] = i;
  }
}

// LF mapping as a flat array: lf[i] = C[l[i]] + Occ(l[i], i).
template <class Index>
std::vector<Index> lf_array(ByteView l) {
  std::array<std::uint64_t, 256> cnt{};
  for (std::uint8_t c : l) ++cnt[c];
  std::array<std::uint64_t, 256> occ{};
  std::uint64_t sum = 0;
  for (int c = 0; c < 256; ++c) {
    occ[c] = sum;
    sum += cnt[c];
  }
  std::vector<Index> lf(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) lf[i] = static_cast<Index>(occ[l[i]]++);
  return lf;
}

template <class Index>
Bytes bwt_invert(const BwtBlock& b, unsigned threads) {
  const std::uint64_t n = b.n;
  if (b.l.size() != n) fail(Errc::corrupt_block, "BWT length mismatch");
  if (b.primary >= n) fail(Errc::corrupt_block, "primary index out of range");
  std::vector<Index> lf = lf_array<Index>(to_view(b.l));
  Bytes out(n);

  // Backward LF walk emitting [lo, hi); returns the row the walk ends on.
  auto walk = [&](Bytes& dst, std::uint64_t row, std::uint64_t hi, std::uint64_t lo) {
    for (std::uint64_t pos = hi; pos-- > lo;) {
      dst[pos] = b.l[row];
      row = static_cast<std::uint64_t>(lf[row]);
    }
    return row;
  };

  if (!b.has_aux) {
    walk(out, b.primary, n, 0);
    return out;
  }

  const std::uint64_t r = b.stride;
  const std::uint64_t segs = (n + r - 1) / r;
  if (segs > 256) fail(Errc::corrupt_block, "anchor count exceeds table");
  for (std::uint64_t j = 0; j < segs; ++j)
    if (b.aux[j] >= n) fail(Errc::corrupt_block, "anchor row out of range");
  if (b.aux[0] != b.primary) fail(Errc::corrupt_block, "anchor 0 disagrees with primary");

  // Each segment walk must land on the previous anchor. Fully periodic
  // blocks break that property without being corrupt (the LF orbit folds
  // onto equal rotations), so a mismatch falls back to the primary-only
  // walk and only a byte-level disagreement is an error.
  //
  // Segments walk round-robin within a worker: the independent LF chains
  // overlap their cache misses, which is most of the cost of inversion.
  std::atomic<bool> consistent{true};
  const unsigned lanes_per_worker = threads > 1 ? 4 : static_cast<unsigned>(segs);
  const std::uint64_t groups = (segs + lanes_per_worker - 1) / lanes_per_worker;
  parallel_for(groups, threads, [&](std::size_t g) {
    struct Lane {
      std::uint64_t row, pos, lo, expect;
    };
    std::vector<Lane> lanes;
    for (std::uint64_t j = g * lanes_per_worker;
         j < std::min<std::uint64_t>(segs, (g + 1) * lanes_per_worker); ++j) {
      Lane ln;
      ln.row = b.aux[j];
      ln.pos = j == 0 ? n : j * r;
      ln.lo = j == 0 ? (segs - 1) * r : (j - 1) * r;
      ln.expect = j == 0 ? b.aux[segs - 1] : b.aux[j - 1];
      lanes.push_back(ln);
    }
    bool active = true;
    while (active) {
      active = false;
      for (Lane& ln : lanes) {
        if (ln.pos == ln.lo) continue;
        --ln.pos;
        out[ln.pos] = b.l[ln.row];
        ln.row = static_cast<std::uint64_t>(lf[ln.row]);
        active = true;
      }
    }
    for (const Lane& ln : lanes)
      if (ln.row != ln.expect) consistent.store(false, std::memory_order_relaxed);
  });
  if (!consistent.load()) {
    Bytes plain(n);
    walk(plain, b.primary, n, 0);
    if (plain != out) fail(Errc::corrupt_block, "anchor table inconsistent with counts");
  }
  return out;
}

}  // namespace detail

inline BwtBlock bwt_forward(ByteView block) {
  const std::uint64_t n = block.size();
  if (n == 0) fail(Errc::invalid_config, "empty BWT block");
  if (n > kBwtMaxBlock) fail(Errc::block_too_large, "block exceeds 2^40 bytes");
  BwtBlock b;
  b.n = n;
  b.sa_width = sa_width_for(n);
  b.stride = bwt_stride(n);
  b.has_aux = n >= kBwtAuxMinBlock;
  // The doubled text needs 2n+1 indices, so the 32-bit construction path
  // covers n < 2^30; serialized width still depends on n alone.
  if (2 * n + 1 < (1ull << 31))
    detail::bwt_fill<std::int32_t>(block, b);
  else
    detail::bwt_fill<std::int64_t>(block, b);
  return b;
}

inline Bytes bwt_inverse(const BwtBlock& b, unsigned threads = 1) {
  if (b.n == 0) fail(Errc::corrupt_block, "empty BWT block");
  if (b.n < (1ull << 31)) return detail::bwt_invert<std::int32_t>(b, threads);
  return detail::bwt_invert<std::int64_t>(b, threads);
}

// Inversion ignoring the anchor table; used to cross-check aux inversion.
inline Bytes bwt_inverse_primary_only(const BwtBlock& b) {
  BwtBlock plain;
  plain.l = b.l;
  plain.n = b.n;
  plain.primary = b.primary;
  plain.has_aux = false;
  return bwt_inverse(plain);
}

// --- serialized block metadata ---
//
// Aux-bearing form (n >= 32 KiB), MSB-first bit layout:
//   8  bits  version/flags: [version:4][aux:1][w64:1][reserved:2]
//   16 bits  stride exponent
//   64 bits  n
//   256*w    anchor table (unused entries zero)
//   64*ceil(n/2^24) bits  per-chunk compressed sizes
// Small-block form drops the anchor table and reuses the 16-bit field for
// the primary index (primary < n < 2^15 always fits).

inline std::uint64_t meta_bits(std::uint64_t n, int w, bool with_aux = true) {
  std::uint64_t chunks = (n + kCmChunk - 1) / kCmChunk;
  if (chunks == 0) chunks = 1;
  std::uint64_t bits = 8 + 16 + 64 + 64 * chunks;
  if (with_aux) bits += 256 * static_cast<std::uint64_t>(w);
  return bits;
}

inline Bytes serialize_bwt_meta(const BwtBlock& b, const std::vector<std::uint64_t>& chunk_sizes) {
  BitWriter bw;
  std::uint8_t vf = 1;  // version
  if (b.has_aux) vf |= 0x10;
  if (b.sa_width == 64) vf |= 0x20;
  bw.put(vf, 8);
  if (b.has_aux)
    bw.put(static_cast<std::uint64_t>(std::countr_zero(b.stride)), 16);
  else
    bw.put(b.primary, 16);
  bw.put(b.n, 64);
  if (b.has_aux)
    for (int j = 0; j < 256; ++j) bw.put(b.aux[j], b.sa_width);
  for (std::uint64_t s : chunk_sizes) bw.put(s, 64);
  return bw.finish();
}

struct BwtMeta {
  BwtBlock block;  // l left empty; structural fields only
  std::vector<std::uint64_t> chunk_sizes;
  std::size_t meta_bytes = 0;
};

inline BwtMeta parse_bwt_meta(ByteView payload) {
  BitReader br(payload, Errc::corrupt_block);
  BwtMeta m;
  std::uint8_t vf = static_cast<std::uint8_t>(br.get(8));
  if ((vf & 0x0f) != 1) fail(Errc::corrupt_block, "unsupported BWT metadata version");
  m.block.has_aux = (vf & 0x10) != 0;
  m.block.sa_width = (vf & 0x20) ? 64 : 32;
  std::uint64_t field16 = br.get(16);
  m.block.n = br.get(64);
  if (m.block.has_aux) {
    if (field16 > 40) fail(Errc::corrupt_block, "stride exponent out of range");
    m.block.stride = 1ull << field16;
    for (int j = 0; j < 256; ++j) m.block.aux[j] = br.get(m.block.sa_width);
    m.block.primary = m.block.aux[0];
  } else {
    m.block.primary = field16;
    m.block.stride = bwt_stride(m.block.n);
  }
  std::uint64_t chunks = (m.block.n + kCmChunk - 1) / kCmChunk;
  if (chunks == 0) chunks = 1;
  for (std::uint64_t k = 0; k < chunks; ++k) m.chunk_sizes.push_back(br.get(64));
  m.meta_bytes = br.byte_pos();
  return m;
}

}  // namespace hecate
