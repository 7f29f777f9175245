#pragma once

// Post-BWT context-mixing codec. Each byte is coded MSB-first through a
// depth-8 binary context tree; the bit probability blends three 16-bit
// counter families (order-0, previous byte, byte before that -- the last two
// share one table) at fixed weights 6:6:4 over 16, then runs through a
// run-conditioned SSE grid interpolated at the quantized base prediction.
// Counters move by asymmetric exponential steps U_tau with tau = 3/5/7.

#include <cstdint>
#include <vector>

#include "hecate/bwt.hpp"
#include "hecate/bytes.hpp"
#include "hecate/coder.hpp"
#include "hecate/error.hpp"
#include "hecate/parallel.hpp"

namespace hecate {

inline std::uint16_t ema_update(std::uint16_t v, int bit, int tau) {
  if (bit) return static_cast<std::uint16_t>(v + ((65535 - v) >> tau));
  return static_cast<std::uint16_t>(v - (v >> tau));
}

struct CmPrediction {
  std::uint32_t p_hat = 0;  // blended base prediction, [0, 65535]
  std::uint32_t q17 = 0;    // final split probability numerator over 2^17
  int j = 0;                // SSE grid column
};

class CmState {
 public:
  CmState()
      : u0_(256, 32768), u12_(256 * 256, 32768), sse_(512 * 17) {
    for (int row = 0; row < 512; ++row)
      for (int j = 0; j <= 16; ++j)
        sse_[row * 17 + j] = static_cast<std::uint16_t>(std::min(j << 12, 65535));
  }

  CmPrediction predict() const {
    const std::uint32_t p0 = u0_[ctx_];
    const std::uint32_t p1 = u12_[prev_ * 256 + ctx_];
    const std::uint32_t p2 = u12_[prev2_ * 256 + ctx_];
    CmPrediction pr;
    pr.p_hat = (6 * (p0 + p1) + 4 * p2) / 16;
    pr.j = static_cast<int>(pr.p_hat >> 12);
    const std::uint16_t* row = sse_row(ctx_, run_flag_);
    const std::int32_t s0 = row[pr.j], s1 = row[pr.j + 1];
    const std::int32_t frac = static_cast<std::int32_t>(pr.p_hat & 4095);
    const std::int32_t shat = s0 + (((s1 - s0) * frac) >> 12);
    std::int32_t q = static_cast<std::int32_t>(pr.p_hat) + shat;
    if (q < 1) q = 1;
    if (q > static_cast<std::int32_t>(kProbOne - 1)) q = kProbOne - 1;
    pr.q17 = static_cast<std::uint32_t>(q);
    return pr;
  }

  // Applies counter updates and advances the bit context. Returns the
  // completed byte when this was the 8th bit of a byte, else -1.
  int update(const CmPrediction& pr, int bit) {
    std::uint16_t& e0 = u0_[ctx_];
    e0 = ema_update(e0, bit, 3);
    std::uint16_t& e1 = u12_[prev_ * 256 + ctx_];
    e1 = ema_update(e1, bit, 5);
    std::uint16_t& e2 = u12_[prev2_ * 256 + ctx_];  // same entry twice when prev==prev2
    e2 = ema_update(e2, bit, 5);
    std::uint16_t* row = sse_row(ctx_, run_flag_);
    row[pr.j] = ema_update(row[pr.j], bit, 7);
    row[pr.j + 1] = ema_update(row[pr.j + 1], bit, 7);

    ctx_ = 2 * ctx_ + static_cast<std::uint32_t>(bit);
    if (ctx_ < 256) return -1;
    const std::uint8_t byte = static_cast<std::uint8_t>(ctx_ & 255);
    run_len_ = (byte == prev_) ? run_len_ + 1 : 1;
    run_flag_ = run_len_ > 2 ? 1 : 0;
    prev2_ = prev_;
    prev_ = byte;
    ctx_ = 1;
    return byte;
  }

  std::uint32_t bit_context() const { return ctx_; }
  int run_flag() const { return run_flag_; }
  std::uint64_t run_length() const { return run_len_; }

  // Test hooks: direct counter access.
  std::uint16_t& u0(std::uint32_t c) { return u0_[c]; }
  std::uint16_t& u12(std::uint8_t byte, std::uint32_t c) { return u12_[byte * 256 + c]; }
  const std::uint16_t* sse_row(std::uint32_t c, int f) const { return &sse_[(2 * c + f) * 17]; }
  std::uint16_t* sse_row(std::uint32_t c, int f) { return &sse_[(2 * c + f) * 17]; }

 private:
  std::vector<std::uint16_t> u0_, u12_, sse_;
  std::uint8_t prev_ = 0, prev2_ = 0;
  std::uint32_t ctx_ = 1;      // 1..255 at prediction time
  std::uint64_t run_len_ = 0;  // completed-byte run length
  int run_flag_ = 0;
};

inline Bytes cm_encode_chunk(ByteView data) {
  CmState st;
  BinEncoder enc;
  for (std::uint8_t byte : data) {
    for (int k = 7; k >= 0; --k) {
      const int bit = (byte >> k) & 1;
      CmPrediction pr = st.predict();
      enc.encode(bit, pr.q17);
      st.update(pr, bit);
    }
  }
  return enc.finish();
}

inline Bytes cm_decode_chunk(ByteView payload, std::size_t n) {
  CmState st;
  BinDecoder dec(payload);
  Bytes out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    int byte = -1;
    for (int k = 0; k < 8; ++k) {
      CmPrediction pr = st.predict();
      int bit = dec.decode(pr.q17);
      byte = st.update(pr, bit);
    }
    out.push_back(static_cast<std::uint8_t>(byte));
  }
  return out;
}

// --- chunked coding of one BWT output block ---
// The block is cut into independent 2^24-byte chunks, each coded with a
// fresh CmState and its own coder, so decode can run chunk-parallel.

struct CmChunked {
  std::vector<std::uint64_t> sizes;  // compressed bytes per chunk
  Bytes payload;                     // concatenated chunk payloads
};

inline CmChunked cm_encode_block(ByteView l, unsigned threads = 1) {
  const std::uint64_t n = l.size();
  std::uint64_t chunks = (n + kCmChunk - 1) / kCmChunk;
  if (chunks == 0) chunks = 1;
  std::vector<Bytes> enc(chunks);
  parallel_for(chunks, threads, [&](std::size_t k) {
    const std::uint64_t off = k * kCmChunk;
    const std::uint64_t len = std::min<std::uint64_t>(kCmChunk, n - off);
    enc[k] = cm_encode_chunk(l.subspan(off, len));
  });
  CmChunked out;
  for (const Bytes& e : enc) {
    out.sizes.push_back(e.size());
    out.payload.insert(out.payload.end(), e.begin(), e.end());
  }
  return out;
}

inline Bytes cm_decode_block(const std::vector<std::uint64_t>& sizes, ByteView payload,
                             std::uint64_t n, unsigned threads = 1) {
  std::uint64_t expect = (n + kCmChunk - 1) / kCmChunk;
  if (expect == 0) expect = 1;
  if (sizes.size() != expect) fail(Errc::chunk_size_mismatch, "chunk table length mismatch");
  std::uint64_t total = 0;
  for (std::uint64_t s : sizes) total += s;
  if (total > payload.size()) fail(Errc::chunk_size_mismatch, "payload shorter than chunk table");

  std::vector<std::uint64_t> offs(sizes.size(), 0);
  for (std::size_t k = 1; k < sizes.size(); ++k) offs[k] = offs[k - 1] + sizes[k - 1];
  Bytes out(n);
  parallel_for(sizes.size(), threads, [&](std::size_t k) {
    const std::uint64_t off = k * kCmChunk;
    const std::uint64_t len = std::min<std::uint64_t>(kCmChunk, n - off);
    Bytes piece = cm_decode_chunk(payload.subspan(offs[k], sizes[k]), len);
    std::copy(piece.begin(), piece.end(), out.begin() + off);
  });
  return out;
}

// --- whole-block codec: BWT + metadata + chunked payload ---

inline Bytes bwtcm_compress(ByteView raw, unsigned threads = 1) {
  BwtBlock b = bwt_forward(raw);
  CmChunked ch = cm_encode_block(to_view(b.l), threads);
  Bytes out = serialize_bwt_meta(b, ch.sizes);
  out.insert(out.end(), ch.payload.begin(), ch.payload.end());
  return out;
}

inline Bytes bwtcm_decompress(ByteView payload, unsigned threads = 1) {
  BwtMeta m = parse_bwt_meta(payload);
  m.block.l = cm_decode_block(m.chunk_sizes, payload.subspan(m.meta_bytes), m.block.n, threads);
  return bwt_inverse(m.block, threads);
}

}  // namespace hecate
