#pragma once

// Entropy primitives shared by the codecs:
//  - BinEncoder/BinDecoder: binary arithmetic coder, 17-bit probabilities,
//    64-bit low with byte-wise carry propagation, renormalized so the range
//    stays >= 2^24 before every split. Flush emits 5 tail bytes.
//  - RangeEncoder/RangeDecoder: carryless multi-symbol range coder over
//    cumulative frequency tables with total <= 2^16. Flush emits 4 bytes.
//  - quality_compress/decompress: order-1 adaptive byte coder.

#include <array>
#include <cstdint>

#include "hecate/bytes.hpp"
#include "hecate/error.hpp"

namespace hecate {

inline constexpr std::uint32_t kProbBits = 17;
inline constexpr std::uint32_t kProbOne = 1u << kProbBits;
inline constexpr std::uint32_t kRcTop = 1u << 24;
inline constexpr std::uint32_t kRcBot = 1u << 16;

class BinEncoder {
 public:
  // q17/2^17 is the probability of bit==1; q17 in [1, 2^17-1].
  void encode(int bit, std::uint32_t q17) {
    std::uint32_t r1 = static_cast<std::uint32_t>(
        (static_cast<std::uint64_t>(range_) * q17) >> kProbBits);
    if (bit) {
      range_ = r1;
    } else {
      low_ += r1;
      range_ -= r1;
    }
    while (range_ < kRcTop) {
      shift_low();
      range_ <<= 8;
    }
  }

  Bytes finish() {
    for (int i = 0; i < 5; ++i) shift_low();
    return std::move(out_);
  }

 private:
  void shift_low() {
    if (static_cast<std::uint32_t>(low_) < 0xff000000u || (low_ >> 32) != 0) {
      std::uint8_t carry = static_cast<std::uint8_t>(low_ >> 32);
      out_.push_back(static_cast<std::uint8_t>(cache_ + carry));
      while (pending_ > 0) {
        out_.push_back(static_cast<std::uint8_t>(0xff + carry));
        --pending_;
      }
      cache_ = static_cast<std::uint8_t>(low_ >> 24);
    } else {
      ++pending_;
    }
    low_ = (low_ & 0x00ffffffull) << 8;
  }

  Bytes out_;
  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xffffffffu;
  std::uint8_t cache_ = 0;
  std::uint64_t pending_ = 0;
};

class BinDecoder {
 public:
  explicit BinDecoder(ByteView in) : in_(in) {
    for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | next_byte();
  }

  int decode(std::uint32_t q17) {
    std::uint32_t r1 = static_cast<std::uint32_t>(
        (static_cast<std::uint64_t>(range_) * q17) >> kProbBits);
    int bit = code_ < r1;
    if (bit)
      range_ = r1;
    else {
      code_ -= r1;
      range_ -= r1;
    }
    while (range_ < kRcTop) {
      code_ = (code_ << 8) | next_byte();
      range_ <<= 8;
    }
    return bit;
  }

  std::size_t consumed() const { return pos_; }

 private:
  std::uint8_t next_byte() { return pos_ < in_.size() ? in_[pos_++] : 0; }

  ByteView in_;
  std::size_t pos_ = 0;
  std::uint32_t range_ = 0xffffffffu;
  std::uint32_t code_ = 0;
};

// Carryless range coder (low/range with forced-shrink underflow handling).
// Encoder and decoder renormalize identically, so any adaptive frequency
// schedule reproduced on both sides round-trips exactly.
class RangeEncoder {
 public:
  void encode(std::uint32_t cum_lo, std::uint32_t cum_hi, std::uint32_t total) {
    std::uint32_t r = range_ / total;
    low_ += r * cum_lo;
    range_ = (cum_hi == total) ? range_ - r * cum_lo : r * (cum_hi - cum_lo);
    normalize();
  }

  Bytes finish() {
    for (int i = 0; i < 4; ++i) {
      out_.push_back(static_cast<std::uint8_t>(low_ >> 24));
      low_ <<= 8;
    }
    return std::move(out_);
  }

 private:
  void normalize() {
    while ((low_ ^ (low_ + range_)) < kRcTop ||
           (range_ < kRcBot && ((range_ = (0 - low_) & (kRcBot - 1)), true))) {
      out_.push_back(static_cast<std::uint8_t>(low_ >> 24));
      low_ <<= 8;
      range_ <<= 8;
    }
  }

  Bytes out_;
  std::uint32_t low_ = 0;
  std::uint32_t range_ = 0xffffffffu;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(ByteView in) : in_(in) {
    for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
  }

  // Returns a value in [0, total); the caller locates the symbol whose
  // cumulative interval contains it and then calls consume().
  std::uint32_t decode_target(std::uint32_t total) {
    r_ = range_ / total;
    std::uint32_t t = (code_ - low_) / r_;
    return t < total ? t : total - 1;
  }

  void consume(std::uint32_t cum_lo, std::uint32_t cum_hi, std::uint32_t total) {
    low_ += r_ * cum_lo;
    range_ = (cum_hi == total) ? range_ - r_ * cum_lo : r_ * (cum_hi - cum_lo);
    while ((low_ ^ (low_ + range_)) < kRcTop ||
           (range_ < kRcBot && ((range_ = (0 - low_) & (kRcBot - 1)), true))) {
      code_ = (code_ << 8) | next_byte();
      low_ <<= 8;
      range_ <<= 8;
    }
  }

  std::size_t consumed() const { return pos_; }

 private:
  std::uint8_t next_byte() { return pos_ < in_.size() ? in_[pos_++] : 0; }

  ByteView in_;
  std::size_t pos_ = 0;
  std::uint32_t low_ = 0;
  std::uint32_t range_ = 0xffffffffu;
  std::uint32_t code_ = 0;
  std::uint32_t r_ = 1;
};

// Adaptive frequency table over a small alphabet. Increment and rescale
// bounds keep the total within the range coder's 2^16 contract.
template <int N>
class AdaptiveModel {
 public:
  explicit AdaptiveModel(std::uint32_t increment = 32, std::uint32_t limit = kRcBot - 32)
      : inc_(increment), limit_(limit) {
    freq_.fill(1);
    total_ = N;
  }

  void encode(RangeEncoder& rc, int sym) const {
    std::uint32_t lo = 0;
    for (int i = 0; i < sym; ++i) lo += freq_[i];
    rc.encode(lo, lo + freq_[sym], total_);
  }

  int decode(RangeDecoder& rc) const {
    std::uint32_t target = rc.decode_target(total_);
    std::uint32_t lo = 0;
    int sym = 0;
    while (lo + freq_[sym] <= target) lo += freq_[sym++];
    rc.consume(lo, lo + freq_[sym], total_);
    return sym;
  }

  void update(int sym) {
    freq_[sym] += inc_;
    total_ += inc_;
    if (total_ > limit_) {
      total_ = 0;
      for (auto& f : freq_) {
        f = (f + 1) >> 1;
        total_ += f;
      }
    }
  }

  std::uint32_t freq(int sym) const { return freq_[sym]; }
  std::uint32_t total() const { return total_; }

 private:
  std::array<std::uint32_t, N> freq_;
  std::uint32_t total_ = 0;
  std::uint32_t inc_, limit_;
};

// --- order-1 adaptive quality codec ---
// Each byte is coded from a 256-entry frequency table selected by the
// previous byte. Payload framing: varint length, then coder bytes.
// Increment 4 keeps the model's stationary noise on incompressible input
// under one percent; larger steps measurably inflate such streams.

namespace detail {

class Order1ByteModel {
 public:
  Order1ByteModel() : freq_(256 * 256, 1) {
    total_.fill(256);
  }

  void encode(RangeEncoder& rc, std::uint8_t prev, std::uint8_t sym) {
    const std::uint16_t* f = row(prev);
    std::uint32_t lo = 0;
    for (int i = 0; i < sym; ++i) lo += f[i];
    rc.encode(lo, lo + f[sym], total_[prev]);
    update(prev, sym);
  }

  std::uint8_t decode(RangeDecoder& rc, std::uint8_t prev) {
    const std::uint16_t* f = row(prev);
    std::uint32_t target = rc.decode_target(total_[prev]);
    std::uint32_t lo = 0;
    int sym = 0;
    while (lo + f[sym] <= target) lo += f[sym++];
    rc.consume(lo, lo + f[sym], total_[prev]);
    update(prev, static_cast<std::uint8_t>(sym));
    return static_cast<std::uint8_t>(sym);
  }

 private:
  std::uint16_t* row(std::uint8_t prev) { return freq_.data() + 256 * prev; }

  void update(std::uint8_t prev, std::uint8_t sym) {
    std::uint16_t* f = row(prev);
    f[sym] += 4;
    total_[prev] += 4;
    if (total_[prev] > kRcBot - 4) {
      std::uint32_t t = 0;
      for (int i = 0; i < 256; ++i) {
        f[i] = static_cast<std::uint16_t>((f[i] + 1) >> 1);
        t += f[i];
      }
      total_[prev] = t;
    }
  }

  std::vector<std::uint16_t> freq_;
  std::array<std::uint32_t, 256> total_{};
};

}  // namespace detail

inline Bytes quality_compress(ByteView q) {
  Bytes out;
  put_varint(out, q.size());
  if (q.empty()) return out;
  detail::Order1ByteModel model;
  RangeEncoder rc;
  std::uint8_t prev = 0;
  for (std::uint8_t c : q) {
    model.encode(rc, prev, c);
    prev = c;
  }
  Bytes payload = rc.finish();
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

inline Bytes quality_decompress(ByteView payload) {
  ByteReader rd(payload, Errc::corrupt_payload);
  std::uint64_t n = rd.varint();
  Bytes out;
  out.reserve(n);
  if (n == 0) return out;
  detail::Order1ByteModel model;
  RangeDecoder rc(payload.subspan(rd.pos()));
  std::uint8_t prev = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    prev = model.decode(rc, prev);
    out.push_back(prev);
  }
  return out;
}

}  // namespace hecate
