#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>
#include <vector>

#include "hecate/error.hpp"

namespace hecate {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView to_view(const Bytes& b) { return ByteView(b.data(), b.size()); }
inline ByteView to_view(std::string_view s) {
  return ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}
inline Bytes to_bytes(std::string_view s) {
  const auto v = to_view(s);
  return Bytes(v.begin(), v.end());
}
inline std::string to_string(ByteView v) {
  return std::string(reinterpret_cast<const char*>(v.data()), v.size());
}

// FNV-1a, used as the container block checksum (checksum algorithm id 1).
inline std::uint64_t fnv1a64(ByteView data, std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (std::uint8_t b : data) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// --- varints (LEB128, little-endian base-128 groups) and zigzag ---

inline void put_varint(Bytes& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v) | 0x80);
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint64_t zigzag_encode(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}
inline std::int64_t zigzag_decode(std::uint64_t v) {
  return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

inline void put_u64le(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

// Sequential reader over a byte view. Throws on overrun so that truncated
// inputs surface as typed errors instead of UB.
class ByteReader {
 public:
  explicit ByteReader(ByteView v, Errc overrun = Errc::truncated_container)
      : v_(v), overrun_(overrun) {}

  bool empty() const { return pos_ >= v_.size(); }
  std::size_t remaining() const { return v_.size() - pos_; }
  std::size_t pos() const { return pos_; }

  std::uint8_t u8() {
    need(1);
    return v_[pos_++];
  }

  std::uint64_t u64le() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(v_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    int shift = 0;
    for (;;) {
      std::uint8_t b = u8();
      if (shift == 63 && (b & 0x7e)) fail(overrun_, "varint overflow");
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if (!(b & 0x80)) return v;
      shift += 7;
      if (shift > 63) fail(overrun_, "varint too long");
    }
  }

  std::int64_t zigzag() { return zigzag_decode(varint()); }

  ByteView bytes(std::size_t n) {
    need(n);
    ByteView r = v_.subspan(pos_, n);
    pos_ += n;
    return r;
  }

  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > v_.size()) fail(overrun_, "unexpected end of data");
  }

  ByteView v_;
  std::size_t pos_ = 0;
  Errc overrun_;
};

// --- MSB-first bit IO (used by the BWT block metadata serializer) ---

class BitWriter {
 public:
  void put(std::uint64_t value, int bits) {
    for (int i = bits - 1; i >= 0; --i) {
      acc_ = (acc_ << 1) | ((value >> i) & 1);
      if (++fill_ == 8) {
        out_.push_back(static_cast<std::uint8_t>(acc_));
        acc_ = 0;
        fill_ = 0;
      }
    }
    bits_ += static_cast<std::uint64_t>(bits);
  }

  std::uint64_t bit_count() const { return bits_; }

  // Pads the final partial byte with zero bits.
  Bytes finish() {
    if (fill_ > 0) {
      out_.push_back(static_cast<std::uint8_t>(acc_ << (8 - fill_)));
      acc_ = 0;
      fill_ = 0;
    }
    return std::move(out_);
  }

 private:
  Bytes out_;
  std::uint64_t bits_ = 0;
  std::uint32_t acc_ = 0;
  int fill_ = 0;
};

class BitReader {
 public:
  explicit BitReader(ByteView v, Errc overrun = Errc::truncated_container)
      : v_(v), overrun_(overrun) {}

  std::uint64_t get(int bits) {
    std::uint64_t v = 0;
    for (int i = 0; i < bits; ++i) {
      if (fill_ == 0) {
        if (pos_ >= v_.size()) fail(overrun_, "bit stream exhausted");
        acc_ = v_[pos_++];
        fill_ = 8;
      }
      v = (v << 1) | ((acc_ >> 7) & 1);
      acc_ = static_cast<std::uint8_t>(acc_ << 1);
      --fill_;
    }
    return v;
  }

  std::size_t byte_pos() const { return pos_; }

 private:
  ByteView v_;
  std::size_t pos_ = 0;
  std::uint8_t acc_ = 0;
  int fill_ = 0;
  Errc overrun_;
};

}  // namespace hecate
