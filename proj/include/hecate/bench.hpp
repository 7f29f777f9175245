#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

namespace hecate {

// Compression ratio in bits per byte: 8 * compressed / original.
inline double bits_per_byte(std::uint64_t compressed, std::uint64_t original) {
  return original == 0 ? 0.0 : 8.0 * static_cast<double>(compressed) / static_cast<double>(original);
}

struct BenchReport {
  std::uint64_t input_bytes = 0;
  std::uint64_t output_bytes = 0;
  double encode_ns_per_byte = 0.0;
  double decode_ns_per_byte = 0.0;
  int repeats = 1;

  double bpb() const { return bits_per_byte(output_bytes, input_bytes); }

  std::string to_text() const {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "in=%llu B out=%llu B ratio=%.4f bpb enc=%.1f ns/B dec=%.1f ns/B (%d runs)",
                  static_cast<unsigned long long>(input_bytes),
                  static_cast<unsigned long long>(output_bytes), bpb(), encode_ns_per_byte,
                  decode_ns_per_byte, repeats);
    return buf;
  }

  std::string to_kv() const {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "input_bytes=%llu\noutput_bytes=%llu\nbpb=%.4f\nenc_ns_per_byte=%.1f\n"
                  "dec_ns_per_byte=%.1f\nrepeats=%d\n",
                  static_cast<unsigned long long>(input_bytes),
                  static_cast<unsigned long long>(output_bytes), bpb(), encode_ns_per_byte,
                  decode_ns_per_byte, repeats);
    return buf;
  }
};

}  // namespace hecate
