#pragma once

#include <stdexcept>
#include <string>

namespace hecate {

// Error taxonomy shared by all modules. The category string is stable and
// machine-parsable (the CLI prints it verbatim and exits nonzero).
enum class Errc {
  malformed_record,
  unknown_format,
  non_canonical_line_ending,
  inconsistent_streams,
  corrupt_extra,
  block_too_large,
  corrupt_block,
  chunk_size_mismatch,
  corrupt_payload,
  checksum_mismatch,
  unknown_codec,
  truncated_container,
  range_out_of_bounds,
  corrupt_script,
  reference_mismatch,
  invalid_config,
  io_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::malformed_record: return "malformed-record";
    case Errc::unknown_format: return "unknown-format";
    case Errc::non_canonical_line_ending: return "non-canonical-line-ending";
    case Errc::inconsistent_streams: return "inconsistent-streams";
    case Errc::corrupt_extra: return "corrupt-extra";
    case Errc::block_too_large: return "block-too-large";
    case Errc::corrupt_block: return "corrupt-block";
    case Errc::chunk_size_mismatch: return "chunk-size-mismatch";
    case Errc::corrupt_payload: return "corrupt-payload";
    case Errc::checksum_mismatch: return "checksum-mismatch";
    case Errc::unknown_codec: return "unknown-codec";
    case Errc::truncated_container: return "truncated-container";
    case Errc::range_out_of_bounds: return "range-out-of-bounds";
    case Errc::corrupt_script: return "corrupt-script";
    case Errc::reference_mismatch: return "reference-mismatch";
    case Errc::invalid_config: return "invalid-config";
    case Errc::io_error: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const noexcept { return code_; }
  const char* category() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace hecate
