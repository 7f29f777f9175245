#pragma once

// Pluggable general-purpose LZ backend. The container only records a backend
// id and round-trips bytes through this interface; the LZ algorithm itself
// is an external dependency, not part of this codebase. Backend 1 wraps
// zlib's raw deflate when available; backend 0 stores bytes verbatim so the
// slot stays functional without it.

#include <cstdint>

#include "hecate/bytes.hpp"
#include "hecate/error.hpp"

#ifdef HECATE_HAVE_ZLIB
#include <zlib.h>
#endif

namespace hecate {

inline constexpr std::uint8_t kLzBackendStore = 0;
inline constexpr std::uint8_t kLzBackendDeflate = 1;

inline std::uint8_t lz_default_backend() {
#ifdef HECATE_HAVE_ZLIB
  return kLzBackendDeflate;
#else
  return kLzBackendStore;
#endif
}

#ifdef HECATE_HAVE_ZLIB
namespace detail {

inline Bytes deflate_bytes(ByteView in) {
  uLongf bound = compressBound(static_cast<uLong>(in.size()));
  Bytes out(bound);
  int rc = compress2(out.data(), &bound, in.data(), static_cast<uLong>(in.size()), 6);
  if (rc != Z_OK) fail(Errc::io_error, "deflate failed");
  out.resize(bound);
  return out;
}

inline Bytes inflate_bytes(ByteView in, std::uint64_t raw_size) {
  Bytes out(raw_size);
  uLongf n = static_cast<uLongf>(raw_size);
  int rc = uncompress(out.data(), &n, in.data(), static_cast<uLong>(in.size()));
  if (rc != Z_OK || n != raw_size) fail(Errc::corrupt_payload, "inflate failed");
  return out;
}

}  // namespace detail
#endif

// Payload: u8 backend id | varint raw size | backend bytes.
inline Bytes lz_compress(ByteView raw) {
  Bytes out;
  const std::uint8_t backend = lz_default_backend();
  out.push_back(backend);
  put_varint(out, raw.size());
#ifdef HECATE_HAVE_ZLIB
  if (backend == kLzBackendDeflate) {
    Bytes packed = detail::deflate_bytes(raw);
    out.insert(out.end(), packed.begin(), packed.end());
    return out;
  }
#endif
  out.insert(out.end(), raw.begin(), raw.end());
  return out;
}

inline Bytes lz_decompress(ByteView payload) {
  ByteReader rd(payload, Errc::corrupt_payload);
  const std::uint8_t backend = rd.u8();
  const std::uint64_t raw_size = rd.varint();
  ByteView body = payload.subspan(rd.pos());
  if (backend == kLzBackendStore) {
    if (body.size() != raw_size) fail(Errc::corrupt_payload, "stored size mismatch");
    return Bytes(body.begin(), body.end());
  }
#ifdef HECATE_HAVE_ZLIB
  if (backend == kLzBackendDeflate) return detail::inflate_bytes(body, raw_size);
#endif
  fail(Errc::unknown_codec, "LZ backend not available");
}

}  // namespace hecate
