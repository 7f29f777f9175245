#pragma once

// Indexed block container. Layout:
//   header   "HKT1" | u8 version | u8 flags | u8 checksum algo | u8 profile
//            [flags bit0 set: varint ref-name length, name bytes, u64le ref hash]
//   payload  concatenated encoded blocks, stream order then block order
//   index    per-stream codec assignment and per-block
//            (offset, compressed size, raw size, checksum) entries,
//            then the record tier (per-record nuc/case byte lengths)
//   trailer  u64le index offset | u64le index size | "HKT1IDX\n"
// Checksums cover raw (decoded) block bytes. Blocks decode independently.

#include <array>
#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "hecate/bytes.hpp"
#include "hecate/cm.hpp"
#include "hecate/coder.hpp"
#include "hecate/error.hpp"
#include "hecate/fastx.hpp"
#include "hecate/lz.hpp"
#include "hecate/markov.hpp"
#include "hecate/packing.hpp"
#include "hecate/parallel.hpp"
#include "hecate/patch.hpp"

namespace hecate {

inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::uint8_t kChecksumFnv1a64 = 1;
inline constexpr std::uint8_t kFlagReferential = 0x01;
inline constexpr char kTrailerMagic[8] = {'H', 'K', 'T', '1', 'I', 'D', 'X', '\n'};
inline constexpr std::uint64_t kDefaultBlockSize = 16ull << 20;

enum class StreamId : std::uint8_t {
  ctrl = 0,
  hdr = 1,
  nuc = 2,
  case_rl = 3,
  quality = 4,
  extra = 5,
};
inline constexpr std::uint8_t kScriptStreamBase = 0x10;  // 0x10 | base id
inline constexpr std::uint8_t kLiteralStreamBase = 0x20;

inline const char* stream_name(std::uint8_t id) {
  static const char* base[6] = {"CTRL", "HDR", "NUC", "CASE", "QUALITY", "EXTRA"};
  static thread_local std::string buf;
  if (id < 6) return base[id];
  if ((id & 0xf0) == kScriptStreamBase && (id & 0x0f) < 6) {
    buf = std::string(base[id & 0x0f]) + ".script";
    return buf.c_str();
  }
  if ((id & 0xf0) == kLiteralStreamBase && (id & 0x0f) < 6) {
    buf = std::string(base[id & 0x0f]) + ".lit";
    return buf.c_str();
  }
  return "?";
}

enum class CodecId : std::uint8_t {
  raw = 0,
  lz_ext = 1,
  bwt_cm = 2,
  markov_mix = 3,
  quality_o1 = 4,
};

inline const char* codec_name(CodecId c) {
  switch (c) {
    case CodecId::raw: return "raw";
    case CodecId::lz_ext: return "lz-ext";
    case CodecId::bwt_cm: return "bwt-cm";
    case CodecId::markov_mix: return "markov-mix";
    case CodecId::quality_o1: return "quality-o1";
  }
  return "?";
}

struct CompressConfig {
  CodecId nuc = CodecId::bwt_cm;
  CodecId ctrl = CodecId::lz_ext;
  CodecId hdr = CodecId::lz_ext;
  CodecId case_rl = CodecId::raw;
  CodecId quality = CodecId::quality_o1;
  CodecId extra = CodecId::raw;
  CodecId ref_literals = CodecId::lz_ext;  // referential literal streams
  std::uint64_t block_size = kDefaultBlockSize;
  unsigned threads = 1;
  MixProfile profile = MixProfile::lite;
};

struct BlockEntry {
  std::uint64_t offset = 0;     // absolute file offset
  std::uint64_t comp_size = 0;
  std::uint64_t raw_size = 0;
  std::uint64_t checksum = 0;
};

struct StreamEntry {
  std::uint8_t id = 0;
  CodecId codec = CodecId::raw;
  Bytes aux;  // NUC: u8 pack width (0 = unpacked) + varint symbol count
  std::vector<BlockEntry> blocks;
  std::uint64_t raw_total() const {
    std::uint64_t t = 0;
    for (const BlockEntry& b : blocks) t += b.raw_size;
    return t;
  }
};

struct RecordEntry {
  std::uint64_t nuc_len = 0;
  std::uint64_t case_len = 0;
};

struct ContainerIndex {
  std::uint8_t version = kContainerVersion;
  std::uint8_t flags = 0;
  std::uint8_t checksum_algo = kChecksumFnv1a64;
  MixProfile profile = MixProfile::lite;
  std::string ref_name;
  std::uint64_t ref_hash = 0;
  std::vector<StreamEntry> streams;
  std::vector<RecordEntry> records;

  const StreamEntry* find(std::uint8_t id) const {
    for (const StreamEntry& s : streams)
      if (s.id == id) return &s;
    return nullptr;
  }
};

namespace detail {

inline void validate_codec(std::uint8_t stream_id, CodecId codec) {
  if (codec == CodecId::markov_mix && stream_id != static_cast<std::uint8_t>(StreamId::nuc))
    fail(Errc::invalid_config, "markov-mix is only valid for the NUC stream");
  if (codec == CodecId::quality_o1 && stream_id != static_cast<std::uint8_t>(StreamId::quality))
    fail(Errc::invalid_config, "quality-o1 is only valid for the QUALITY stream");
}

struct NucPackInfo {
  std::uint8_t width = 0;  // 0 = unpacked bytes
  std::uint64_t n_symbols = 0;
};

inline Bytes nuc_aux_blob(const NucPackInfo& info) {
  Bytes aux;
  aux.push_back(info.width);
  put_varint(aux, info.n_symbols);
  return aux;
}

inline NucPackInfo parse_nuc_aux(ByteView aux) {
  ByteReader rd(aux, Errc::truncated_container);
  NucPackInfo info;
  info.width = rd.u8();
  if (info.width != 0 && info.width != 2 && info.width != 4)
    fail(Errc::truncated_container, "bad NUC pack width");
  info.n_symbols = rd.varint();
  return info;
}

// Symbol codes of one block of packed payload bytes. `first_sym` is the
// absolute index of the block's first symbol.
inline Bytes codes_of_block(ByteView payload_block, int width, std::uint64_t first_sym,
                            std::uint64_t total_syms) {
  const std::uint64_t per = 8 / static_cast<std::uint64_t>(width);
  const std::uint64_t n =
      std::min<std::uint64_t>(payload_block.size() * per, total_syms - first_sym);
  Bytes codes(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (width == 2)
      codes[i] = (payload_block[i >> 2] >> (6 - 2 * (i & 3))) & 3;
    else
      codes[i] = (payload_block[i >> 1] >> (4 - 4 * (i & 1))) & 15;
  }
  return codes;
}

inline Bytes pack_codes(ByteView codes, int width) {
  Bytes out((codes.size() * static_cast<std::size_t>(width) + 7) / 8, 0);
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (width == 2)
      out[i >> 2] |= static_cast<std::uint8_t>(codes[i] << (6 - 2 * (i & 3)));
    else
      out[i >> 1] |= static_cast<std::uint8_t>(codes[i] << (4 - 4 * (i & 1)));
  }
  return out;
}

inline Bytes encode_block(CodecId codec, ByteView raw, const NucPackInfo& nuc,
                          std::uint64_t first_sym, MixProfile profile) {
  switch (codec) {
    case CodecId::raw:
      return Bytes(raw.begin(), raw.end());
    case CodecId::lz_ext:
      return lz_compress(raw);
    case CodecId::bwt_cm:
      return bwtcm_compress(raw);
    case CodecId::quality_o1:
      return quality_compress(raw);
    case CodecId::markov_mix: {
      Bytes codes = codes_of_block(raw, nuc.width, first_sym, nuc.n_symbols);
      return mix_compress(to_view(codes), nuc.width, profile);
    }
  }
  fail(Errc::unknown_codec, "unhandled codec id");
}

inline Bytes decode_block(CodecId codec, ByteView payload, std::uint64_t raw_size,
                          const NucPackInfo& nuc) {
  Bytes out;
  switch (codec) {
    case CodecId::raw:
      out.assign(payload.begin(), payload.end());
      break;
    case CodecId::lz_ext:
      out = lz_decompress(payload);
      break;
    case CodecId::bwt_cm:
      out = bwtcm_decompress(payload);
      break;
    case CodecId::quality_o1:
      out = quality_decompress(payload);
      break;
    case CodecId::markov_mix: {
      Bytes codes = mix_decompress(payload);
      out = pack_codes(to_view(codes), nuc.width);
      break;
    }
  }
  if (out.size() != raw_size) fail(Errc::corrupt_payload, "decoded size mismatch");
  return out;
}

inline void serialize_index(Bytes& out, const ContainerIndex& idx) {
  put_varint(out, idx.streams.size());
  for (const StreamEntry& s : idx.streams) {
    out.push_back(s.id);
    out.push_back(static_cast<std::uint8_t>(s.codec));
    put_varint(out, s.aux.size());
    out.insert(out.end(), s.aux.begin(), s.aux.end());
    put_varint(out, s.blocks.size());
    for (const BlockEntry& b : s.blocks) {
      put_varint(out, b.offset);
      put_varint(out, b.comp_size);
      put_varint(out, b.raw_size);
      put_u64le(out, b.checksum);
    }
  }
  put_varint(out, idx.records.size());
  for (const RecordEntry& r : idx.records) {
    put_varint(out, r.nuc_len);
    put_varint(out, r.case_len);
  }
}

inline void parse_index(ByteReader& rd, ContainerIndex& idx) {
  std::uint64_t nstreams = rd.varint();
  for (std::uint64_t i = 0; i < nstreams; ++i) {
    StreamEntry s;
    s.id = rd.u8();
    std::uint8_t codec = rd.u8();
    if (codec > 4) fail(Errc::unknown_codec, "codec id not recognized");
    s.codec = static_cast<CodecId>(codec);
    std::uint64_t aux_len = rd.varint();
    ByteView aux = rd.bytes(aux_len);
    s.aux.assign(aux.begin(), aux.end());
    std::uint64_t nblocks = rd.varint();
    for (std::uint64_t b = 0; b < nblocks; ++b) {
      BlockEntry e;
      e.offset = rd.varint();
      e.comp_size = rd.varint();
      e.raw_size = rd.varint();
      e.checksum = rd.u64le();
      s.blocks.push_back(e);
    }
    idx.streams.push_back(std::move(s));
  }
  std::uint64_t nrecords = rd.varint();
  for (std::uint64_t i = 0; i < nrecords; ++i) {
    RecordEntry r;
    r.nuc_len = rd.varint();
    r.case_len = rd.varint();
    idx.records.push_back(r);
  }
}

struct PendingStream {
  std::uint8_t id;
  CodecId codec;
  Bytes aux;
  Bytes content;
  NucPackInfo nuc;  // meaningful for NUC-with-markov-mix only
};

inline Bytes assemble_container(std::vector<PendingStream>& pending, const CompressConfig& cfg,
                                std::uint8_t flags, const std::string& ref_name,
                                std::uint64_t ref_hash,
                                const std::vector<RecordEntry>& records) {
  for (const PendingStream& ps : pending) validate_codec(ps.id, ps.codec);

  struct Job {
    std::size_t stream;
    std::size_t block;
    std::uint64_t raw_off;
    std::uint64_t raw_len;
  };
  std::vector<Job> jobs;
  ContainerIndex idx;
  idx.flags = flags;
  idx.profile = cfg.profile;
  idx.ref_name = ref_name;
  idx.ref_hash = ref_hash;
  idx.records = records;

  for (std::size_t si = 0; si < pending.size(); ++si) {
    PendingStream& ps = pending[si];
    StreamEntry se;
    se.id = ps.id;
    se.codec = ps.codec;
    se.aux = ps.aux;
    const std::uint64_t len = ps.content.size();
    for (std::uint64_t off = 0; off < len; off += cfg.block_size) {
      const std::uint64_t blen = std::min<std::uint64_t>(cfg.block_size, len - off);
      jobs.push_back({si, se.blocks.size(), off, blen});
      BlockEntry be;
      be.raw_size = blen;
      se.blocks.push_back(be);
    }
    idx.streams.push_back(std::move(se));
  }

  std::vector<Bytes> encoded(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t j) {
    const Job& job = jobs[j];
    const PendingStream& ps = pending[job.stream];
    ByteView raw(ps.content.data() + job.raw_off, job.raw_len);
    std::uint64_t first_sym = 0;
    if (ps.codec == CodecId::markov_mix)
      first_sym = job.raw_off * (8 / ps.nuc.width);
    encoded[j] = encode_block(ps.codec, raw, ps.nuc, first_sym, cfg.profile);
    idx.streams[job.stream].blocks[job.block].checksum = fnv1a64(raw);
  });

  Bytes out;
  out.insert(out.end(), {'H', 'K', 'T', '1'});
  out.push_back(kContainerVersion);
  out.push_back(flags);
  out.push_back(kChecksumFnv1a64);
  out.push_back(static_cast<std::uint8_t>(cfg.profile));
  if (flags & kFlagReferential) {
    put_varint(out, ref_name.size());
    out.insert(out.end(), ref_name.begin(), ref_name.end());
    put_u64le(out, ref_hash);
  }

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    BlockEntry& be = idx.streams[jobs[j].stream].blocks[jobs[j].block];
    be.offset = out.size();
    be.comp_size = encoded[j].size();
    out.insert(out.end(), encoded[j].begin(), encoded[j].end());
  }

  const std::uint64_t index_off = out.size();
  serialize_index(out, idx);
  const std::uint64_t index_size = out.size() - index_off;
  put_u64le(out, index_off);
  put_u64le(out, index_size);
  out.insert(out.end(), kTrailerMagic, kTrailerMagic + 8);
  return out;
}

}  // namespace detail

// Per-stream decode counters, keyed by stream id. Atomic so parallel block
// decodes and concurrent slice queries can share one reader.
struct DecodeStats {
  std::array<std::atomic<std::uint64_t>, 64> blocks_decoded{};
  std::uint64_t decoded(StreamId id) const {
    return blocks_decoded[static_cast<std::uint8_t>(id)].load(std::memory_order_relaxed);
  }
};

inline Bytes compress_file(ByteView input, const CompressConfig& cfg = {}) {
  SemanticStreams s = factor(input);

  detail::NucPackInfo nuc_info;
  nuc_info.n_symbols = s.nuc.size();
  WidthChoice wc = choose_width(to_view(s.nuc));
  if (cfg.nuc == CodecId::markov_mix && wc == WidthChoice::none)
    wc = WidthChoice::pack4;  // the mix codec needs the symbol domain
  nuc_info.width = static_cast<std::uint8_t>(wc);

  Bytes nuc_content;
  Bytes extra_content;
  if (wc == WidthChoice::none) {
    nuc_content = s.nuc;
  } else {
    PackedNuc packed = pack(to_view(s.nuc), static_cast<int>(wc));
    nuc_content = std::move(packed.payload);
    extra_content = std::move(packed.extra);
  }

  std::vector<RecordEntry> records;
  for (const RecordSpan& sp : record_spans(to_view(s.ctrl), to_view(s.case_rl)))
    records.push_back({sp.nuc_len, sp.case_len});

  std::vector<detail::PendingStream> pending;
  pending.push_back({static_cast<std::uint8_t>(StreamId::ctrl), cfg.ctrl, {}, std::move(s.ctrl), {}});
  pending.push_back({static_cast<std::uint8_t>(StreamId::hdr), cfg.hdr, {}, std::move(s.hdr), {}});
  pending.push_back({static_cast<std::uint8_t>(StreamId::nuc), cfg.nuc, detail::nuc_aux_blob(nuc_info),
                     std::move(nuc_content), nuc_info});
  pending.push_back({static_cast<std::uint8_t>(StreamId::case_rl), cfg.case_rl, {}, std::move(s.case_rl), {}});
  pending.push_back({static_cast<std::uint8_t>(StreamId::quality), cfg.quality, {}, std::move(s.quality), {}});
  pending.push_back({static_cast<std::uint8_t>(StreamId::extra), cfg.extra, {}, std::move(extra_content), {}});

  return detail::assemble_container(pending, cfg, 0, "", 0, records);
}

class ContainerReader {
 public:
  explicit ContainerReader(ByteView file) : file_(file) { parse(); }

  const ContainerIndex& index() const { return idx_; }
  DecodeStats& stats() { return stats_; }

  Bytes decode_block(const StreamEntry& s, std::size_t bi) {
    const BlockEntry& be = s.blocks[bi];
    if (be.offset + be.comp_size > file_.size())
      fail(Errc::truncated_container, "block payload out of file bounds");
    detail::NucPackInfo nuc;
    if (!s.aux.empty()) nuc = detail::parse_nuc_aux(to_view(s.aux));
    Bytes raw = detail::decode_block(s.codec, file_.subspan(be.offset, be.comp_size), be.raw_size, nuc);
    if (fnv1a64(to_view(raw)) != be.checksum)
      fail(Errc::checksum_mismatch, std::string("stream ") + stream_name(s.id) + " block " +
                                        std::to_string(bi));
    stats_.blocks_decoded[s.id & 63].fetch_add(1, std::memory_order_relaxed);
    return raw;
  }

  Bytes stream_content(std::uint8_t id, unsigned threads = 1) {
    const StreamEntry* s = idx_.find(id);
    if (!s) return {};
    std::vector<Bytes> parts(s->blocks.size());
    parallel_for(s->blocks.size(), threads, [&](std::size_t b) { parts[b] = decode_block(*s, b); });
    Bytes out;
    out.reserve(s->raw_total());
    for (Bytes& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
  }

  // Full decompression back to the original file.
  Bytes decompress(unsigned threads = 1) {
    if (idx_.flags & kFlagReferential)
      fail(Errc::invalid_config, "referential container requires the reference file");
    SemanticStreams s;
    s.ctrl = stream_content(static_cast<std::uint8_t>(StreamId::ctrl), threads);
    s.hdr = stream_content(static_cast<std::uint8_t>(StreamId::hdr), threads);
    s.case_rl = stream_content(static_cast<std::uint8_t>(StreamId::case_rl), threads);
    s.quality = stream_content(static_cast<std::uint8_t>(StreamId::quality), threads);
    s.nuc = decode_nuc(threads);
    return reassemble(s);
  }

  // Nucleotide slice of one record, case and extras applied; decodes only
  // the blocks overlapping the mapped ranges.
  Bytes slice(std::uint64_t record, std::uint64_t lo, std::uint64_t hi) {
    if (record >= idx_.records.size()) fail(Errc::range_out_of_bounds, "record id out of range");
    std::uint64_t nuc_off = 0, case_off = 0;
    for (std::uint64_t r = 0; r < record; ++r) {
      nuc_off += idx_.records[r].nuc_len;
      case_off += idx_.records[r].case_len;
    }
    const RecordEntry& rec = idx_.records[record];
    if (lo > hi || hi > rec.nuc_len) fail(Errc::range_out_of_bounds, "symbol range out of record");
    if (lo == hi) return {};

    Bytes letters = nuc_range(nuc_off + lo, nuc_off + hi);
    apply_extras(letters, nuc_off + lo, nuc_off + hi);
    apply_case(letters, case_off, rec.case_len, lo, hi);
    return letters;
  }

 private:
  void parse() {
    if (file_.size() < 8 + 24) fail(Errc::truncated_container, "file shorter than header+trailer");
    if (!(file_[0] == 'H' && file_[1] == 'K' && file_[2] == 'T' && file_[3] == '1'))
      fail(Errc::truncated_container, "bad magic");
    idx_.version = file_[4];
    if (idx_.version != kContainerVersion) fail(Errc::truncated_container, "unsupported version");
    idx_.flags = file_[5];
    idx_.checksum_algo = file_[6];
    if (idx_.checksum_algo != kChecksumFnv1a64) fail(Errc::unknown_codec, "checksum algorithm");
    idx_.profile = static_cast<MixProfile>(file_[7] & 1);
    if (idx_.flags & kFlagReferential) {
      ByteReader hr(file_.subspan(8), Errc::truncated_container);
      std::uint64_t nlen = hr.varint();
      ByteView name = hr.bytes(nlen);
      idx_.ref_name.assign(name.begin(), name.end());
      idx_.ref_hash = hr.u64le();
    }

    ByteView tail = file_.subspan(file_.size() - 24);
    for (int i = 0; i < 8; ++i)
      if (tail[16 + i] != static_cast<std::uint8_t>(kTrailerMagic[i]))
        fail(Errc::truncated_container, "trailer magic missing");
    ByteReader tr(tail, Errc::truncated_container);
    std::uint64_t index_off = tr.u64le();
    std::uint64_t index_size = tr.u64le();
    if (index_off + index_size + 24 != file_.size())
      fail(Errc::truncated_container, "index bounds disagree with file size");
    ByteReader ir(file_.subspan(index_off, index_size), Errc::truncated_container);
    detail::parse_index(ir, idx_);
    for (const StreamEntry& s : idx_.streams)
      for (const BlockEntry& b : s.blocks)
        if (b.offset + b.comp_size > index_off)
          fail(Errc::truncated_container, "block overlaps index");
  }

  detail::NucPackInfo nuc_info() const {
    const StreamEntry* s = idx_.find(static_cast<std::uint8_t>(StreamId::nuc));
    if (!s || s->aux.empty()) return {};
    return detail::parse_nuc_aux(to_view(s->aux));
  }

  Bytes decode_nuc(unsigned threads) {
    detail::NucPackInfo info = nuc_info();
    Bytes content = stream_content(static_cast<std::uint8_t>(StreamId::nuc), threads);
    if (info.width == 0) return content;
    PackedNuc packed;
    packed.width_bits = info.width;
    packed.n_symbols = info.n_symbols;
    packed.payload = std::move(content);
    packed.extra = stream_content(static_cast<std::uint8_t>(StreamId::extra), threads);
    return unpack(packed);
  }

  // Uppercase letters for the absolute symbol range [sym_lo, sym_hi).
  Bytes nuc_range(std::uint64_t sym_lo, std::uint64_t sym_hi) {
    const StreamEntry* s = idx_.find(static_cast<std::uint8_t>(StreamId::nuc));
    if (!s) fail(Errc::range_out_of_bounds, "no NUC stream");
    detail::NucPackInfo info = nuc_info();
    std::uint64_t byte_lo, byte_hi;  // payload byte range to decode
    if (info.width == 0) {
      byte_lo = sym_lo;
      byte_hi = sym_hi;
    } else {
      byte_lo = sym_lo * info.width / 8;
      byte_hi = (sym_hi * info.width + 7) / 8;
    }
    Bytes buf = range_of_stream(*s, byte_lo, byte_hi);
    Bytes out(sym_hi - sym_lo);
    if (info.width == 0) {
      std::copy(buf.begin(), buf.end(), out.begin());
    } else {
      for (std::uint64_t i = 0; i < out.size(); ++i) {
        const std::uint64_t sym = sym_lo + i;
        int code;
        if (info.width == 2)
          code = (buf[(sym >> 2) - byte_lo] >> (6 - 2 * (sym & 3))) & 3;
        else
          code = (buf[(sym >> 1) - byte_lo] >> (4 - 4 * (sym & 1))) & 15;
        out[i] = static_cast<std::uint8_t>(kIupac16[code]);
      }
    }
    return out;
  }

  // Decodes exactly the blocks overlapping [lo, hi) of a stream's raw bytes.
  Bytes range_of_stream(const StreamEntry& s, std::uint64_t lo, std::uint64_t hi) {
    Bytes out;
    std::uint64_t off = 0;
    for (std::size_t b = 0; b < s.blocks.size() && off < hi; ++b) {
      const std::uint64_t blen = s.blocks[b].raw_size;
      if (off + blen > lo) {
        Bytes raw = decode_block(s, b);
        const std::uint64_t from = lo > off ? lo - off : 0;
        const std::uint64_t to = std::min<std::uint64_t>(blen, hi - off);
        out.insert(out.end(), raw.begin() + from, raw.begin() + to);
      }
      off += blen;
    }
    if (out.size() != hi - lo) fail(Errc::range_out_of_bounds, "stream range out of bounds");
    return out;
  }

  void apply_extras(Bytes& letters, std::uint64_t sym_lo, std::uint64_t sym_hi) {
    const StreamEntry* s = idx_.find(static_cast<std::uint8_t>(StreamId::extra));
    if (!s || s->blocks.empty()) return;
    Bytes extra = stream_content(static_cast<std::uint8_t>(StreamId::extra));
    ByteReader rd(to_view(extra), Errc::corrupt_extra);
    std::uint64_t pos = 0;
    bool first = true;
    while (!rd.empty()) {
      std::uint64_t d = rd.varint();
      pos = first ? d : pos + d;
      first = false;
      std::uint8_t byte = rd.u8();
      if (pos >= sym_hi) break;
      if (pos >= sym_lo) letters[pos - sym_lo] = byte;
    }
  }

  void apply_case(Bytes& letters, std::uint64_t case_off, std::uint64_t case_len,
                  std::uint64_t lo, std::uint64_t hi) {
    if (case_len == 0) return;
    const StreamEntry* s = idx_.find(static_cast<std::uint8_t>(StreamId::case_rl));
    if (!s) return;
    Bytes rl = range_of_stream(*s, case_off, case_off + case_len);
    ByteReader rd(to_view(rl), Errc::inconsistent_streams);
    std::uint8_t lower = rd.u8();
    std::uint64_t done = 0;
    while (!rd.empty() && done < hi) {
      std::uint64_t run = rd.varint();
      if (lower) {
        const std::uint64_t a = std::max(done, lo);
        const std::uint64_t b = std::min(done + run, hi);
        for (std::uint64_t i = a; i < b; ++i) {
          std::uint8_t& c = letters[i - lo];
          if (c >= 'A' && c <= 'Z') c += 32;
        }
      }
      done += run;
      lower ^= 1;
    }
  }

  ByteView file_;
  ContainerIndex idx_;
  DecodeStats stats_;
};

inline Bytes decompress_file(ByteView container, unsigned threads = 1) {
  ContainerReader rd(container);
  return rd.decompress(threads);
}

// --- referential mode ---

inline Bytes refpack(ByteView target, ByteView reference, const std::string& ref_name,
                     const CompressConfig& cfg = {}) {
  SemanticStreams t = factor(target);
  SemanticStreams r = factor(reference);

  std::vector<RecordEntry> records;
  for (const RecordSpan& sp : record_spans(to_view(t.ctrl), to_view(t.case_rl)))
    records.push_back({sp.nuc_len, sp.case_len});

  const Bytes* tparts[6] = {&t.ctrl, &t.hdr, &t.nuc, &t.case_rl, &t.quality, &t.case_rl};
  const Bytes* rparts[6] = {&r.ctrl, &r.hdr, &r.nuc, &r.case_rl, &r.quality, &r.case_rl};
  // EXTRA has no factored content here; the nuc stream is diffed in the
  // unpacked symbol domain, so extras stay embedded in it.
  Bytes empty;
  tparts[5] = &empty;
  rparts[5] = &empty;

  std::vector<detail::PendingStream> pending;
  std::array<PatchScript, 6> scripts;
  parallel_for(6, cfg.threads, [&](std::size_t i) {
    scripts[i] = diff_stream(to_view(*rparts[i]), to_view(*tparts[i]));
  });
  for (std::size_t i = 0; i < 6; ++i) {
    detail::PendingStream script;
    script.id = static_cast<std::uint8_t>(kScriptStreamBase | i);
    script.codec = CodecId::lz_ext;
    script.content = scripts[i].serialize();
    pending.push_back(std::move(script));

    detail::PendingStream lits;
    lits.id = static_cast<std::uint8_t>(kLiteralStreamBase | i);
    lits.codec = cfg.ref_literals;
    lits.content = scripts[i].literals;
    pending.push_back(std::move(lits));
  }

  return detail::assemble_container(pending, cfg, kFlagReferential, ref_name,
                                    fnv1a64(reference), records);
}

inline Bytes refunpack(ByteView container, ByteView reference, unsigned threads = 1) {
  ContainerReader rd(container);
  if (!(rd.index().flags & kFlagReferential))
    fail(Errc::invalid_config, "not a referential container");
  if (rd.index().ref_hash != fnv1a64(reference))
    fail(Errc::reference_mismatch, "reference content hash differs");

  SemanticStreams r = factor(reference);
  const Bytes* rparts[6] = {&r.ctrl, &r.hdr, &r.nuc, &r.case_rl, &r.quality, nullptr};
  SemanticStreams t;
  Bytes* tparts[6] = {&t.ctrl, &t.hdr, &t.nuc, &t.case_rl, &t.quality, nullptr};

  for (std::size_t i = 0; i < 6; ++i) {
    Bytes script = rd.stream_content(static_cast<std::uint8_t>(kScriptStreamBase | i), threads);
    Bytes lits = rd.stream_content(static_cast<std::uint8_t>(kLiteralStreamBase | i), threads);
    PatchScript ps = PatchScript::parse(to_view(script), to_view(lits));
    Bytes part = apply_patch(i == 5 ? ByteView{} : to_view(*rparts[i]), ps);
    if (i != 5) *tparts[i] = std::move(part);
  }
  return reassemble(t);
}

}  // namespace hecate
