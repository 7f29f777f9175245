#pragma once

// FASTA/FASTQ stream factorization: splits a text file into six semantic
// streams (record framing, headers, nucleotides, case runs, quality, extras)
// and reassembles it byte-exactly, including line wrapping and case.

#include <cstdint>
#include <utility>
#include <vector>

#include "hecate/bytes.hpp"
#include "hecate/error.hpp"

namespace hecate {

enum class FastxFormat : std::uint8_t { fasta = 0, fastq = 1 };

// Per-record framing flags stored in the CTRL stream.
inline constexpr std::uint8_t kRecHasQuality = 0x01;
inline constexpr std::uint8_t kRecNoFinalNewline = 0x02;  // last line of record unterminated
inline constexpr std::uint8_t kRecPlusRepeatsHeader = 0x04;

struct SemanticStreams {
  Bytes ctrl;      // per-record tokens, see CtrlRecord
  Bytes hdr;       // header payloads, newline-separated
  Bytes nuc;       // uppercase sequence bytes, record order
  Bytes case_rl;   // per record: initial-case byte + alternating varint run lengths
  Bytes quality;   // raw quality bytes, record order
  std::vector<std::pair<std::uint64_t, std::uint8_t>> extra_raw;  // non-IUPAC staging
};

// CTRL token, one per record:
//   u8 format | varint hdr_len | varint seq_len | varint wrap_run_count |
//   (varint line_width, varint repeat)* | u8 flags
struct CtrlRecord {
  std::uint8_t format = 0;
  std::uint64_t hdr_len = 0;
  std::uint64_t seq_len = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> wraps;  // (width, repeat)
  std::uint8_t flags = 0;
};

namespace detail {

inline bool is_lower(std::uint8_t c) { return c >= 'a' && c <= 'z'; }
inline bool is_upper(std::uint8_t c) { return c >= 'A' && c <= 'Z'; }
inline std::uint8_t upcase(std::uint8_t c) { return is_lower(c) ? c - 32 : c; }

// 256-entry map: IUPAC nucleotide letter -> 4-bit code, -1 otherwise.
// Code order A,C,G,T,N,R,Y,S,W,K,M,B,D,H,V,U = 0..15.
inline const signed char* iupac4_table() {
  static signed char table[256];
  static bool ready = [] {
    for (int i = 0; i < 256; ++i) table[i] = -1;
    const char* abc = "ACGTNRYSWKMBDHVU";
    for (int i = 0; i < 16; ++i) table[static_cast<std::uint8_t>(abc[i])] = static_cast<signed char>(i);
    return true;
  }();
  (void)ready;
  return table;
}

struct Line {
  std::size_t begin = 0, end = 0;  // [begin, end) excludes the newline
  bool has_newline = false;
};

// Splits input at '\n'. Any '\r' is rejected up front; only LF files are
// representable in the CTRL grammar.
class LineCursor {
 public:
  explicit LineCursor(ByteView v) : v_(v) {}

  bool done() const { return pos_ >= v_.size(); }
  std::uint8_t peek() const { return v_[pos_]; }

  Line next() {
    Line ln;
    ln.begin = pos_;
    while (pos_ < v_.size() && v_[pos_] != '\n') {
      if (v_[pos_] == '\r') fail(Errc::non_canonical_line_ending, "CR byte in input");
      ++pos_;
    }
    ln.end = pos_;
    if (pos_ < v_.size()) {
      ln.has_newline = true;
      ++pos_;
    }
    return ln;
  }

 private:
  ByteView v_;
  std::size_t pos_ = 0;
};

// Appends sequence bytes to nuc (uppercased) and merges case runs.
// Non-letter bytes are case-neutral: they extend the current run.
class CaseTracker {
 public:
  void feed(std::uint8_t c) {
    int cls = is_lower(c) ? 1 : (is_upper(c) ? 0 : -1);
    if (cls >= 0 && cls != cur_) {
      if (cur_ >= 0) {
        runs_.push_back(run_);
        run_ = 0;
      } else {
        initial_ = static_cast<std::uint8_t>(cls);
      }
      cur_ = cls;
    }
    ++run_;
  }

  void finish(Bytes& case_rl, std::uint64_t seq_len) {
    if (seq_len == 0) return;
    runs_.push_back(run_);
    case_rl.push_back(initial_);
    for (std::uint64_t r : runs_) put_varint(case_rl, r);
    runs_.clear();
    run_ = 0;
    cur_ = -1;
    initial_ = 0;
  }

 private:
  std::vector<std::uint64_t> runs_;
  std::uint64_t run_ = 0;
  int cur_ = -1;  // -1 until the first cased letter
  std::uint8_t initial_ = 0;
};

inline void put_ctrl(Bytes& ctrl, const CtrlRecord& r) {
  ctrl.push_back(r.format);
  put_varint(ctrl, r.hdr_len);
  put_varint(ctrl, r.seq_len);
  put_varint(ctrl, r.wraps.size());
  for (const auto& [w, rep] : r.wraps) {
    put_varint(ctrl, w);
    put_varint(ctrl, rep);
  }
  ctrl.push_back(r.flags);
}

inline CtrlRecord get_ctrl(ByteReader& rd) {
  CtrlRecord r;
  r.format = rd.u8();
  if (r.format > 1) fail(Errc::inconsistent_streams, "bad record format tag");
  r.hdr_len = rd.varint();
  r.seq_len = rd.varint();
  std::uint64_t nruns = rd.varint();
  std::uint64_t total = 0;
  for (std::uint64_t i = 0; i < nruns; ++i) {
    std::uint64_t w = rd.varint();
    std::uint64_t rep = rd.varint();
    r.wraps.emplace_back(w, rep);
    total += w * rep;
  }
  r.flags = rd.u8();
  if (total != r.seq_len) fail(Errc::inconsistent_streams, "wrap widths disagree with length");
  return r;
}

}  // namespace detail

inline std::vector<CtrlRecord> parse_ctrl(ByteView ctrl) {
  ByteReader rd(ctrl, Errc::inconsistent_streams);
  std::vector<CtrlRecord> out;
  while (!rd.empty()) out.push_back(detail::get_ctrl(rd));
  return out;
}

inline SemanticStreams factor(ByteView input) {
  SemanticStreams s;
  if (input.empty()) return s;

  FastxFormat fmt;
  if (input[0] == '>')
    fmt = FastxFormat::fasta;
  else if (input[0] == '@')
    fmt = FastxFormat::fastq;
  else
    fail(Errc::unknown_format, "first byte is neither '>' nor '@'");

  detail::LineCursor cur(input);
  const signed char* iupac = detail::iupac4_table();

  auto add_seq_bytes = [&](ByteView line, detail::CaseTracker& ct) {
    for (std::uint8_t c : line) {
      ct.feed(c);
      std::uint8_t up = detail::upcase(c);
      if (iupac[up] < 0) s.extra_raw.emplace_back(s.nuc.size(), up);
      s.nuc.push_back(up);
    }
  };

  while (!cur.done()) {
    CtrlRecord rec;
    rec.format = static_cast<std::uint8_t>(fmt);
    detail::CaseTracker ct;

    if (fmt == FastxFormat::fasta) {
      if (cur.peek() != '>') fail(Errc::malformed_record, "expected '>' at record start");
      detail::Line h = cur.next();
      rec.hdr_len = h.end - (h.begin + 1);
      s.hdr.insert(s.hdr.end(), input.begin() + h.begin + 1, input.begin() + h.end);
      s.hdr.push_back('\n');
      bool last_has_nl = h.has_newline;

      std::uint64_t prev_w = 0, rep = 0;
      while (!cur.done() && cur.peek() != '>') {
        detail::Line ln = cur.next();
        std::uint64_t w = ln.end - ln.begin;
        add_seq_bytes(input.subspan(ln.begin, w), ct);
        rec.seq_len += w;
        if (rep > 0 && w == prev_w) {
          ++rep;
        } else {
          if (rep > 0) rec.wraps.emplace_back(prev_w, rep);
          prev_w = w;
          rep = 1;
        }
        last_has_nl = ln.has_newline;
      }
      if (rep > 0) rec.wraps.emplace_back(prev_w, rep);
      if (!last_has_nl) rec.flags |= kRecNoFinalNewline;
    } else {
      if (cur.peek() != '@') fail(Errc::malformed_record, "expected '@' at record start");
      detail::Line h = cur.next();
      if (!h.has_newline) fail(Errc::malformed_record, "truncated record: header only");
      rec.hdr_len = h.end - (h.begin + 1);
      s.hdr.insert(s.hdr.end(), input.begin() + h.begin + 1, input.begin() + h.end);
      s.hdr.push_back('\n');

      if (cur.done()) fail(Errc::malformed_record, "truncated record: missing sequence");
      detail::Line sq = cur.next();
      if (!sq.has_newline) fail(Errc::malformed_record, "truncated record: missing '+' line");
      rec.seq_len = sq.end - sq.begin;
      add_seq_bytes(input.subspan(sq.begin, rec.seq_len), ct);
      rec.wraps.emplace_back(rec.seq_len, 1);

      if (cur.done()) fail(Errc::malformed_record, "truncated record: missing '+' line");
      detail::Line pl = cur.next();
      if (!pl.has_newline) fail(Errc::malformed_record, "truncated record: missing quality");
      if (pl.end == pl.begin || input[pl.begin] != '+')
        fail(Errc::malformed_record, "'+' separator line missing");
      std::size_t plus_len = pl.end - pl.begin - 1;
      if (plus_len > 0) {
        if (plus_len != rec.hdr_len ||
            !std::equal(input.begin() + pl.begin + 1, input.begin() + pl.end,
                        input.begin() + h.begin + 1))
          fail(Errc::malformed_record, "'+' line does not repeat header");
        rec.flags |= kRecPlusRepeatsHeader;
      }

      if (cur.done()) fail(Errc::malformed_record, "truncated record: missing quality");
      detail::Line ql = cur.next();
      if (ql.end - ql.begin != rec.seq_len)
        fail(Errc::malformed_record, "quality length differs from sequence length");
      s.quality.insert(s.quality.end(), input.begin() + ql.begin, input.begin() + ql.end);
      rec.flags |= kRecHasQuality;
      if (!ql.has_newline) rec.flags |= kRecNoFinalNewline;
    }

    ct.finish(s.case_rl, rec.seq_len);
    detail::put_ctrl(s.ctrl, rec);
  }
  return s;
}

inline Bytes reassemble(const SemanticStreams& s) {
  Bytes out;
  std::vector<CtrlRecord> recs = parse_ctrl(to_view(s.ctrl));
  ByteReader hdr(to_view(s.hdr), Errc::inconsistent_streams);
  ByteReader case_rl(to_view(s.case_rl), Errc::inconsistent_streams);
  std::size_t nuc_pos = 0, qual_pos = 0;

  for (std::size_t ri = 0; ri < recs.size(); ++ri) {
    const CtrlRecord& rec = recs[ri];
    bool last = ri + 1 == recs.size();
    bool no_final_nl = (rec.flags & kRecNoFinalNewline) != 0;
    if (no_final_nl && !last) fail(Errc::inconsistent_streams, "unterminated non-final record");

    ByteView hline = hdr.bytes(rec.hdr_len);
    if (hdr.u8() != '\n') fail(Errc::inconsistent_streams, "header separator missing");

    if (nuc_pos + rec.seq_len > s.nuc.size())
      fail(Errc::inconsistent_streams, "nuc stream shorter than ctrl lengths");

    // Restore case over this record's sequence bytes.
    Bytes seq(s.nuc.begin() + nuc_pos, s.nuc.begin() + nuc_pos + rec.seq_len);
    nuc_pos += rec.seq_len;
    if (rec.seq_len > 0) {
      std::uint8_t lower = case_rl.u8();
      if (lower > 1) fail(Errc::inconsistent_streams, "bad initial-case byte");
      std::uint64_t done = 0;
      while (done < rec.seq_len) {
        std::uint64_t run = case_rl.varint();
        if (run == 0 || done + run > rec.seq_len)
          fail(Errc::inconsistent_streams, "case runs disagree with length");
        if (lower)
          for (std::uint64_t i = 0; i < run; ++i) {
            std::uint8_t& c = seq[done + i];
            if (detail::is_upper(c)) c += 32;
          }
        done += run;
        lower ^= 1;
      }
    }

    out.push_back(rec.format == 0 ? '>' : '@');
    out.insert(out.end(), hline.begin(), hline.end());
    bool header_is_last_line = rec.format == 0 && rec.wraps.empty();
    if (!(header_is_last_line && no_final_nl)) out.push_back('\n');

    std::uint64_t spos = 0;
    std::uint64_t lines_left = 0;
    for (const auto& [w, rep] : rec.wraps) lines_left += rep;
    for (const auto& [w, rep] : rec.wraps) {
      for (std::uint64_t k = 0; k < rep; ++k) {
        out.insert(out.end(), seq.begin() + spos, seq.begin() + spos + w);
        spos += w;
        --lines_left;
        bool is_final_line = lines_left == 0 && rec.format == 0;
        if (!(is_final_line && no_final_nl)) out.push_back('\n');
      }
    }

    if (rec.format == 1) {
      out.push_back('+');
      if (rec.flags & kRecPlusRepeatsHeader) out.insert(out.end(), hline.begin(), hline.end());
      out.push_back('\n');
      if (qual_pos + rec.seq_len > s.quality.size())
        fail(Errc::inconsistent_streams, "quality stream shorter than ctrl lengths");
      out.insert(out.end(), s.quality.begin() + qual_pos, s.quality.begin() + qual_pos + rec.seq_len);
      qual_pos += rec.seq_len;
      if (!no_final_nl) out.push_back('\n');
    }
  }

  if (nuc_pos != s.nuc.size()) fail(Errc::inconsistent_streams, "nuc stream longer than ctrl lengths");
  if (qual_pos != s.quality.size()) fail(Errc::inconsistent_streams, "quality stream length mismatch");
  if (!hdr.empty()) fail(Errc::inconsistent_streams, "hdr stream length mismatch");
  if (!case_rl.empty()) fail(Errc::inconsistent_streams, "case stream length mismatch");
  return out;
}

// Byte extents of each record inside the nuc and case_rl streams; the
// container's record index tier is built from these.
struct RecordSpan {
  std::uint64_t nuc_off = 0, nuc_len = 0;
  std::uint64_t case_off = 0, case_len = 0;
};

inline std::vector<RecordSpan> record_spans(ByteView ctrl, ByteView case_rl) {
  std::vector<CtrlRecord> recs = parse_ctrl(ctrl);
  ByteReader cr(case_rl, Errc::inconsistent_streams);
  std::vector<RecordSpan> spans;
  spans.reserve(recs.size());
  std::uint64_t nuc_off = 0;
  for (const CtrlRecord& rec : recs) {
    RecordSpan sp;
    sp.nuc_off = nuc_off;
    sp.nuc_len = rec.seq_len;
    sp.case_off = cr.pos();
    if (rec.seq_len > 0) {
      cr.u8();
      std::uint64_t done = 0;
      while (done < rec.seq_len) done += cr.varint();
      if (done != rec.seq_len) fail(Errc::inconsistent_streams, "case runs overrun record");
    }
    sp.case_len = cr.pos() - sp.case_off;
    nuc_off += rec.seq_len;
    spans.push_back(sp);
  }
  return spans;
}

}  // namespace hecate
