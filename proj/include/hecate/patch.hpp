#pragma once

// Streamwise binary differencing against a reference: greedy left-to-right
// parse into copy/literal descriptors, exact matches found by binary search
// over the reference suffix array, with a q-gram Bloom filter in front to
// skip searches that cannot succeed.
//
// Script serialization, per descriptor:
//   varint (length << 1 | is_copy), then for copies a zigzag varint of the
//   source offset delta from the previous copy's end. Literal payload lives
//   in a separate stream.

#include <cmath>
#include <cstdint>
#include <vector>

#include "hecate/bloom.hpp"
#include "hecate/bytes.hpp"
#include "hecate/error.hpp"
#include "hecate/suffix_array.hpp"

namespace hecate {

inline constexpr std::size_t kMinMatch = 24;
inline constexpr std::size_t kDiffGram = 16;

struct PatchOp {
  bool is_copy = false;
  std::uint64_t length = 0;
  std::uint64_t src = 0;  // reference offset (copies only)
};

struct PatchScript {
  std::vector<PatchOp> ops;
  Bytes literals;

  Bytes serialize() const {
    Bytes out;
    std::uint64_t prev_end = 0;
    for (const PatchOp& op : ops) {
      put_varint(out, (op.length << 1) | (op.is_copy ? 1 : 0));
      if (op.is_copy) {
        put_varint(out, zigzag_encode(static_cast<std::int64_t>(op.src) -
                                      static_cast<std::int64_t>(prev_end)));
        prev_end = op.src + op.length;
      }
    }
    return out;
  }

  static PatchScript parse(ByteView script, ByteView literals) {
    PatchScript ps;
    ps.literals.assign(literals.begin(), literals.end());
    ByteReader rd(script, Errc::corrupt_script);
    std::int64_t prev_end = 0;
    while (!rd.empty()) {
      std::uint64_t v = rd.varint();
      PatchOp op;
      op.is_copy = v & 1;
      op.length = v >> 1;
      if (op.is_copy) {
        std::int64_t src = prev_end + rd.zigzag();
        if (src < 0) fail(Errc::corrupt_script, "copy before reference start");
        op.src = static_cast<std::uint64_t>(src);
        prev_end = src + static_cast<std::int64_t>(op.length);
      }
      ps.ops.push_back(op);
    }
    return ps;
  }
};

// Matcher over one reference stream; shared read-only by concurrent diffs.
class RefIndex {
 public:
  explicit RefIndex(ByteView ref)
      : ref_(ref),
        bloom_(ref.size() >= kDiffGram ? ref.size() - kDiffGram + 1 : 1) {
    if (!ref.empty()) sa_ = suffix_array<std::int64_t>(ref);
    if (ref_.size() >= kDiffGram)
      for (std::size_t i = 0; i + kDiffGram <= ref_.size(); ++i)
        bloom_.insert(gram_key(ref_, i, kDiffGram));
  }

  ByteView ref() const { return ref_; }
  bool gram_may_match(ByteView target, std::size_t pos) const {
    return bloom_.maybe_contains(gram_key(target, pos, kDiffGram));
  }

  // Longest common prefix of target[pos..] against any reference suffix.
  // Binary search finds the insertion point; the longest match borders it.
  void longest_match(ByteView target, std::size_t pos, std::uint64_t& src,
                     std::uint64_t& len) const {
    const std::size_t tn = target.size() - pos;
    std::size_t lo = 0, hi = sa_.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (suffix_less(static_cast<std::size_t>(sa_[mid]), target, pos))
        lo = mid + 1;
      else
        hi = mid;
    }
    src = 0;
    len = 0;
    for (std::size_t cand : {lo, lo - 1}) {
      if (cand >= sa_.size() || (cand == lo - 1 && lo == 0)) continue;
      std::size_t p = static_cast<std::size_t>(sa_[cand]);
      std::size_t l = 0;
      const std::size_t max = std::min(ref_.size() - p, tn);
      while (l < max && ref_[p + l] == target[pos + l]) ++l;
      if (l > len) {
        len = l;
        src = p;
      }
    }
  }

 private:
  bool suffix_less(std::size_t sp, ByteView target, std::size_t tp) const {
    std::size_t i = sp, j = tp;
    while (i < ref_.size() && j < target.size()) {
      if (ref_[i] != target[j]) return ref_[i] < target[j];
      ++i;
      ++j;
    }
    return i == ref_.size() && j < target.size();
  }

  ByteView ref_;
  std::vector<std::int64_t> sa_;
  BloomFilter bloom_;
};

inline PatchScript diff_stream(const RefIndex& ref, ByteView target) {
  PatchScript ps;
  std::size_t pos = 0, lit_start = 0;
  auto flush_literal = [&](std::size_t end) {
    if (end > lit_start) {
      ps.ops.push_back({false, end - lit_start, 0});
      ps.literals.insert(ps.literals.end(), target.begin() + lit_start, target.begin() + end);
    }
  };
  while (pos < target.size()) {
    if (!ref.ref().empty() && pos + kDiffGram <= target.size() && ref.gram_may_match(target, pos)) {
      std::uint64_t src, len;
      ref.longest_match(target, pos, src, len);
      if (len >= kMinMatch) {
        flush_literal(pos);
        ps.ops.push_back({true, len, src});
        pos += len;
        lit_start = pos;
        continue;
      }
    }
    ++pos;
  }
  flush_literal(target.size());
  return ps;
}

inline PatchScript diff_stream(ByteView reference, ByteView target) {
  RefIndex idx(reference);
  return diff_stream(idx, target);
}

inline Bytes apply_patch(ByteView reference, const PatchScript& ps) {
  Bytes out;
  std::size_t lit_pos = 0;
  for (const PatchOp& op : ps.ops) {
    if (op.is_copy) {
      if (op.src + op.length > reference.size())
        fail(Errc::corrupt_script, "copy beyond reference bounds");
      out.insert(out.end(), reference.begin() + op.src, reference.begin() + op.src + op.length);
    } else {
      if (lit_pos + op.length > ps.literals.size())
        fail(Errc::corrupt_script, "literal stream exhausted");
      out.insert(out.end(), ps.literals.begin() + lit_pos, ps.literals.begin() + lit_pos + op.length);
      lit_pos += op.length;
    }
  }
  if (lit_pos != ps.literals.size()) fail(Errc::corrupt_script, "unconsumed literal bytes");
  return out;
}

// Substitution-channel bound on the target's conditional information
// content given the reference: h2(p) + p*log2(sigma-1) bits per symbol.
inline double conditional_entropy_bound(double p, double sigma) {
  double h2 = 0.0;
  if (p > 0.0 && p < 1.0) h2 = -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
  double tail = sigma > 2.0 ? p * std::log2(sigma - 1.0) : 0.0;
  return h2 + tail;
}

}  // namespace hecate
