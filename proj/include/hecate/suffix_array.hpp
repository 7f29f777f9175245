#pragma once

// Suffix array construction by induced sorting (SA-IS), templated on the
// index type so blocks past the 32-bit range dispatch to a 64-bit path.

#include <cstdint>
#include <vector>

#include "hecate/bytes.hpp"

namespace hecate {

namespace detail {

// Core recursion. Preconditions: n >= 1, s[n-1] == 0, 0 is unique and
// smallest, all values < alphabet. Sym is uint16 at the byte level (halving
// traffic on the hottest array) and Index in recursions.
template <class Index, class Sym>
void sais_rec(const Sym* s, Index n, Index alphabet, Index* sa) {
  if (n == 1) {
    sa[0] = 0;
    return;
  }

  std::vector<std::uint8_t> is_s(static_cast<std::size_t>(n));
  is_s[n - 1] = 1;
  for (Index i = n - 2; i >= 0; --i)
    is_s[i] = s[i] < s[i + 1] || (s[i] == s[i + 1] && is_s[i + 1]);
  auto is_lms = [&](Index i) { return i > 0 && is_s[i] && !is_s[i - 1]; };

  std::vector<Index> cnt(static_cast<std::size_t>(alphabet), 0);
  std::vector<Index> bkt(static_cast<std::size_t>(alphabet));
  for (Index i = 0; i < n; ++i) ++cnt[s[i]];
  auto heads = [&] {
    Index sum = 0;
    for (Index c = 0; c < alphabet; ++c) {
      bkt[c] = sum;
      sum += cnt[c];
    }
  };
  auto tails = [&] {
    Index sum = 0;
    for (Index c = 0; c < alphabet; ++c) {
      sum += cnt[c];
      bkt[c] = sum;
    }
  };

  auto induce = [&] {
    heads();
    for (Index i = 0; i < n; ++i) {
      Index j = sa[i];
      if (j > 0 && !is_s[j - 1]) sa[bkt[s[j - 1]]++] = j - 1;
    }
    tails();
    for (Index i = n - 1; i >= 0; --i) {
      Index j = sa[i];
      if (j > 0 && is_s[j - 1]) sa[--bkt[s[j - 1]]] = j - 1;
    }
  };

  // Round 1: seed with LMS positions in arbitrary order, induce once. LMS
  // substrings then appear in sorted order within sa.
  std::fill(sa, sa + n, Index(-1));
  tails();
  for (Index i = 1; i < n; ++i)
    if (is_lms(i)) sa[--bkt[s[i]]] = i;
  induce();

  // Name sorted LMS substrings. Adjacent LMS positions are >= 2 apart, so
  // pos >> 1 indexes a half-size name table.
  std::vector<Index> lms(static_cast<std::size_t>(n / 2 + 1));
  Index nlms = 0;
  for (Index i = 1; i < n; ++i)
    if (is_lms(i)) ++nlms;
  std::vector<Index> name(static_cast<std::size_t>(n / 2 + 1), Index(-1));

  auto lms_equal = [&](Index a, Index b) {
    if (s[a] != s[b]) return false;
    for (Index k = 1;; ++k) {
      bool alms = is_lms(a + k), blms = is_lms(b + k);
      if (alms && blms) return true;
      if (alms != blms) return false;
      if (s[a + k] != s[b + k]) return false;
    }
  };

  Index names = 0, prev = -1;
  for (Index i = 0; i < n; ++i) {
    Index p = sa[i];
    if (!is_lms(p)) continue;
    if (prev >= 0 && !lms_equal(prev, p)) ++names;
    name[p >> 1] = names;
    prev = p;
  }
  ++names;

  // Reduced string: names of LMS substrings in text order. Its last symbol
  // is the sentinel substring's name 0, still unique and smallest.
  std::vector<Index> s1(static_cast<std::size_t>(nlms));
  {
    Index k = 0;
    for (Index i = 1; i < n; ++i)
      if (is_lms(i)) {
        lms[k] = i;
        s1[k] = name[i >> 1];
        ++k;
      }
  }

  std::vector<Index> sa1(static_cast<std::size_t>(nlms));
  if (names == nlms) {
    for (Index i = 0; i < nlms; ++i) sa1[s1[i]] = i;
  } else {
    sais_rec<Index, Index>(s1.data(), nlms, names, sa1.data());
  }

  // Round 2: seed with LMS suffixes in true sorted order, induce again.
  std::fill(sa, sa + n, Index(-1));
  tails();
  for (Index i = nlms - 1; i >= 0; --i) {
    Index p = lms[sa1[i]];
    sa[--bkt[s[p]]] = p;
  }
  induce();
}

}  // namespace detail

// Suffix array of a byte string (plain suffix order; a virtual sentinel
// smaller than every byte terminates the text).
template <class Index>
std::vector<Index> suffix_array(ByteView text) {
  const std::size_t n = text.size();
  std::vector<Index> out(n);
  if (n == 0) return out;
  std::vector<std::uint16_t> s(n + 1);
  for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<std::uint16_t>(text[i]) + 1;
  s[n] = 0;
  std::vector<Index> sa(n + 1);
  detail::sais_rec<Index, std::uint16_t>(s.data(), static_cast<Index>(n + 1), Index(257), sa.data());
  // sa[0] is the sentinel suffix; drop it.
  for (std::size_t i = 0; i < n; ++i) out[i] = sa[i + 1];
  return out;
}

inline int sa_width_for(std::uint64_t n) { return n < (1ull << 31) ? 32 : 64; }

}  // namespace hecate
