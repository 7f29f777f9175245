#pragma once

// Blockwise Markov expert-competition codec over 2-bit or 4-bit nucleotide
// codes. Five experts (context order k, count scaling 2^alpha, non-winner
// update policy rho, reverse-complement coupling, saturation bound) are
// scored per 80-symbol block with a fixed-point ln surrogate of coding cost;
// the winner is range-coded under an order-5 model over previous winners and
// then codes the block's ACGT symbols. In 4-bit mode non-ACGT codes travel
// through a separate gate/index path and never touch expert counts.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hecate/bytes.hpp"
#include "hecate/coder.hpp"
#include "hecate/error.hpp"

namespace hecate {

inline constexpr int kMixBlockSymbols = 80;

struct ExpertParams {
  int order;           // k, context length in symbols
  int alpha;           // count scaling exponent
  bool update_losers;  // rho: non-selected experts still update counts
  bool rc;             // reverse-complement coupling
  std::uint32_t c_max; // counter saturation threshold
  int cell_bits;       // counter storage width: 4, 8 or 16
};

enum class MixProfile : std::uint8_t { lite = 0, full = 1 };

inline std::vector<ExpertParams> mix_profile_params(MixProfile p) {
  std::vector<ExpertParams> v = {
      {3, 0, false, false, 65535, 16},
      {7, 0, false, false, 1023, 16},
      {11, 2, false, true, 255, 8},
  };
  if (p == MixProfile::full) {
    v.push_back({15, 6, true, true, 15, 4});
    v.push_back({13, 9, true, false, 0, 8});
  }
  return v;
}

inline std::uint64_t expert_table_bytes(const ExpertParams& p) {
  return (4ull << (2 * p.order)) * static_cast<std::uint64_t>(p.cell_bits) / 8;
}

inline int comp_symbol(int x) { return 3 - x; }

// Forward base-4 shift register: drop the oldest symbol, append x.
inline std::uint64_t advance_context(std::uint64_t h, int k, int x) {
  const std::uint64_t mask = (1ull << (2 * (k - 1))) - 1;
  return ((h & mask) << 2) + static_cast<std::uint64_t>(x);
}

// Reverse coupling: the complemented symbol enters at the high digit, so the
// register always holds the reverse complement of the last k symbols.
inline std::uint64_t advance_context_rc(std::uint64_t h, int k, int x) {
  return (h >> 2) + (static_cast<std::uint64_t>(comp_symbol(x)) << (2 * (k - 1)));
}

// --- fixed-point natural log, micro-nats ---

namespace detail {

inline constexpr std::int64_t kLnFixOne = 1000000;
inline constexpr std::int64_t kLn2Fix = 693147;  // floor(1e6 * ln 2)
inline constexpr std::size_t kLnTableSize = 1u << 20;

inline const std::uint32_t* ln_fix_table() {
  static std::vector<std::uint32_t> table = [] {
    std::vector<std::uint32_t> t(kLnTableSize + 1, 0);
    for (std::size_t i = 1; i < t.size(); ++i)
      t[i] = static_cast<std::uint32_t>(std::log(static_cast<double>(i)) * 1e6);
    return t;
  }();
  return table.data();
}

}  // namespace detail

inline std::int64_t ln_fix(std::uint64_t v) {
  const std::uint32_t* t = detail::ln_fix_table();
  if (v <= detail::kLnTableSize) return t[v];
  int b = 0;
  while ((v >> b) > detail::kLnTableSize) ++b;
  return static_cast<std::int64_t>(t[v >> b]) + b * detail::kLn2Fix;
}

// --- counter storage ---

class CountTable {
 public:
  void init(int order, int cell_bits) {
    cell_bits_ = cell_bits;
    const std::uint64_t cells = 4ull << (2 * order);
    switch (cell_bits) {
      case 16: w16_.assign(cells, 0); break;
      case 8: w8_.assign(cells, 0); break;
      case 4: w8_.assign((cells + 1) / 2, 0); break;
      default: fail(Errc::invalid_config, "unsupported counter width");
    }
  }

  std::uint32_t get(std::uint64_t ctx, int s) const {
    const std::uint64_t i = ctx * 4 + static_cast<std::uint64_t>(s);
    switch (cell_bits_) {
      case 16: return w16_[i];
      case 8: return w8_[i];
      default: return (w8_[i >> 1] >> (4 * (i & 1))) & 15;
    }
  }

  void put(std::uint64_t ctx, int s, std::uint32_t v) {
    const std::uint64_t i = ctx * 4 + static_cast<std::uint64_t>(s);
    switch (cell_bits_) {
      case 16: w16_[i] = static_cast<std::uint16_t>(v); break;
      case 8: w8_[i] = static_cast<std::uint8_t>(v); break;
      default: {
        const int sh = 4 * static_cast<int>(i & 1);
        w8_[i >> 1] = static_cast<std::uint8_t>((w8_[i >> 1] & ~(0xf << sh)) | (v << sh));
        break;
      }
    }
  }

 private:
  int cell_bits_ = 8;
  std::vector<std::uint16_t> w16_;
  std::vector<std::uint8_t> w8_;
};

// Optional instrumentation shared by encoder and decoder runs.
struct MixStats {
  std::uint64_t blocks = 0;
  double selector_bits = 0;                       // exact model cost of winner indices
  std::uint64_t acgt_writes_at_unknown = 0;       // must stay zero
  std::vector<std::uint64_t>* block_state_hashes = nullptr;
};

namespace detail {

struct Expert {
  ExpertParams p;
  CountTable counts;
  std::uint64_t fctx = 0;
  std::uint64_t rctx = 0;

  void init(const ExpertParams& params) {
    p = params;
    counts.init(p.order, p.cell_bits);
  }

  void frequencies(std::uint64_t ctx, std::uint32_t f[4], std::uint32_t& total) const {
    total = 0;
    for (int s = 0; s < 4; ++s) {
      f[s] = 1 + (counts.get(ctx, s) << p.alpha);
      total += f[s];
    }
  }

  // Count update with the saturation rule: at c_max > 0 halve the whole
  // context before incrementing; at c_max == 0 reset it.
  void observe(std::uint64_t ctx, int s) {
    if (p.c_max == 0) {
      for (int i = 0; i < 4; ++i) counts.put(ctx, i, 0);
      counts.put(ctx, s, 1);
      return;
    }
    const std::uint32_t c = counts.get(ctx, s);
    if (c == p.c_max) {
      for (int i = 0; i < 4; ++i) counts.put(ctx, i, counts.get(ctx, i) >> 1);
      counts.put(ctx, s, counts.get(ctx, s) + 1);
    } else {
      counts.put(ctx, s, c + 1);
    }
  }
};

// Order-5 adaptive model over expert indices: context is the base-M register
// of the last five winners. Counts start at 1, the winner gains 24, the
// context rescales when its total passes 2^12.
class SelectorModel {
 public:
  void init(int experts) {
    m_ = experts;
    std::uint64_t ctxs = 1;
    for (int i = 0; i < 5; ++i) ctxs *= static_cast<std::uint64_t>(m_);
    freq_.assign(ctxs * m_, 1);
    total_.assign(ctxs, static_cast<std::uint32_t>(m_));
    ctx_ = 0;
    ctx_mod_ = ctxs / m_;
  }

  int experts() const { return m_; }

  double cost_bits(int winner) const {
    const std::uint16_t* f = &freq_[ctx_ * m_];
    return std::log2(static_cast<double>(total_[ctx_]) / f[winner]);
  }

  void encode(RangeEncoder& rc, int winner) const {
    const std::uint16_t* f = &freq_[ctx_ * m_];
    std::uint32_t lo = 0;
    for (int i = 0; i < winner; ++i) lo += f[i];
    rc.encode(lo, lo + f[winner], total_[ctx_]);
  }

  int decode(RangeDecoder& rc) const {
    const std::uint16_t* f = &freq_[ctx_ * m_];
    std::uint32_t target = rc.decode_target(total_[ctx_]);
    std::uint32_t lo = 0;
    int sym = 0;
    while (sym < m_ - 1 && lo + f[sym] <= target) lo += f[sym++];
    rc.consume(lo, lo + f[sym], total_[ctx_]);
    return sym;
  }

  void update_and_advance(int winner) {
    std::uint16_t* f = &freq_[ctx_ * m_];
    f[winner] = static_cast<std::uint16_t>(f[winner] + 24);
    total_[ctx_] += 24;
    if (total_[ctx_] > (1u << 12)) {
      std::uint32_t t = 0;
      for (int i = 0; i < m_; ++i) {
        f[i] = static_cast<std::uint16_t>((f[i] + 1) >> 1);
        t += f[i];
      }
      total_[ctx_] = t;
    }
    ctx_ = (ctx_ % ctx_mod_) * m_ + static_cast<std::uint64_t>(winner);
  }

  std::uint64_t context() const { return ctx_; }

 private:
  int m_ = 0;
  std::uint64_t ctx_ = 0, ctx_mod_ = 1;
  std::vector<std::uint16_t> freq_;
  std::vector<std::uint32_t> total_;
};

}  // namespace detail

class ExpertBank {
 public:
  ExpertBank(MixProfile profile, int width_bits, MixStats* stats = nullptr)
      : profile_(profile), width_(width_bits), stats_(stats) {
    for (const ExpertParams& p : mix_profile_params(profile)) {
      experts_.emplace_back();
      experts_.back().init(p);
    }
    selector_.init(static_cast<int>(experts_.size()));
    ring_sym_.fill(0);
    ring_acgt_.fill(0);
  }

  int expert_count() const { return static_cast<int>(experts_.size()); }
  const ExpertParams& params(int m) const { return experts_[m].p; }
  std::uint64_t forward_context(int m) const { return experts_[m].fctx; }
  std::uint64_t reverse_context(int m) const { return experts_[m].rctx; }
  std::uint32_t count(int m, std::uint64_t ctx, int s) const { return experts_[m].counts.get(ctx, s); }

  // Test hook: preload a count cell.
  void set_count(int m, std::uint64_t ctx, int s, std::uint32_t v) { experts_[m].counts.put(ctx, s, v); }

  // Frequency estimate of one expert for symbol s at its live context.
  void predict_symbol(int m, std::uint32_t f[4], std::uint32_t& total) const {
    experts_[m].frequencies(experts_[m].fctx, f, total);
  }

  // Scores every expert over one block (at most 80 symbols). Counts stay
  // frozen; context registers advance speculatively on copies. Non-ACGT
  // codes cost nothing here and advance contexts with placeholder 0.
  std::vector<std::int64_t> score_block(std::span<const std::uint8_t> block) const {
    std::vector<std::int64_t> cost(experts_.size(), 0);
    for (std::size_t m = 0; m < experts_.size(); ++m) {
      const detail::Expert& e = experts_[m];
      std::uint64_t h = e.fctx;
      std::int64_t c = 0;
      for (std::uint8_t code : block) {
        if (code < 4) {
          std::uint32_t f[4], total;
          e.frequencies(h, f, total);
          c += ln_fix(total) - ln_fix(f[code]);
          h = advance_context(h, e.p.order, code);
        } else {
          h = advance_context(h, e.p.order, 0);
        }
      }
      cost[m] = c;
    }
    return cost;
  }

  int pick_winner(const std::vector<std::int64_t>& cost) const {
    int best = 0;
    for (int m = 1; m < static_cast<int>(cost.size()); ++m)
      if (cost[m] < cost[best]) best = m;
    return best;
  }

  // Model-state fingerprint; identical encoder/decoder histories must agree.
  std::uint64_t state_fingerprint() const {
    std::uint64_t h = write_hash_ ^ mix64(selector_.context());
    for (const detail::Expert& e : experts_) h = mix64(h ^ e.fctx) ^ mix64(e.rctx + 0x9e37);
    return h;
  }

  // --- shared per-symbol model update (encoder and decoder) ---
  void apply_symbol(std::uint8_t code, int winner) {
    const bool is_acgt = code < 4;
    const int sym = is_acgt ? code : 0;  // placeholder keeps contexts in phase
    for (std::size_t m = 0; m < experts_.size(); ++m) {
      detail::Expert& e = experts_[m];
      const bool full = (static_cast<int>(m) == winner) || e.p.update_losers;
      if (full && is_acgt) bump(e, e.fctx, code, is_acgt);
      e.fctx = advance_context(e.fctx, e.p.order, sym);
      if (e.p.rc) {
        e.rctx = advance_context_rc(e.rctx, e.p.order, sym);
        // The reverse-strand observation pairs the reverse-complemented
        // window with the complemented symbol k positions back; both ends
        // must be real ACGT observations.
        const std::uint64_t k = static_cast<std::uint64_t>(e.p.order);
        if (full && is_acgt && pos_ >= k && ring_acgt_[(pos_ - k) & 15])
          bump(e, e.rctx, comp_symbol(ring_sym_[(pos_ - k) & 15]), is_acgt);
      }
    }
    ring_sym_[pos_ & 15] = static_cast<std::uint8_t>(sym);
    ring_acgt_[pos_ & 15] = is_acgt ? 1 : 0;
    ++pos_;
  }

  detail::SelectorModel& selector() { return selector_; }
  AdaptiveModel<2>& z_model() { return z_model_; }
  AdaptiveModel<2>& gate_model() { return gate_model_; }
  AdaptiveModel<12>& unknown_model() { return unknown_model_; }
  MixStats* stats() { return stats_; }
  int width_bits() const { return width_; }
  MixProfile profile() const { return profile_; }

  void end_block() {
    if (stats_) {
      ++stats_->blocks;
      if (stats_->block_state_hashes) stats_->block_state_hashes->push_back(state_fingerprint());
    }
  }

 private:
  void bump(detail::Expert& e, std::uint64_t ctx, int s, bool at_acgt_position) {
    if (stats_ && !at_acgt_position) ++stats_->acgt_writes_at_unknown;
    e.observe(ctx, s);
    write_hash_ = mix64(write_hash_ ^ (ctx * 4 + static_cast<std::uint64_t>(s)));
  }

  MixProfile profile_;
  int width_;
  std::vector<detail::Expert> experts_;
  detail::SelectorModel selector_;
  AdaptiveModel<2> z_model_{24, 1u << 12};
  AdaptiveModel<2> gate_model_{24, 1u << 12};
  AdaptiveModel<12> unknown_model_{24, 1u << 12};
  std::array<std::uint8_t, 16> ring_sym_{};
  std::array<std::uint8_t, 16> ring_acgt_{};
  std::uint64_t pos_ = 0;
  std::uint64_t write_hash_ = 0x243f6a8885a308d3ull;
  MixStats* stats_ = nullptr;
};

namespace detail {

// Frequencies actually handed to the range coder: scaled down until the
// total fits the coder's 2^16 contract (only the order-3 expert can
// overflow it), every entry kept nonzero.
inline void coder_frequencies(const std::uint32_t f[4], std::uint32_t g[4], std::uint32_t& total) {
  total = f[0] + f[1] + f[2] + f[3];
  int shift = 0;
  while (total > kRcBot) {
    ++shift;
    total = 0;
    for (int s = 0; s < 4; ++s) {
      g[s] = std::max<std::uint32_t>(1, f[s] >> shift);
      total += g[s];
    }
  }
  if (shift == 0)
    for (int s = 0; s < 4; ++s) g[s] = f[s];
}

inline void encode_acgt(RangeEncoder& rc, ExpertBank& bank, int winner, int code) {
  std::uint32_t f[4], g[4], total;
  bank.predict_symbol(winner, f, total);
  coder_frequencies(f, g, total);
  std::uint32_t lo = 0;
  for (int s = 0; s < code; ++s) lo += g[s];
  rc.encode(lo, lo + g[code], total);
}

inline int decode_acgt(RangeDecoder& rc, ExpertBank& bank, int winner) {
  std::uint32_t f[4], g[4], total;
  bank.predict_symbol(winner, f, total);
  coder_frequencies(f, g, total);
  std::uint32_t target = rc.decode_target(total);
  std::uint32_t lo = 0;
  int sym = 0;
  while (sym < 3 && lo + g[sym] <= target) lo += g[sym++];
  rc.consume(lo, lo + g[sym], total);
  return sym;
}

}  // namespace detail

// Payload: u8 profile | u8 width | varint n_symbols | range-coder bytes.
inline Bytes mix_compress(std::span<const std::uint8_t> codes, int width_bits,
                          MixProfile profile, MixStats* stats = nullptr) {
  if (width_bits != 2 && width_bits != 4) fail(Errc::invalid_config, "mix width must be 2 or 4");
  const std::uint8_t code_limit = width_bits == 2 ? 4 : 16;
  for (std::uint8_t c : codes)
    if (c >= code_limit) fail(Errc::invalid_config, "symbol code outside the width's alphabet");
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(profile));
  out.push_back(static_cast<std::uint8_t>(width_bits));
  put_varint(out, codes.size());

  ExpertBank bank(profile, width_bits, stats);
  RangeEncoder rc;
  for (std::size_t off = 0; off < codes.size(); off += kMixBlockSymbols) {
    const std::size_t len = std::min<std::size_t>(kMixBlockSymbols, codes.size() - off);
    const auto block = codes.subspan(off, len);

    const int winner = bank.pick_winner(bank.score_block(block));
    if (stats) stats->selector_bits += bank.selector().cost_bits(winner);
    bank.selector().encode(rc, winner);
    bank.selector().update_and_advance(winner);

    bool z = false;
    if (width_bits == 4) {
      for (std::uint8_t c : block) z |= c >= 4;
      bank.z_model().encode(rc, z ? 1 : 0);
      bank.z_model().update(z ? 1 : 0);
    }

    for (std::uint8_t code : block) {
      if (width_bits == 4 && z) {
        const int unk = code >= 4;
        bank.gate_model().encode(rc, unk);
        bank.gate_model().update(unk);
        if (unk) {
          bank.unknown_model().encode(rc, code - 4);
          bank.unknown_model().update(code - 4);
        } else {
          detail::encode_acgt(rc, bank, winner, code);
        }
      } else {
        detail::encode_acgt(rc, bank, winner, code);
      }
      bank.apply_symbol(code, winner);
    }
    bank.end_block();
  }
  Bytes payload = rc.finish();
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

inline Bytes mix_decompress(ByteView payload, MixStats* stats = nullptr) {
  ByteReader rd(payload, Errc::corrupt_payload);
  const std::uint8_t profile_id = rd.u8();
  const std::uint8_t width_bits = rd.u8();
  if (profile_id > 1) fail(Errc::corrupt_payload, "unknown expert profile");
  if (width_bits != 2 && width_bits != 4) fail(Errc::corrupt_payload, "bad symbol width");
  const std::uint64_t n = rd.varint();
  const MixProfile profile = static_cast<MixProfile>(profile_id);

  ExpertBank bank(profile, width_bits, stats);
  RangeDecoder rc(payload.subspan(rd.pos()));
  Bytes codes;
  codes.reserve(n);
  for (std::uint64_t off = 0; off < n; off += kMixBlockSymbols) {
    const std::uint64_t len = std::min<std::uint64_t>(kMixBlockSymbols, n - off);

    const int winner = bank.selector().decode(rc);
    if (winner >= bank.expert_count()) fail(Errc::corrupt_payload, "selector index out of range");
    if (stats) stats->selector_bits += bank.selector().cost_bits(winner);
    bank.selector().update_and_advance(winner);

    bool z = false;
    if (width_bits == 4) {
      z = bank.z_model().decode(rc) != 0;
      bank.z_model().update(z ? 1 : 0);
    }

    for (std::uint64_t t = 0; t < len; ++t) {
      std::uint8_t code;
      if (width_bits == 4 && z) {
        const int unk = bank.gate_model().decode(rc);
        bank.gate_model().update(unk);
        if (unk) {
          const int v = bank.unknown_model().decode(rc);
          bank.unknown_model().update(v);
          code = static_cast<std::uint8_t>(v + 4);
        } else {
          code = static_cast<std::uint8_t>(detail::decode_acgt(rc, bank, winner));
        }
      } else {
        code = static_cast<std::uint8_t>(detail::decode_acgt(rc, bank, winner));
      }
      codes.push_back(code);
      bank.apply_symbol(code, winner);
    }
    bank.end_block();
  }
  return codes;
}

}  // namespace hecate
