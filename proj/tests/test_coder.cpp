#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "hecate/coder.hpp"
#include "support/rng.hpp"

using namespace hecate;
using testsupport::Rng;

TEST_CASE("flush tails are frozen") {
  SECTION("binary coder: 5 tail bytes") {
    BinEncoder e;
    CHECK(e.finish() == Bytes{0x00, 0x00, 0x00, 0x00, 0x00});
  }
  SECTION("binary coder golden sequence") {
    BinEncoder e;
    const std::uint32_t qs[] = {1, 70000, 131071, 65536, 40000, 3, 131000, 12345};
    const int bits[] = {0, 1, 1, 0, 1, 0, 0, 1};
    for (int i = 0; i < 8; ++i) e.encode(bits[i], qs[i]);
    CHECK(e.finish() == Bytes{0x00, 0x59, 0x35, 0xcb, 0x48, 0x00, 0x00});
  }
  SECTION("range coder: 4 tail bytes") {
    RangeEncoder e;
    CHECK(e.finish() == Bytes{0x00, 0x00, 0x00, 0x00});
  }
  SECTION("range coder golden sequence") {
    RangeEncoder e;
    e.encode(0, 1, 4);
    e.encode(3, 4, 4);
    e.encode(1, 2, 3);
    e.encode(100, 65536, 65536);
    e.encode(0, 5, 65536);
    CHECK(e.finish() == Bytes{0x35, 0x57, 0x6a, 0x87, 0x00, 0x00});
  }
}

TEST_CASE("binary coder mirrors any probability schedule") {
  Rng rng(21);
  for (int iter = 0; iter < 20; ++iter) {
    const std::size_t n = 1 + rng.below(20000);
    std::vector<std::uint32_t> qs(n);
    std::vector<int> bits(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Mix extreme and moderate probabilities.
      switch (rng.below(4)) {
        case 0: qs[i] = 1 + rng.below(kProbOne - 1); break;
        case 1: qs[i] = 1; break;
        case 2: qs[i] = kProbOne - 1; break;
        default: qs[i] = 65536; break;
      }
      bits[i] = static_cast<int>(rng.below(2));
    }
    BinEncoder enc;
    for (std::size_t i = 0; i < n; ++i) enc.encode(bits[i], qs[i]);
    Bytes payload = enc.finish();
    BinDecoder dec(to_view(payload));
    for (std::size_t i = 0; i < n; ++i) REQUIRE(dec.decode(qs[i]) == bits[i]);
  }
}

TEST_CASE("binary coder output approaches the entropy bound") {
  SECTION("coin flips at q = 65536 cost one bit each") {
    BinEncoder e;
    Rng rng(22);
    for (int i = 0; i < 1000000; ++i) e.encode(static_cast<int>(rng.below(2)), 65536);
    const std::size_t n = e.finish().size();
    CHECK(n >= 125000 - 16);
    CHECK(n <= 125000 + 16);
  }
  SECTION("near-certain zeros cost almost nothing") {
    BinEncoder e;
    for (int i = 0; i < 1000000; ++i) e.encode(0, 1);
    CHECK(e.finish().size() <= 32);
  }
}

TEST_CASE("coding cost tracks model cost on random schedules") {
  Rng rng(23);
  for (int iter = 0; iter < 5; ++iter) {
    const std::size_t n = 200000;
    BinEncoder e;
    double model_bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t q = 1 + rng.below(kProbOne - 1);
      int bit = rng.chance(static_cast<double>(q) / kProbOne) ? 1 : 0;
      double p = bit ? static_cast<double>(q) / kProbOne : 1.0 - static_cast<double>(q) / kProbOne;
      model_bits += -std::log2(p);
      e.encode(bit, q);
    }
    double out_bits = 8.0 * static_cast<double>(e.finish().size());
    CHECK(out_bits <= model_bits + 64.0 + 0.001 * model_bits);
    CHECK(out_bits + 64.0 >= model_bits);  // cannot beat the model
  }
}

TEST_CASE("range coder uniform four-symbol stream costs two bits per symbol") {
  RangeEncoder e;
  Rng rng(24);
  std::vector<std::uint8_t> syms(1000000);
  for (auto& s : syms) s = static_cast<std::uint8_t>(rng.below(4));
  for (auto s : syms) e.encode(s * 16384u, (s + 1u) * 16384u, 65536);
  Bytes payload = e.finish();
  CHECK(payload.size() >= 250000 - 16);
  CHECK(payload.size() <= 250000 + 16);
  RangeDecoder d(to_view(payload));
  for (auto s : syms) {
    std::uint32_t t = d.decode_target(65536);
    std::uint32_t got = t / 16384;
    REQUIRE(got == s);
    d.consume(got * 16384u, (got + 1u) * 16384u, 65536);
  }
}

TEST_CASE("degenerate single-symbol alphabet carries no payload beyond the tail") {
  RangeEncoder e;
  for (int i = 0; i < 100000; ++i) e.encode(0, 7, 7);
  CHECK(e.finish().size() == 4);
}

TEST_CASE("range coder round-trips an adaptive schedule") {
  Rng rng(25);
  for (int iter = 0; iter < 10; ++iter) {
    const std::size_t n = 1 + rng.below(30000);
    std::vector<int> syms(n);
    for (auto& s : syms) s = static_cast<int>(rng.below(7));
    AdaptiveModel<7> enc_model;
    RangeEncoder enc;
    for (int s : syms) {
      enc_model.encode(enc, s);
      enc_model.update(s);
    }
    Bytes payload = enc.finish();
    AdaptiveModel<7> dec_model;
    RangeDecoder dec(to_view(payload));
    for (int s : syms) {
      REQUIRE(dec_model.decode(dec) == s);
      dec_model.update(s);
    }
  }
}

TEST_CASE("quality codec round-trips and hits expected sizes") {
  SECTION("constant quality compresses to almost nothing") {
    Bytes q(1000000, 'I');
    Bytes payload = quality_compress(to_view(q));
    CHECK(payload.size() < 2048);
    CHECK(quality_decompress(to_view(payload)) == q);
  }
  SECTION("random bytes expand by less than one percent") {
    // Long enough that the per-context learning cost is amortized; the
    // model's stationary noise stays well under the bound.
    Rng rng(26);
    Bytes q = rng.bytes(4 << 20);
    Bytes payload = quality_compress(to_view(q));
    CHECK(payload.size() >= q.size());
    CHECK(payload.size() < q.size() * 101 / 100);
    CHECK(quality_decompress(to_view(payload)) == q);
  }
  SECTION("empty stream is a bare header") {
    Bytes payload = quality_compress({});
    CHECK(payload.size() == 1);
    CHECK(quality_decompress(to_view(payload)).empty());
  }
  SECTION("typical quality strings round-trip") {
    Rng rng(27);
    Bytes q(200000);
    std::uint8_t cur = 'F';
    for (auto& c : q) {
      if (rng.chance(0.2)) cur = static_cast<std::uint8_t>('!' + rng.below(42));
      c = cur;
    }
    Bytes payload = quality_compress(to_view(q));
    CHECK(payload.size() < q.size() / 2);
    CHECK(quality_decompress(to_view(payload)) == q);
  }
}

TEST_CASE("coders are deterministic") {
  Rng rng(28);
  Bytes data = rng.bytes(50000);
  Bytes a = quality_compress(to_view(data));
  Bytes b = quality_compress(to_view(data));
  CHECK(a == b);
}
