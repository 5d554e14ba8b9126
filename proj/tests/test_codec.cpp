#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "opiqsdc/bits.hpp"
#include "opiqsdc/codec.hpp"
#include "opiqsdc/gf2.hpp"

using namespace opiqsdc;
using doctest::Approx;

namespace {

ChannelWord bsc(const BitVec& x, double p, Rng& rng, double erase = 0.0) {
  ChannelWord out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool e = bernoulli(rng, erase);
    const bool f = bernoulli(rng, p);
    out[i] = e ? kErased : static_cast<std::int8_t>(x[i] ^ f);
  }
  return out;
}

}  // namespace

TEST_CASE("byte packing") {
  const std::vector<std::uint8_t> bytes{0x01, 0x80, 0xff, 0x5a};
  const BitVec bits = bytes_to_bits(bytes);
  CHECK(bits.size() == 32);
  CHECK(bits[0] == 1);
  CHECK(bits[15] == 1);
  CHECK(bits_to_bytes(bits) == bytes);
  CHECK(bits_to_bytes(BitVec{1, 0, 1}) == std::vector<std::uint8_t>{0x05});
}

TEST_CASE("gf2 products and elimination") {
  Rng rng(4);
  const Gf2Matrix a = Gf2Matrix::random(40, 70, rng);
  const BitVec x = random_bits(rng, 70), y = random_bits(rng, 40);
  const BitVec ax = a.multiply(x);
  for (std::size_t r = 0; r < 40; ++r) {
    unsigned acc = 0;
    for (std::size_t c = 0; c < 70; ++c) acc ^= a.get(r, c) & x[c];
    CHECK(ax[r] == acc);
  }
  const BitVec ya = a.left_multiply(y);
  for (std::size_t c = 0; c < 70; ++c) {
    unsigned acc = 0;
    for (std::size_t r = 0; r < 40; ++r) acc ^= a.get(r, c) & y[r];
    CHECK(ya[c] == acc);
  }
  Gf2Matrix red = a;
  const auto piv = red.reduce(70);
  CHECK(piv.size() == 40);  // a random 40 x 70 matrix is full rank with overwhelming probability
  for (std::size_t i = 0; i < piv.size(); ++i)
    for (std::size_t r = 0; r < red.rows(); ++r) CHECK(red.get(r, piv[i]) == (r == i));

  std::vector<std::size_t> all(70);
  for (std::size_t i = 0; i < 70; ++i) all[i] = i;
  const auto sol = solve_left(a, all, ya);
  REQUIRE(sol.has_value());
  CHECK(*sol == y);
  const std::vector<std::size_t> few{0, 1, 2};
  CHECK_FALSE(solve_left(a, few, BitVec(70, 0)).has_value());
}

TEST_CASE("identity codec") {
  IdentityCodec c(8);
  const BitVec m{1, 0, 1, 1, 0, 0, 1, 0};
  CHECK(c.encode(m) == m);
  CHECK(*c.decode(clean_word(m), 0.0) == m);
  ChannelWord w = clean_word(m);
  w[3] = kErased;
  CHECK_FALSE(c.decode(w, 0.0).has_value());
  CHECK_THROWS_AS(c.encode(BitVec(7)), std::invalid_argument);
}

TEST_CASE("repetition-3 failure probability") {
  CHECK(repetition3_bit_failure(0.05) == Approx(0.00725).epsilon(1e-14));
  const Repetition3Codec c(100);
  CHECK(c.threshold() == Approx(0.0018273073299832732).epsilon(1e-9));

  // Measured 100-bit block failure at 5% flips against the binomial value 0.51695.
  Rng rng(8);
  const int trials = 4000;
  int fails = 0;
  for (int t = 0; t < trials; ++t) {
    const BitVec m = random_bits(rng, 100);
    const auto out = c.decode(bsc(c.encode(m), 0.05, rng), 0.05);
    fails += !(out && *out == m);
  }
  const double p = 0.51695279494771515;
  CHECK(std::abs(double(fails) / trials - p) < 3.0 * std::sqrt(p * (1 - p) / trials));
}

TEST_CASE("repetition-3 erasures and ties") {
  const Repetition3Codec c(2);
  CHECK(*c.decode(ChannelWord{1, kErased, kErased, 0, 0, 1}, 0.0) == BitVec{1, 0});
  CHECK_FALSE(c.decode(ChannelWord{1, 0, kErased, 0, 0, 0}, 0.0).has_value());
  CHECK_FALSE(c.decode(ChannelWord{kErased, kErased, kErased, 0, 0, 0}, 0.0).has_value());
}

TEST_CASE("ldpc code structure and clean round trip") {
  const LdpcCodec c(512, 1024, 3);
  CHECK(c.rate() == 0.5);
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const BitVec m = random_bits(rng, 512);
    const BitVec x = c.encode(m);
    CHECK(x.size() == 1024);
    CHECK(c.is_codeword(x));
    const BitVec syn = c.parity_check().multiply(x);
    CHECK(std::count(syn.begin(), syn.end(), 1) == 0);
    CHECK(*c.decode(clean_word(x), 0.0) == m);
  }
}

TEST_CASE("ldpc corrects noise below threshold") {
  const LdpcCodec c(512, 1024, 5);
  CHECK(c.threshold() > 0.02);
  Rng rng(13);
  int ok = 0;
  for (int t = 0; t < 100; ++t) {
    const BitVec m = random_bits(rng, 512);
    const auto out = c.decode(bsc(c.encode(m), 0.02, rng, 0.1), 0.02);
    ok += out && *out == m;
  }
  CHECK(ok >= 97);
}

TEST_CASE("ldpc reports failure far above threshold") {
  const LdpcCodec c(512, 1024, 5);
  Rng rng(14);
  int wrong = 0, flagged = 0;
  for (int t = 0; t < 50; ++t) {
    const BitVec m = random_bits(rng, 512);
    const auto out = c.decode(bsc(c.encode(m), 0.2, rng), 0.2);
    if (!out) ++flagged;
    else if (*out != m) ++wrong;
  }
  CHECK(flagged == 50);
  CHECK(wrong == 0);
}

TEST_CASE("dense code erasure and error decoding") {
  const DenseLinearCodec c(32, 64, 9);
  Rng rng(15);
  int ok = 0;
  for (int t = 0; t < 200; ++t) {
    const BitVec m = random_bits(rng, 32);
    const BitVec x = c.encode(m);
    CHECK(BitVec(x.begin(), x.begin() + 32) == m);  // systematic
    CHECK(*c.decode(clean_word(x), 0.0) == m);
    const auto out = c.decode(bsc(x, 0.0, rng, 0.3), 0.0);
    ok += out && *out == m;
  }
  CHECK(ok >= 196);

  int fixed = 0;
  for (int t = 0; t < 100; ++t) {
    const BitVec m = random_bits(rng, 32);
    ChannelWord w = clean_word(c.encode(m));
    w[rng() % 64] ^= 1;
    const auto out = c.decode(w, 0.02);
    fixed += out && *out == m;
  }
  CHECK(fixed >= 95);
}

TEST_CASE("codec factory") {
  CHECK(make_codec(CodecKind::Identity, 10, 10, 1)->block_length() == 10);
  CHECK(make_codec(CodecKind::Repetition3, 10, 0, 1)->block_length() == 30);
  CHECK(make_codec(CodecKind::Ldpc, 100, 200, 1)->name() == "ldpc");
  CHECK(make_codec(CodecKind::Dense, 16, 32, 1)->name() == "dense");
  CHECK(parse_codec_kind("repetition3") == CodecKind::Repetition3);
  CHECK_THROWS(parse_codec_kind("turbo"));
  for (auto k : {CodecKind::Identity, CodecKind::Repetition3, CodecKind::Ldpc, CodecKind::Dense})
    CHECK(parse_codec_kind(to_string(k)) == k);
}

TEST_CASE("seeded construction is reproducible") {
  const LdpcCodec a(64, 128, 77), b(64, 128, 77), c(64, 128, 78);
  CHECK(a.parity_check() == b.parity_check());
  CHECK_FALSE(a.parity_check() == c.parity_check());
  CHECK(DenseLinearCodec(16, 40, 3).generator() == DenseLinearCodec(16, 40, 3).generator());
}
