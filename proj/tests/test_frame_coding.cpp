#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "opiqsdc/frame_coding.hpp"
#include "opiqsdc/rates.hpp"

using namespace opiqsdc;
using doctest::Approx;

namespace {

ChannelWord through_bsc(const BitVec& x, double p, Rng& rng) {
  ChannelWord out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = static_cast<std::int8_t>(x[i] ^ bernoulli(rng, p));
  return out;
}

BitVec random_message(std::size_t bits, std::uint64_t seed) {
  Rng rng(seed);
  return random_bits(rng, bits);
}

}  // namespace

TEST_CASE("rate condition examples") {
  const InformationEstimate est{0.9, 0.1};
  auto ok = check_rate_conditions({50, 100, 0.8, 2}, est);
  CHECK(ok.accepted());
  CHECK(ok.reason.empty());
  auto sec = check_rate_conditions({80, 100, 0.8, 2}, est);
  CHECK_FALSE(sec.security_ok);
  CHECK(sec.reliability_ok);
  CHECK(sec.reason.find("security") != std::string::npos);
  auto rel = check_rate_conditions({50, 100, 0.95, 2}, est);
  CHECK(rel.security_ok);
  CHECK_FALSE(rel.reliability_ok);
  CHECK(rel.reason.find("reliability") != std::string::npos);
  CHECK(check_rate_conditions({50, 100, 0.8, 1}, std::nullopt).accepted());
  CHECK_THROWS_AS(check_rate_conditions({50, 100, 0.8, 2}, std::nullopt), std::logic_error);
  CHECK_THROWS_AS(check_rate_conditions({0, 100, 0.8, 1}, est), std::invalid_argument);
  CHECK_THROWS_AS(check_rate_conditions({10, 100, 1.5, 1}, est), std::invalid_argument);
}

TEST_CASE("SSTS pool") {
  SstsPool pool;
  CHECK(pool.available() == 0);
  CHECK_THROWS_AS(pool.take(1), SstsUnderflow);
  pool.append(BitVec(10, 1));
  CHECK_THROWS_AS(ssts_encrypt(BitVec(16, 0), pool), SstsUnderflow);
  CHECK(pool.available() == 10);  // refusal leaves the pool untouched
  CHECK(pool.take(4) == BitVec(4, 1));
  CHECK(pool.consumed_count() == 4);

  // Compaction keeps the observable state.
  SstsPool a, b;
  const BitVec big = random_message(10000, 2);
  a.append(big);
  b.append(big);
  a.take(9000);
  b.take(9000);
  a.append(BitVec(3, 0));
  b.append(BitVec(3, 0));
  CHECK(a == b);
  CHECK(a.available() == 1003);
  CHECK(a.consumed_count() == 9000);
}

TEST_CASE("one-time pad and mask are involutions") {
  const BitVec m = random_message(1024, 3);
  const BitVec key = random_message(1024, 4);
  SstsPool alice, bob;
  alice.append(key);
  bob.append(key);
  const BitVec y = ssts_encrypt(m, alice);
  CHECK(y == xor_bits(m, key));
  CHECK(ssts_decrypt(y, bob) == m);

  SstsPool zero;
  zero.append(key);
  CHECK(ssts_encrypt(BitVec(64, 0), zero) == BitVec(key.begin(), key.begin() + 64));

  const Masked mk = mask(m, 99);
  CHECK(unmask(mk.C, mk.L) == m);
  CHECK(xor_bits(m, BitVec(m.size(), 0)) == m);
  CHECK_FALSE(mask(BitVec(128, 0), 1).L == mask(BitVec(128, 0), 2).L);
}

TEST_CASE("precode length checks") {
  const IdentityCodec id(8);
  const BitVec y{1, 0, 1, 0, 1, 1, 1, 0};
  CHECK(precode(y, id) == y);
  CHECK_THROWS_AS(precode(BitVec(7), id), std::invalid_argument);
  const auto dense = make_codec(CodecKind::Dense, 32, 64, 5);
  const BitVec m = random_message(32, 6);
  CHECK(*postdecode(clean_word(precode(m, *dense)), *dense) == m);
  CHECK_THROWS_AS(postdecode(ChannelWord(63, 0), *dense), std::invalid_argument);
}

TEST_CASE("disclosure") {
  const BitVec z = random_message(100, 8);
  const Masked mk = mask(z, 9);
  const ChannelWord received = clean_word(mk.C);
  std::vector<std::size_t> all(100);
  for (std::size_t i = 0; i < 100; ++i) all[i] = i;
  CHECK(disclose_and_unmask(all, mk.L, received) == clean_word(z));
  const ChannelWord none = disclose_and_unmask({}, mk.L, received);
  CHECK(std::count(none.begin(), none.end(), kErased) == 100);
  CHECK_THROWS_AS(disclose_and_unmask({100}, mk.L, received), std::out_of_range);
}

TEST_CASE("secure code") {
  const FrameConfig cfg{256, 1024, 0.5, 1};
  const BitVec x = random_message(256, 10);
  const BitVec z = secure_encode(x, cfg, 77);
  CHECK(z.size() == 1024);
  CHECK(*secure_decode(clean_word(z), cfg, 77) == x);
  CHECK_THROWS_AS(SecureCode({600, 1024, 0.5, 1}, 1), RateViolation);

  // The same X under fresh randomness gives different codewords with the same secret.
  const SecureCode code(cfg, 77);
  Rng r1(1), r2(2);
  const BitVec z1 = code.encode(x, r1), z2 = code.encode(x, r2);
  CHECK(z1 != z2);
  CHECK(code.secret_of(*code.decode_v(clean_word(z1), 0.0)) == x);
  CHECK(code.secret_of(*code.decode_v(clean_word(z2), 0.0)) == x);

  const FrameConfig small{16, 128, 0.4, 1};
  CHECK(SecureCode(small, 3).inner().name() == "dense");
  const BitVec xs = random_message(16, 11);
  CHECK(*secure_decode(clean_word(secure_encode(xs, small, 3)), small, 3) == xs);
}

TEST_CASE("secure code decodes with 20% of positions undisclosed") {
  const FrameConfig cfg{256, 1024, 0.5, 1};
  const SecureCode code(cfg, 21);
  Rng rng(22);
  int ok = 0;
  for (int t = 0; t < 50; ++t) {
    const BitVec x = random_bits(rng, 256);
    const Masked mk = mask(code.encode(x, rng), rng());
    std::vector<std::size_t> shown;
    for (std::size_t i = 0; i < 1024; ++i)
      if (!bernoulli(rng, 0.2)) shown.push_back(i);
    const auto v = code.decode_v(disclose_and_unmask(shown, mk.L, clean_word(mk.C)), 0.0);
    ok += v && code.secret_of(*v) == x;
  }
  CHECK(ok == 50);
}

TEST_CASE("secure code over a 1% BSC") {
  const FrameConfig cfg{256, 1024, 0.5, 1};
  int ok = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t seed = derive_seed(500, t);
    Rng rng(seed);
    const BitVec x = random_bits(rng, 256);
    const auto out = secure_decode(through_bsc(secure_encode(x, cfg, seed), 0.01, rng), cfg, seed, 0.01);
    ok += out && *out == x;
  }
  CHECK(ok >= 297);
}

TEST_CASE("toeplitz hash") {
  const BitVec v = random_message(300, 12);
  CHECK(toeplitz_hash(v, 100, 5) == toeplitz_hash(v, 100, 5));
  CHECK(toeplitz_hash(v, 100, 5).size() == 100);
  CHECK(toeplitz_hash(BitVec(300, 0), 50, 5) == BitVec(50, 0));
  // Linear in v.
  const BitVec w = random_message(300, 13);
  CHECK(toeplitz_hash(xor_bits(v, w), 80, 6) == xor_bits(toeplitz_hash(v, 80, 6), toeplitz_hash(w, 80, 6)));
}

TEST_CASE("pipeline delivers 4 KiB over a noiseless channel") {
  const BitVec m = random_message(8 * 4096, 14);
  SyntheticChannel ch(0.0, 0.0, 0.05);
  SstsPools pools;
  PipelineConfig cfg;
  const auto res = run_frame_pipeline(m, cfg, ch, pools);
  CHECK(res.status == PipelineStatus::Ok);
  CHECK(res.message_match);
  CHECK(res.decoded == m);
  REQUIRE(!res.frames.empty());
  CHECK(res.frames.front().kind == FrameKind::Bootstrap);
  CHECK(res.frames.front().pool_alice > 0);
  CHECK(pools.alice == pools.bob);
  for (const auto& f : res.frames) {
    CHECK(f.transmitted);
    CHECK(f.check.accepted());
    CHECK(f.pools_equal);
    // Extraction respects the secrecy budget of the frame.
    CHECK(double(f.extracted) <= double(f.cfg.n) * (f.cfg.r - f.previous->I_AE) + 1e-9);
  }
}

TEST_CASE("pipeline keeps pools identical through a noisy, lossy run") {
  const BitVec m = random_message(20000, 15);
  SyntheticChannel ch(0.1, 0.005, 0.05);
  SstsPools pools;
  PipelineConfig cfg;
  cfg.rate_margin = 0.7;
  cfg.max_frames = 10;
  const auto res = run_frame_pipeline(m, cfg, ch, pools);
  CHECK(res.frames.size() == 10);
  for (const auto& f : res.frames) CHECK(f.pools_equal);
  CHECK(pools.alice == pools.bob);
  const auto n = res.decoded.size();
  CHECK(BitVec(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(n)) == res.decoded);
}

TEST_CASE("frames that violate the rate conditions are never sent") {
  const BitVec m = random_message(512, 16);
  SyntheticChannel ch(0.0, 0.0, 0.05);
  SstsPools pools;
  PipelineConfig cfg;
  cfg.fixed_k = 1000;  // far above n (r - I_AE)
  const auto res = run_frame_pipeline(m, cfg, ch, pools);
  CHECK(res.status == PipelineStatus::RateConditionViolation);
  REQUIRE(res.frames.size() == 1);
  CHECK_FALSE(res.frames[0].check.security_ok);
  CHECK_FALSE(res.frames[0].transmitted);
  CHECK(res.message.find("replenish") != std::string::npos);
  CHECK(pools.alice.available() == 0);
}

TEST_CASE("decode failure is reported, not silently accepted") {
  const BitVec m = random_message(4096, 17);
  for (double q : {0.06, 0.1}) {
    SyntheticChannel ch(0.0, q, 0.05);
    SstsPools pools;
    PipelineConfig cfg;
    cfg.prior = ChannelStats{1.0, 0.01, 0.05};
    const auto res = run_frame_pipeline(m, cfg, ch, pools);
    CAPTURE(q);
    CHECK(res.status == PipelineStatus::DecodeFailure);
    REQUIRE(res.failed_frame.has_value());
    CHECK_FALSE(res.frames.back().decoded);
    CHECK_FALSE(res.message_match);
    CHECK(res.decoded.size() < m.size());
    CHECK(BitVec(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(res.decoded.size())) == res.decoded);
  }
}

TEST_CASE("empty message") {
  SyntheticChannel ch(0.0, 0.0, 0.05);
  SstsPools pools;
  const auto res = run_frame_pipeline({}, PipelineConfig{}, ch, pools);
  CHECK(res.status == PipelineStatus::Ok);
  CHECK(res.data_frames == 0);
  CHECK(res.message_match);
}

TEST_CASE("pipeline over the pulse-level channel") {
  const SystemParams p;
  PulseSimChannel ch(p, 0.0);
  const auto nominal = ch.nominal();
  CHECK(nominal.delivered_fraction == Approx((1 - p.p_multi) * secrecy_rate(p, 0.0).Q));
  const BitVec m = random_message(64, 18);
  SstsPools pools;
  PipelineConfig cfg;
  cfg.frame_length = 4096;
  cfg.rate_margin = 0.7;
  const auto res = run_frame_pipeline(m, cfg, ch, pools);
  CHECK(res.status == PipelineStatus::Ok);
  CHECK(res.decoded == m);
  CHECK(pools.alice == pools.bob);
  CHECK(ch.rounds().rounds > 0);
}
