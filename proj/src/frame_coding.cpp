#include "opiqsdc/frame_coding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "opiqsdc/rates.hpp"

namespace opiqsdc {

void SstsPool::append(const BitVec& bits) {
  // Drop the consumed prefix once it dominates so the buffer does not grow without bound.
  if (head_ > 4096 && head_ > bits_.size() / 2) {
    bits_.erase(bits_.begin(), bits_.begin() + static_cast<std::ptrdiff_t>(head_));
    consumed_base_ += head_;
    head_ = 0;
  }
  bits_.insert(bits_.end(), bits.begin(), bits.end());
}

BitVec SstsPool::take(std::size_t n) {
  if (n > available())
    throw SstsUnderflow("SSTS pool holds " + std::to_string(available()) + " bits, " + std::to_string(n) +
                        " requested; pause and replenish");
  BitVec out(bits_.begin() + static_cast<std::ptrdiff_t>(head_),
             bits_.begin() + static_cast<std::ptrdiff_t>(head_ + n));
  head_ += n;
  return out;
}

void FrameConfig::validate() const {
  if (n == 0) throw std::invalid_argument("frame: n must be > 0");
  if (k == 0 || k > n) throw std::invalid_argument("frame: need 0 < k <= n");
  if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("frame: need 0 < r <= 1");
}

RateCheck check_rate_conditions(const FrameConfig& cfg, const std::optional<InformationEstimate>& previous) {
  cfg.validate();
  RateCheck out;
  if (!previous) {
    if (cfg.frame_index > 1)
      throw std::logic_error("frame " + std::to_string(cfg.frame_index) + ": previous-frame estimates missing");
    return out;
  }
  const double secure_rate = static_cast<double>(cfg.k) / static_cast<double>(cfg.n);
  out.security_ok = secure_rate <= cfg.r - previous->I_AE + 1e-12;
  out.reliability_ok = cfg.r < previous->I_AB;
  char buf[160];
  if (!out.security_ok) {
    std::snprintf(buf, sizeof buf, "security: k/n = %.6g exceeds r - I_AE = %.6g", secure_rate,
                  cfg.r - previous->I_AE);
    out.reason = buf;
  }
  if (!out.reliability_ok) {
    std::snprintf(buf, sizeof buf, "reliability: r = %.6g is not below I_AB = %.6g", cfg.r, previous->I_AB);
    out.reason += (out.reason.empty() ? "" : "; ") + std::string(buf);
  }
  return out;
}

BitVec ssts_encrypt(const BitVec& message, SstsPool& pool) { return xor_bits(message, pool.take(message.size())); }

BitVec ssts_decrypt(const BitVec& cipher, SstsPool& pool) { return xor_bits(cipher, pool.take(cipher.size())); }

BitVec precode(const BitVec& y, const Codec& fec) {
  if (y.size() != fec.message_length())
    throw std::invalid_argument("precode: |Y| = " + std::to_string(y.size()) + " but " + fec.name() + " takes " +
                                std::to_string(fec.message_length()));
  return fec.encode(y);
}

std::optional<BitVec> postdecode(const ChannelWord& x, const Codec& fec, double crossover) {
  if (x.size() != fec.block_length())
    throw std::invalid_argument("postdecode: |X| = " + std::to_string(x.size()) + " but " + fec.name() +
                                " emits " + std::to_string(fec.block_length()));
  return fec.decode(x, crossover);
}

CodecKind secure_inner_kind(std::size_t K, std::size_t) { return K <= 64 ? CodecKind::Dense : CodecKind::Ldpc; }

SecureCode::SecureCode(const FrameConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg.validate();
  if (static_cast<double>(cfg.k) > static_cast<double>(cfg.n) * cfg.r)
    throw RateViolation("secure code: k = " + std::to_string(cfg.k) + " exceeds n r = " +
                        std::to_string(static_cast<double>(cfg.n) * cfg.r));
  K_ = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(cfg.r * static_cast<double>(cfg.n))), cfg.k,
                               cfg.n);
  Rng rng(derive_seed(seed, 11));
  a_ = Gf2Matrix::random(cfg.k, K_ - cfg.k, rng);
  inner_ = make_codec(secure_inner_kind(K_, cfg.n), K_, cfg.n, derive_seed(seed, 12));
}

BitVec SecureCode::compose_v(const BitVec& x, const BitVec& randomness) const {
  if (x.size() != cfg_.k) throw std::invalid_argument("secure encode: |X| must equal k");
  if (randomness.size() != K_ - cfg_.k) throw std::invalid_argument("secure encode: randomness length mismatch");
  BitVec v = xor_bits(x, a_.multiply(randomness));
  v.insert(v.end(), randomness.begin(), randomness.end());
  return v;
}

BitVec SecureCode::encode_v(const BitVec& v) const { return inner_->encode(v); }

BitVec SecureCode::encode(const BitVec& x, Rng& local) const {
  return encode_v(compose_v(x, random_bits(local, K_ - cfg_.k)));
}

std::optional<BitVec> SecureCode::decode_v(const ChannelWord& z, double crossover) const {
  if (z.size() != cfg_.n) throw std::invalid_argument("secure decode: |Z| must equal n");
  return inner_->decode(z, crossover);
}

BitVec SecureCode::secret_of(const BitVec& v) const {
  if (v.size() != K_) throw std::invalid_argument("secure decode: |V| must equal K");
  const BitVec head(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(cfg_.k));
  const BitVec tail(v.begin() + static_cast<std::ptrdiff_t>(cfg_.k), v.end());
  return xor_bits(head, a_.multiply(tail));
}

BitVec secure_encode(const BitVec& x, const FrameConfig& cfg, std::uint64_t seed) {
  Rng local(derive_seed(seed, 13));
  return SecureCode(cfg, seed).encode(x, local);
}

std::optional<BitVec> secure_decode(const ChannelWord& z, const FrameConfig& cfg, std::uint64_t seed,
                                    double crossover) {
  const SecureCode code(cfg, seed);
  auto v = code.decode_v(z, crossover);
  if (!v) return std::nullopt;
  return code.secret_of(*v);
}

Masked mask(const BitVec& z, std::uint64_t seed) {
  Rng rng(seed);
  Masked out;
  out.L = random_bits(rng, z.size());
  out.C = xor_bits(z, out.L);
  return out;
}

BitVec unmask(const BitVec& c, const BitVec& l) { return xor_bits(c, l); }

ChannelWord disclose_and_unmask(const std::vector<std::size_t>& positions, const BitVec& l,
                                const ChannelWord& c_received) {
  if (l.size() != c_received.size()) throw std::invalid_argument("disclose: |L| must equal |C|");
  ChannelWord z(c_received.size(), kErased);
  for (const auto p : positions) {
    if (p >= c_received.size()) throw std::out_of_range("disclosed position " + std::to_string(p) + " out of range");
    if (c_received[p] == kErased) throw std::invalid_argument("disclosed position " + std::to_string(p) + " was erased");
    z[p] = static_cast<std::int8_t>((c_received[p] ^ l[p]) & 1);
  }
  return z;
}

BitVec toeplitz_hash(const BitVec& v, std::size_t out_bits, std::uint64_t seed) {
  if (v.empty() || out_bits == 0) return BitVec(out_bits, 0);
  Rng rng(seed);
  const BitVec diag = random_bits(rng, out_bits + v.size() - 1);
  BitVec out(out_bits, 0);
  for (std::size_t i = 0; i < out_bits; ++i) {
    unsigned acc = 0;
    // T[i][j] = diag[i - j + |v| - 1]
    for (std::size_t j = 0; j < v.size(); ++j) acc ^= diag[i + v.size() - 1 - j] & v[j];
    out[i] = static_cast<std::uint8_t>(acc & 1u);
  }
  return out;
}

SyntheticChannel::SyntheticChannel(double erasure, double flip, double phase_error)
    : erasure_(erasure), flip_(flip), phase_error_(phase_error) {
  for (const double p : {erasure, flip, phase_error})
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("synthetic channel probabilities must lie in [0,1]");
}

ChannelWord SyntheticChannel::transmit(const BitVec& bits, Rng& rng) {
  ChannelWord out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const bool erased = bernoulli(rng, erasure_);
    const bool flipped = bernoulli(rng, flip_);
    out[i] = erased ? kErased : static_cast<std::int8_t>((bits[i] ^ flipped) & 1u);
  }
  return out;
}

PulseSimChannel::PulseSimChannel(const SystemParams& params, double d_km) : params_(params), d_km_(d_km) {
  params.validate();
  params.validate_decoys();
  const RateBreakdown rb = secrecy_rate(params, d_km);
  nominal_ = {(1.0 - params.p_multi) * rb.Q, rb.EX, rb.EZ};
}

ChannelWord PulseSimChannel::transmit(const BitVec& bits, Rng& rng) {
  ChannelWord out(bits.size(), kErased);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    for (;;) {
      const bool test = bernoulli(rng, params_.qber_sample_fraction);
      PulseRecord rec = prepare_round(params_, rng, test ? std::nullopt : std::optional<std::uint8_t>(bits[i]));
      rec.sampled = test;
      interfere_and_detect(rec, params_, d_km_, rng);
      tally_.add(rec, params_.phase_slices);
      if (rec.mode_a != Mode::Coding || test) continue;
      if (rec.mode_b == Mode::Coding && rec.one_click())
        out[i] = static_cast<std::int8_t>(rec.bit_b ^ static_cast<std::uint8_t>(rec.click_d));
      break;
    }
  }
  return out;
}

std::string to_string(FrameKind kind) {
  switch (kind) {
    case FrameKind::Bootstrap: return "bootstrap";
    case FrameKind::Random: return "random";
    case FrameKind::Data: return "data";
  }
  return "?";
}

std::string to_string(PipelineStatus s) {
  switch (s) {
    case PipelineStatus::Ok: return "ok";
    case PipelineStatus::DecodeFailure: return "decode_failure";
    case PipelineStatus::RateConditionViolation: return "rate_condition_violation";
    case PipelineStatus::SecrecyBudgetExhausted: return "secrecy_budget_exhausted";
    case PipelineStatus::FrameLimit: return "frame_limit";
  }
  return "?";
}

namespace {

InformationEstimate information_of(double delivered_fraction, double crossover, double phase_error, double f) {
  return {delivered_fraction * (1.0 - f * binary_entropy(std::clamp(crossover, 0.0, 0.5))),
          delivered_fraction * binary_entropy(std::clamp(phase_error, 0.0, 1.0))};
}

// Message bits a precoder can carry inside `cap` secure-input bits.
std::size_t precoder_capacity(const PipelineConfig& cfg, std::size_t cap) {
  switch (cfg.precoder) {
    case CodecKind::Identity: return cap;
    case CodecKind::Repetition3: return cap / 3;
    default: return static_cast<std::size_t>(std::floor(static_cast<double>(cap) * cfg.precode_rate));
  }
}

std::unique_ptr<Codec> make_precoder(const PipelineConfig& cfg, std::size_t m, std::size_t cap, std::uint64_t seed) {
  std::size_t n = cap;
  if (cfg.precoder == CodecKind::Ldpc || cfg.precoder == CodecKind::Dense)
    n = std::min(cap, static_cast<std::size_t>(std::ceil(static_cast<double>(m) / cfg.precode_rate)));
  return make_codec(cfg.precoder, m, n, seed);
}

}  // namespace

PipelineResult run_frame_pipeline(const BitVec& message, const PipelineConfig& cfg, BitChannel& channel,
                                  SstsPools& pools) {
  if (cfg.frame_length == 0) throw std::invalid_argument("frame_length must be > 0");
  if (!(cfg.rate_margin > 0.0 && cfg.rate_margin < 1.0)) throw std::invalid_argument("rate_margin must lie in (0,1)");
  if (!(cfg.precode_rate > 0.0 && cfg.precode_rate <= 1.0)) throw std::invalid_argument("precode_rate must lie in (0,1]");

  PipelineResult res;
  const std::size_t n = cfg.frame_length;
  const ChannelStats nominal = cfg.prior.value_or(channel.nominal());
  std::optional<InformationEstimate> previous;
  std::size_t pos = 0;

  auto fail = [&](PipelineStatus s, int index, std::string why) {
    res.status = s;
    res.failed_frame = index;
    res.message = std::move(why);
  };

  for (int index = 1; index == 1 || pos < message.size(); ++index) {
    if (static_cast<std::size_t>(index) > cfg.max_frames) {
      fail(PipelineStatus::FrameLimit, index, "frame limit reached before the message was delivered");
      break;
    }
    const std::uint64_t frame_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(index));
    const InformationEstimate est =
        index == 1 ? information_of(nominal.delivered_fraction, nominal.crossover, nominal.phase_error, cfg.f)
                   : previous.value();

    FrameRecord rec;
    rec.index = index;
    rec.previous = est;
    const double r = std::min(1.0, cfg.rate_margin * est.I_AB);
    const double budget = std::floor(static_cast<double>(n) * (r - est.I_AE));
    const std::size_t k_max = budget > 0.0 ? static_cast<std::size_t>(budget) : 0;
    const std::size_t cap = cfg.fixed_k.value_or(k_max);

    rec.kind = index == 1 ? FrameKind::Bootstrap
                          : (pools.alice.available() == 0 ? FrameKind::Random : FrameKind::Data);
    std::size_t m = 0;
    std::unique_ptr<Codec> pre;
    std::size_t k = cap;
    if (rec.kind == FrameKind::Data) {
      m = std::min({precoder_capacity(cfg, cap), message.size() - pos, pools.alice.available()});
      if (m > 0) {
        pre = make_precoder(cfg, m, cap, derive_seed(frame_seed, 4));
        k = pre->block_length();
      } else {
        k = 0;
      }
    }
    rec.cfg = {k, n, r, index};
    if (k == 0 || !(r > 0.0) || std::llround(r * static_cast<double>(n)) < 1) {
      res.frames.push_back(rec);
      fail(PipelineStatus::SecrecyBudgetExhausted, index,
           "no secrecy budget at frame " + std::to_string(index) + ": r - I_AE leaves no secure bits; replenish SSTS");
      break;
    }
    rec.check = check_rate_conditions(rec.cfg, est);
    if (!rec.check.accepted()) {
      res.frames.push_back(rec);
      fail(PipelineStatus::RateConditionViolation, index,
           "frame " + std::to_string(index) + " refused (" + rec.check.reason + "); replenish SSTS or lower k");
      break;
    }

    // Alice
    Rng local(derive_seed(frame_seed, 1));
    const SecureCode code(rec.cfg, derive_seed(frame_seed, 3));
    rec.K = code.dimension();
    rec.inner_codec = code.inner().name();
    BitVec x;
    BitVec chunk;
    if (rec.kind == FrameKind::Data) {
      chunk.assign(message.begin() + static_cast<std::ptrdiff_t>(pos),
                   message.begin() + static_cast<std::ptrdiff_t>(pos + m));
      x = precode(ssts_encrypt(chunk, pools.alice), *pre);
    } else {
      x = random_bits(local, k);
    }
    const BitVec v_alice = code.compose_v(x, random_bits(local, code.dimension() - k));
    const BitVec z = code.encode_v(v_alice);
    const Masked masked = mask(z, derive_seed(frame_seed, 2));

    // Channel, then Bob publishes his valid positions and Alice the mask bits there.
    Rng link(derive_seed(frame_seed, 5));
    const ChannelWord received = channel.transmit(masked.C, link);
    rec.transmitted = true;
    for (std::size_t i = 0; i < received.size(); ++i)
      if (received[i] != kErased) rec.disclosed.push_back(i);
    rec.delivered = rec.disclosed.size();
    const ChannelWord fragment = disclose_and_unmask(rec.disclosed, masked.L, received);

    // Bob
    const double crossover = index == 1 ? nominal.crossover : res.frames.back().qber_hat;
    const auto v_bob = code.decode_v(fragment, crossover);
    std::optional<BitVec> y_bob;
    if (v_bob && rec.kind == FrameKind::Data) y_bob = postdecode(clean_word(code.secret_of(*v_bob)), *pre);
    rec.decoded = v_bob.has_value() && (rec.kind != FrameKind::Data || y_bob.has_value());
    if (!rec.decoded) {
      res.frames.push_back(rec);
      fail(PipelineStatus::DecodeFailure, index, "frame " + std::to_string(index) + " failed to decode");
      break;
    }
    if (rec.kind == FrameKind::Data) {
      const BitVec m_bob = ssts_decrypt(*y_bob, pools.bob);
      res.decoded.insert(res.decoded.end(), m_bob.begin(), m_bob.end());
      rec.payload_bits = m;
      pos += m;
      ++res.data_frames;
    } else if (rec.kind == FrameKind::Random) {
      ++res.random_frames;
    }

    const BitVec z_bob = code.encode_v(*v_bob);
    for (const auto p : rec.disclosed) rec.bit_errors += static_cast<std::uint8_t>(fragment[p]) != z_bob[p];
    rec.qber_hat = rec.delivered ? static_cast<double>(rec.bit_errors) / static_cast<double>(rec.delivered) : 0.0;
    rec.estimate = information_of(static_cast<double>(rec.delivered) / static_cast<double>(n), rec.qber_hat,
                                  nominal.phase_error, cfg.f);

    // SSTS extraction, charged against the larger of the planned and the measured leakage.
    const double leak = std::max(est.I_AE, rec.estimate.I_AE);
    const double amount = std::floor(static_cast<double>(n) * (r - leak));
    rec.extracted = amount > 0.0 ? std::min(static_cast<std::size_t>(amount), code.dimension()) : 0;
    const std::uint64_t hash_seed = derive_seed(frame_seed, 6);
    pools.alice.append(toeplitz_hash(v_alice, rec.extracted, hash_seed));
    pools.bob.append(toeplitz_hash(*v_bob, rec.extracted, hash_seed));
    rec.pool_alice = pools.alice.available();
    rec.pool_bob = pools.bob.available();
    rec.pools_equal = pools.alice == pools.bob;

    previous = rec.estimate;
    res.frames.push_back(std::move(rec));
  }
  res.message_match = res.decoded == message;
  if (res.status == PipelineStatus::Ok) res.message = res.message_match ? "delivered" : "delivered with mismatch";
  return res;
}

}  // namespace opiqsdc
