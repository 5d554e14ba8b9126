#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "opiqsdc/bits.hpp"
#include "opiqsdc/channel.hpp"
#include "opiqsdc/codec.hpp"
#include "opiqsdc/pulse_sim.hpp"

namespace opiqsdc {

class SstsUnderflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Secure-coding length or rate outside what the frame configuration allows.
class RateViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pre-shared secret bits held by one endpoint. Consumption is FIFO.
class SstsPool {
 public:
  std::size_t available() const { return bits_.size() - head_; }
  std::uint64_t consumed_count() const { return consumed_base_ + head_; }
  void append(const BitVec& bits);
  // Throws SstsUnderflow, leaving the pool untouched, when fewer than n bits remain.
  BitVec take(std::size_t n);
  BitVec contents() const { return BitVec(bits_.begin() + static_cast<std::ptrdiff_t>(head_), bits_.end()); }

  bool operator==(const SstsPool& o) const { return consumed_count() == o.consumed_count() && contents() == o.contents(); }

 private:
  BitVec bits_;
  std::size_t head_ = 0;
  std::uint64_t consumed_base_ = 0;
};

struct FrameConfig {
  std::size_t k = 0;  // secure-input length
  std::size_t n = 0;  // coded length
  double r = 0.0;     // secure-coding rate
  int frame_index = 1;

  // Throws std::invalid_argument unless 0 < k <= n and 0 < r <= 1.
  void validate() const;
};

struct InformationEstimate {
  double I_AB = 0.0;  // bits per channel use
  double I_AE = 0.0;
};

struct RateCheck {
  bool security_ok = true;     // k/n <= r - I_AE
  bool reliability_ok = true;  // r < I_AB
  std::string reason;          // empty when accepted

  bool accepted() const { return security_ok && reliability_ok; }
};

/// Frame 1 may run without estimates (bootstrap); any later frame without them is a
/// std::logic_error.
RateCheck check_rate_conditions(const FrameConfig& cfg, const std::optional<InformationEstimate>& previous);

BitVec ssts_encrypt(const BitVec& message, SstsPool& pool);
BitVec ssts_decrypt(const BitVec& cipher, SstsPool& pool);

// Forward error correction applied to the encrypted block; |Y| must equal the codec's k.
BitVec precode(const BitVec& y, const Codec& fec);
std::optional<BitVec> postdecode(const ChannelWord& x, const Codec& fec, double crossover = 0.0);

/// Coset (wiretap) code of rate r: the k secret bits X are hidden in V = [X xor A R ; R],
/// with R fresh local randomness of K - k bits and K = round(r n), and V is sent as a
/// codeword of an (n, K) channel code. A and the channel code are derived from `seed`.
class SecureCode {
 public:
  SecureCode(const FrameConfig& cfg, std::uint64_t seed);

  std::size_t dimension() const { return K_; }
  const Codec& inner() const { return *inner_; }

  BitVec encode(const BitVec& x, Rng& local) const;  // returns Z
  BitVec encode_v(const BitVec& v) const;            // channel codeword of V
  BitVec compose_v(const BitVec& x, const BitVec& randomness) const;
  std::optional<BitVec> decode_v(const ChannelWord& z, double crossover) const;
  BitVec secret_of(const BitVec& v) const;  // X from V

 private:
  FrameConfig cfg_;
  std::size_t K_;
  Gf2Matrix a_;  // k x (K - k)
  std::unique_ptr<Codec> inner_;
};

// Inner channel code used by SecureCode for a given (K, n): dense for small K, LDPC otherwise.
CodecKind secure_inner_kind(std::size_t K, std::size_t n);

BitVec secure_encode(const BitVec& x, const FrameConfig& cfg, std::uint64_t seed);
std::optional<BitVec> secure_decode(const ChannelWord& z, const FrameConfig& cfg, std::uint64_t seed,
                                    double crossover = 0.0);

struct Masked {
  BitVec C;
  BitVec L;
};
Masked mask(const BitVec& z, std::uint64_t seed);
BitVec unmask(const BitVec& c, const BitVec& l);

/// Z restricted to the disclosed positions (C xor L there), erasures elsewhere.
ChannelWord disclose_and_unmask(const std::vector<std::size_t>& positions, const BitVec& l,
                                const ChannelWord& c_received);

/// Seeded Toeplitz hash to `out_bits` bits; used for SSTS extraction from a decoded frame.
BitVec toeplitz_hash(const BitVec& v, std::size_t out_bits, std::uint64_t seed);

struct ChannelStats {
  double delivered_fraction = 1.0;  // non-erased share of transmitted bits
  double crossover = 0.0;           // flip rate among delivered bits
  double phase_error = 0.0;         // E^Z governing Eve's information
};

/// Per-bit channel between the frame encoder and the decoder.
class BitChannel {
 public:
  virtual ~BitChannel() = default;
  virtual std::string name() const = 0;
  virtual ChannelWord transmit(const BitVec& bits, Rng& rng) = 0;
  // Model values, used to bootstrap frame 1 and as the phase-error input of I_AE.
  virtual ChannelStats nominal() const = 0;
};

class SyntheticChannel final : public BitChannel {
 public:
  SyntheticChannel(double erasure, double flip, double phase_error);
  std::string name() const override { return "synthetic"; }
  ChannelWord transmit(const BitVec& bits, Rng& rng) override;
  ChannelStats nominal() const override { return {1.0 - erasure_, flip_, phase_error_}; }

 private:
  double erasure_;
  double flip_;
  double phase_error_;
};

/// Drives each codeword bit through the pulse-level simulation. Alice's coding rounds carry
/// the bits in order; a bit is delivered when Bob was also in coding mode and exactly one
/// detector fired, and Bob reads it as his own bit xor the D1 click. A share of Alice's
/// coding rounds (qber_sample_fraction) carry random test bits and only feed the QBER tally.
class PulseSimChannel final : public BitChannel {
 public:
  PulseSimChannel(const SystemParams& params, double d_km);
  std::string name() const override { return "pulse"; }
  ChannelWord transmit(const BitVec& bits, Rng& rng) override;
  ChannelStats nominal() const override { return nominal_; }

  const Tally& rounds() const { return tally_; }

 private:
  SystemParams params_;
  double d_km_;
  ChannelStats nominal_;
  Tally tally_;
};

struct PipelineConfig {
  std::size_t frame_length = 1024;  // n for every frame
  double rate_margin = 0.9;         // r_i = rate_margin * I_AB of the previous frame
  CodecKind precoder = CodecKind::Identity;
  double precode_rate = 0.5;        // k/n of ldpc and dense precoders
  double f = 1.2;                   // reconciliation inefficiency in I_AB
  std::uint64_t seed = 1;
  std::optional<std::size_t> fixed_k;  // overrides the secure-input length of every frame
  std::size_t max_frames = 100000;
  // Channel statistics both parties assume; defaults to the channel's nominal values.
  std::optional<ChannelStats> prior;
};

struct SstsPools {
  SstsPool alice;
  SstsPool bob;
};

enum class FrameKind { Bootstrap, Random, Data };
std::string to_string(FrameKind kind);

struct FrameRecord {
  int index = 0;
  FrameKind kind = FrameKind::Data;
  FrameConfig cfg;
  std::size_t K = 0;
  std::string inner_codec;
  std::optional<InformationEstimate> previous;
  RateCheck check;
  bool transmitted = false;
  std::size_t payload_bits = 0;  // message bits carried
  std::size_t delivered = 0;
  std::vector<std::size_t> disclosed;
  std::size_t bit_errors = 0;  // among delivered bits, known after decoding
  double qber_hat = 0.0;
  InformationEstimate estimate;
  bool decoded = false;
  std::size_t extracted = 0;
  std::size_t pool_alice = 0;
  std::size_t pool_bob = 0;
  bool pools_equal = true;
};

enum class PipelineStatus { Ok, DecodeFailure, RateConditionViolation, SecrecyBudgetExhausted, FrameLimit };
std::string to_string(PipelineStatus s);

struct PipelineResult {
  PipelineStatus status = PipelineStatus::Ok;
  std::string message;
  std::optional<int> failed_frame;
  BitVec decoded;
  bool message_match = false;
  std::size_t data_frames = 0;
  std::size_t random_frames = 0;
  std::vector<FrameRecord> frames;
};

/// Runs frames until `message` is delivered. Frame 1 is a bootstrap frame of random bits
/// planned from the channel's nominal statistics; every later frame is planned from the
/// previous frame's estimates and checked against the rate conditions before it is sent.
/// SSTS bits are extracted into both pools after every accepted, decoded frame. Data
/// frames pause (random frames are inserted) while the pool is empty.
PipelineResult run_frame_pipeline(const BitVec& message, const PipelineConfig& cfg, BitChannel& channel,
                                  SstsPools& pools);

}  // namespace opiqsdc
