#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "opiqsdc/bits.hpp"
#include "opiqsdc/gf2.hpp"

namespace opiqsdc {

/// Block code with a fixed (k, n). decode() returns nullopt when the decoder detects that
/// it could not recover a codeword; `crossover` is the estimated BSC flip rate on the
/// non-erased positions.
class Codec {
 public:
  virtual ~Codec() = default;

  virtual std::string name() const = 0;
  virtual std::size_t message_length() const = 0;
  virtual std::size_t block_length() const = 0;
  double rate() const { return static_cast<double>(message_length()) / static_cast<double>(block_length()); }
  // Nominal BSC crossover the decoder is designed for at its block length.
  virtual double threshold() const = 0;

  virtual BitVec encode(const BitVec& message) const = 0;
  virtual std::optional<BitVec> decode(const ChannelWord& received, double crossover) const = 0;
};

enum class CodecKind { Identity, Repetition3, Ldpc, Dense };

std::string to_string(CodecKind kind);
CodecKind parse_codec_kind(const std::string& name);

class IdentityCodec final : public Codec {
 public:
  explicit IdentityCodec(std::size_t k) : k_(k) {}
  std::string name() const override { return "identity"; }
  std::size_t message_length() const override { return k_; }
  std::size_t block_length() const override { return k_; }
  double threshold() const override { return 0.0; }
  BitVec encode(const BitVec& message) const override;
  std::optional<BitVec> decode(const ChannelWord& received, double crossover) const override;

 private:
  std::size_t k_;
};

/// Each bit sent three times, decoded by majority over the non-erased copies.
class Repetition3Codec final : public Codec {
 public:
  explicit Repetition3Codec(std::size_t k) : k_(k) {}
  std::string name() const override { return "repetition3"; }
  std::size_t message_length() const override { return k_; }
  std::size_t block_length() const override { return 3 * k_; }
  // Crossover at which a k-bit block fails with probability 1e-3.
  double threshold() const override;
  BitVec encode(const BitVec& message) const override;
  std::optional<BitVec> decode(const ChannelWord& received, double crossover) const override;

 private:
  std::size_t k_;
};

// Probability that majority voting over three copies gets one bit wrong: 3p^2(1-p) + p^3.
double repetition3_bit_failure(double p);

/// Seeded column-weight-3 parity-check code decoded by sum-product belief propagation.
/// Encoding is systematic on the free columns of the reduced parity-check matrix; free
/// columns beyond k (when H is rank deficient) are frozen to zero.
class LdpcCodec final : public Codec {
 public:
  LdpcCodec(std::size_t k, std::size_t n, std::uint64_t seed, int max_iterations = 100);
  std::string name() const override { return "ldpc"; }
  std::size_t message_length() const override { return k_; }
  std::size_t block_length() const override { return n_; }
  double threshold() const override;
  BitVec encode(const BitVec& message) const override;
  std::optional<BitVec> decode(const ChannelWord& received, double crossover) const override;

  const Gf2Matrix& parity_check() const { return h_; }
  bool is_codeword(const BitVec& word) const;

 private:
  std::size_t k_;
  std::size_t n_;
  int max_iterations_;
  Gf2Matrix h_;
  Gf2Matrix reduced_;                   // RREF of h_
  std::vector<std::size_t> pivots_;     // pivot column of each reduced row
  std::vector<std::size_t> info_cols_;  // k message positions
  std::vector<std::uint8_t> frozen_;    // per column: fixed to zero
  std::vector<std::vector<std::size_t>> check_vars_;
  std::vector<std::vector<std::size_t>> var_checks_;
};

/// Seeded systematic random linear code [I | P]. Decoding solves for the message on the
/// received positions by elimination; when the positions disagree it falls back to
/// information-set decoding. Suited to erasure-dominated channels.
class DenseLinearCodec final : public Codec {
 public:
  DenseLinearCodec(std::size_t k, std::size_t n, std::uint64_t seed, int isd_trials = 200);
  std::string name() const override { return "dense"; }
  std::size_t message_length() const override { return k_; }
  std::size_t block_length() const override { return n_; }
  double threshold() const override;
  BitVec encode(const BitVec& message) const override;
  std::optional<BitVec> decode(const ChannelWord& received, double crossover) const override;

  const Gf2Matrix& generator() const { return g_; }

 private:
  std::size_t k_;
  std::size_t n_;
  std::uint64_t seed_;
  int isd_trials_;
  Gf2Matrix g_;
};

/// k and n are the block parameters; identity and repetition-3 derive n from k.
std::unique_ptr<Codec> make_codec(CodecKind kind, std::size_t k, std::size_t n, std::uint64_t seed);

}  // namespace opiqsdc
