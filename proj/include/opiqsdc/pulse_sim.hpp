#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opiqsdc/channel.hpp"
#include "opiqsdc/execution.hpp"
#include "opiqsdc/rng.hpp"

namespace opiqsdc {

enum class Mode : std::uint8_t { Coding, MultiIntensity };

// Intensity level of a pulse. Signal is used only in coding mode.
enum class Level : std::uint8_t { Signal, Decoy1, Decoy2, Vacuum };

inline constexpr int kTruthMaxPhotons = 8;

/// One protocol round: both parties' preparation choices and Charlie's detector outcome.
struct PulseRecord {
  Mode mode_a = Mode::Coding;
  Mode mode_b = Mode::Coding;
  std::uint8_t bit_a = 0;  // coding mode only
  std::uint8_t bit_b = 0;
  Level level_a = Level::Signal;
  Level level_b = Level::Signal;
  double intensity_a = 0.0;
  double intensity_b = 0.0;
  double phase_a = 0.0;  // radians in [0, 2pi)
  double phase_b = 0.0;
  int phase_slice_a = -1;  // multi-intensity only
  int phase_slice_b = -1;
  bool sampled = false;  // coding round whose bits are published for QBER estimation
  bool click_c = false;  // m_C, detector D0
  bool click_d = false;  // m_D, detector D1
  int photons = -1;      // total photons sent; truth_access only

  bool one_click() const { return click_c != click_d; }
  bool coding_pair() const { return mode_a == Mode::Coding && mode_b == Mode::Coding; }
  bool decoy_pair() const { return mode_a == Mode::MultiIntensity && mode_b == Mode::MultiIntensity; }
  // D0 should fire for equal bits, D1 for opposite bits.
  bool bit_error() const { return click_c ? bit_a != bit_b : bit_a == bit_b; }

  bool operator==(const PulseRecord&) const = default;
};

struct DetectorOutcome {
  bool click_c = false;
  bool click_d = false;
};

/// Each party independently picks multi-intensity mode with probability p_multi. Alice's
/// coding bit is taken from `alice_bit` when given (codeword-driven), uniform otherwise.
PulseRecord prepare_round(const SystemParams& params, Rng& rng, std::optional<std::uint8_t> alice_bit = {});

/// Interferes the two pulses at Charlie and samples threshold detectors with dark counts.
/// Writes the outcome into `pulse`. With `truth_access`, photon numbers are sampled
/// explicitly (distributionally identical) and recorded in `pulse.photons`.
DetectorOutcome interfere_and_detect(PulseRecord& pulse, const SystemParams& params, double d_km, Rng& rng,
                                     bool truth_access = false);

bool decoy_phases_match(const PulseRecord& pulse, int phase_slices);

struct SiftedRounds {
  std::vector<PulseRecord> coding_kept;
  std::vector<PulseRecord> decoy_kept;
  std::vector<PulseRecord> discarded;
};

SiftedRounds sift(std::span<const PulseRecord> records, int phase_slices);

/// Mergeable per-round counters; the streaming form of sifting.
struct Tally {
  std::uint64_t rounds = 0;
  std::uint64_t mode_matched = 0;
  std::uint64_t coding_pairs = 0;
  std::uint64_t coding_kept = 0;
  std::uint64_t coding_errors = 0;
  std::uint64_t sampled_kept = 0;
  std::uint64_t sampled_errors = 0;
  std::array<std::uint64_t, 3> decoy_pairs{};  // nu1, nu2, vacuum; matched intensity and phase
  std::array<std::uint64_t, 3> decoy_kept{};
  std::array<std::uint64_t, kTruthMaxPhotons + 1> truth_rounds{};  // coding pairs by photon number
  std::array<std::uint64_t, kTruthMaxPhotons + 1> truth_kept{};

  void add(const PulseRecord& r, int phase_slices);
  Tally& operator+=(const Tally& other);
  bool operator==(const Tally&) const = default;
};

Tally tally(std::span<const PulseRecord> records, int phase_slices);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;  // binomial
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;

  bool operator==(const Estimate&) const = default;
};

std::optional<Estimate> binomial_estimate(std::uint64_t successes, std::uint64_t trials);

struct SimReport {
  std::uint64_t n_pulses = 0;
  std::uint64_t seed = 0;
  int shards = 1;
  double d_km = 0.0;
  std::string params_digest;
  bool truth_access = false;
  std::uint64_t kept_coding = 0;
  std::uint64_t kept_decoy = 0;
  std::optional<Estimate> mode_match_hat;
  std::optional<Estimate> Q_hat;           // one-click fraction of coding pairs
  std::optional<Estimate> EX_hat;          // over all kept coding rounds
  std::optional<Estimate> EX_hat_sampled;  // over the publicly sampled subset
  std::array<std::optional<Estimate>, 3> yields_hat;  // nu1, nu2, vacuum
  std::vector<std::optional<Estimate>> truth_yields;  // index = photon number

  bool operator==(const SimReport&) const = default;
};

/// Absent statistics (empty denominators) stay std::nullopt rather than reading as zero.
SimReport estimate_parameters(const Tally& counts, bool truth_access);
SimReport estimate_parameters(const SiftedRounds& rounds, int phase_slices, bool truth_access);

// Simulates `count` rounds on one stream; the per-shard kernel of run_campaign.
Tally simulate_rounds(const SystemParams& params, double d_km, std::uint64_t count, Rng& rng, bool truth_access);

/// Deterministic for fixed (seed, shards): shard s draws from derive_seed(seed, s) and the
/// shard tallies are merged in index order, so Serial and Parallel give identical reports.
SimReport run_campaign(const SystemParams& params, double d_km, std::uint64_t n_pulses, std::uint64_t seed,
                       int shards, Execution exec = Execution::Parallel, bool truth_access = false);

struct AnalyticComparison {
  double Q = 0.0;
  double EX = 0.0;
  std::optional<double> z_Q;   // (Q_hat - Q) / sqrt(Q(1-Q)/N)
  std::optional<double> z_EX;
  std::array<double, 3> decoy_gain{};
  std::array<std::optional<double>, 3> z_decoy;
};

AnalyticComparison compare_with_analytic(const SimReport& report, const SystemParams& params);

}  // namespace opiqsdc
