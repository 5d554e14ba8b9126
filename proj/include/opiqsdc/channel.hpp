#pragma once

#include <string>

namespace opiqsdc {

// How the misalignment parameter `delta_mis` enters the error model.
//   PhaseOffset:      delta_mis is a phase mismatch in radians; sin^2(delta_mis/2) is used.
//   ErrorProbability: delta_mis is used directly in place of sin^2(delta/2).
enum class MisalignmentModel { PhaseOffset, ErrorProbability };

// Gain assigned to each single-click branch (D0-only, D1-only) in the rate formula.
//   Split: each branch carries half of the total one-click gain.
//   Full:  each branch carries the total one-click gain.
enum class BranchGain { Split, Full };

// Transmittance substituted into the MDI-QSDC comparison formulas.
enum class MdiTransmittance { Effective, Raw };

// Per-round misalignment perturbation in the pulse simulation.
//   FixedOffset:  every round is shifted by delta_r with sin^2(delta_r/2) = misalignment_sin2().
//   RandomJitter: zero-mean Gaussian shift with E[sin^2(delta_r/2)] = misalignment_sin2().
enum class JitterModel { FixedOffset, RandomJitter };

/// Physical and protocol constants for one run. Defaults are the Table-I operating point
/// of the one-photon-interference protocol plus the decoy/comparison defaults.
struct SystemParams {
  double zeta = 0.2;          // fiber attenuation, dB/km
  double eta_d = 0.15;        // detector efficiency
  double p_d = 8e-8;          // dark-count probability per pulse per detector
  double delta_mis = 0.015;   // misalignment, see MisalignmentModel
  double f = 1.2;             // forward-coding inefficiency
  double u = 0.046;           // signal intensity per party
  double p_multi = 0.01;      // multi-intensity mode probability
  double nu1 = 0.01;          // decoy intensities, u > nu1 > nu2 > 0
  double nu2 = 0.001;
  int phase_slices = 16;      // even, >= 2
  double e_d = 0.013;         // intrinsic detector error (comparison protocols)
  double e_0 = 0.5;           // background error rate
  double qber_sample_fraction = 0.1;

  MisalignmentModel misalignment_model = MisalignmentModel::PhaseOffset;
  bool include_vacuum = false;
  BranchGain branch_gain = BranchGain::Split;
  MdiTransmittance mdi_transmittance = MdiTransmittance::Effective;
  JitterModel jitter_model = JitterModel::FixedOffset;

  /// The value standing in for sin^2(delta/2) in the error formulas.
  double misalignment_sin2() const;

  /// Throws std::invalid_argument naming the offending field. Decoy ordering against the
  /// signal intensity (u > nu1) is checked separately by validate_decoys().
  void validate() const;
  void validate_decoys() const;

  bool operator==(const SystemParams&) const = default;
};

// 10^(-zeta d / 10)
double channel_transmittance(double zeta, double d_km);

// Per-arm transmittance eta_d * sqrt(eta_c(d)); d is the total Alice-Bob distance.
double system_transmittance(const SystemParams& params, double d_km);

// Probability that both parties pick the same mode: 1 - 2p(1-p).
double mode_match_rate(double p_multi);

std::string to_string(MisalignmentModel m);
std::string to_string(BranchGain g);
std::string to_string(MdiTransmittance t);
std::string to_string(JitterModel j);

}  // namespace opiqsdc
