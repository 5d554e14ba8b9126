#pragma once

#include "opiqsdc/channel.hpp"
#include "opiqsdc/errors.hpp"

namespace opiqsdc {

inline constexpr int kDefaultSeriesTerms = 40;

/// Per-distance analytic result for the one-photon-interference protocol.
struct RateBreakdown {
  double d = 0.0;    // km
  double eta = 0.0;  // per-arm transmittance
  double Q = 0.0;    // total one-click gain
  double EX = 0.0;   // bit (X-basis) error rate
  double EZ = 0.0;   // phase (Z-basis) error rate, clipped to [0,1]
  double RC = 0.0;   // D0-only branch rate (may be negative before clipping)
  double RD = 0.0;   // D1-only branch rate
  double R = 0.0;    // max(RC,0) + max(RD,0)

  bool operator==(const RateBreakdown&) const = default;
};

struct IdealRates {
  double opi = 0.0;
  double dl04 = 0.0;
  double mdi = 0.0;
};

struct ComparisonRates {
  double plob = 0.0;  // +inf at zero distance
  IdealRates ideal;
  double dl04 = 0.0;
  double mdi = 0.0;
};

double binary_entropy(double x);

// Click probability for an n-photon input: 1 - (1-2 p_d)(1-eta)^n.
double yield_n(int n, double eta, double p_d);

// One-click gain of a coherent pair at intensity u per party:
// 1 - e^{-2 eta u} + 2 p_d e^{-2 eta u}.
double gain(double u, double eta, double p_d);

// Poisson probability mass e^{-mean} mean^n / n!.
double poisson_weight(int n, double mean);

double x_error(double u, double eta, double p_d, double misalignment_sin2);

/// Phase-error rate from the even-photon series
///   E^Z = ( sum_n sqrt(P(2n) Y_{2n}) )^2 / Q,   P Poisson with mean 2u.
/// The n = 0 (vacuum) term enters only when `include_vacuum` is set. The raw value is
/// returned; it can exceed 1 for intense, low-loss inputs. Throws TruncationError when the
/// next omitted term is not below 1e-12 of the partial sum.
double z_error(double u, double eta, double p_d, int n_max, bool include_vacuum);

RateBreakdown secrecy_rate(const SystemParams& params, double d_km);

// Repeaterless bound -log2(1 - eta_c).
double plob_bound(double eta_c);

IdealRates ideal_rates(double eta_d, double eta_c);

// DL04 with masking: max(Q_B [1 - h(e) - h(2 eps)], 0).
double dl04_rate(const SystemParams& params, double d_km);

// MDI-QSDC with masking: max(Q [1 - h(e) - h(eps_y)], 0).
double mdi_rate(const SystemParams& params, double d_km);

ComparisonRates comparison_rates(const SystemParams& params, double d_km);

/// Per-channel-use mutual informations q Q [1 - f h(EX)] and q Q h(EZ) used by the frame
/// rate conditions when the channel is the photonic link itself.
struct ChannelInformation {
  double I_AB = 0.0;
  double I_AE = 0.0;
};
ChannelInformation channel_information(const SystemParams& params, const RateBreakdown& rates);

}  // namespace opiqsdc
