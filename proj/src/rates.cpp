#include "opiqsdc/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace opiqsdc {

namespace {

void require_probability(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

// Entropy of an error-rate bound. h is not monotone past 1/2, so a bound E stands for every
// rate in [0, E] and contributes h(min(E, 1/2)).
double bound_entropy(double e) { return binary_entropy(std::clamp(e, 0.0, 0.5)); }

}  // namespace

double binary_entropy(double x) {
  require_probability(x, "binary_entropy argument");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double yield_n(int n, double eta, double p_d) {
  if (n < 0) throw std::invalid_argument("photon number must be >= 0");
  require_probability(eta, "eta");
  require_probability(p_d, "p_d");
  if (n == 0) return 2.0 * p_d;
  // expm1/log1p form keeps full relative precision when eta and p_d are tiny.
  if (2.0 * p_d < 1.0) return -std::expm1(std::log1p(-2.0 * p_d) + n * std::log1p(-eta));
  return 1.0 - (1.0 - 2.0 * p_d) * std::pow(1.0 - eta, n);
}

double gain(double u, double eta, double p_d) {
  if (!(u > 0.0)) throw std::invalid_argument("intensity u must be > 0");
  require_probability(eta, "eta");
  require_probability(p_d, "p_d");
  const double x = 2.0 * eta * u;
  return -std::expm1(-x) + 2.0 * p_d * std::exp(-x);
}

double poisson_weight(int n, double mean) {
  if (n < 0) throw std::invalid_argument("photon number must be >= 0");
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("Poisson mean must be finite and >= 0");
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
}

double x_error(double u, double eta, double p_d, double misalignment_sin2) {
  require_probability(misalignment_sin2, "misalignment");
  const double Q = gain(u, eta, p_d);
  if (!(Q > 0.0)) throw DegenerateChannel("zero gain: X-basis error undefined");
  const double x = 2.0 * eta * u;
  return std::exp(-x) / Q * (p_d + x * misalignment_sin2);
}

double z_error(double u, double eta, double p_d, int n_max, bool include_vacuum) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  const double Q = gain(u, eta, p_d);
  if (!(Q > 0.0)) throw DegenerateChannel("zero gain: phase error undefined");
  const double mean = 2.0 * u;
  double sum = 0.0;
  for (int n = include_vacuum ? 0 : 1; n <= n_max; ++n)
    sum += std::sqrt(poisson_weight(2 * n, mean) * yield_n(2 * n, eta, p_d));
  // Y <= 1, so sqrt(P(2n)) bounds every omitted term.
  const double next = std::sqrt(poisson_weight(2 * (n_max + 1), mean));
  if (next > 1e-12 * sum)
    throw TruncationError("even-photon series not converged at n_max=" + std::to_string(n_max));
  return sum * sum / Q;
}

RateBreakdown secrecy_rate(const SystemParams& params, double d_km) {
  params.validate();
  RateBreakdown out;
  out.d = d_km;
  out.eta = system_transmittance(params, d_km);
  out.Q = gain(params.u, out.eta, params.p_d);
  out.EX = x_error(params.u, out.eta, params.p_d, params.misalignment_sin2());
  out.EZ = std::min(z_error(params.u, out.eta, params.p_d, kDefaultSeriesTerms, params.include_vacuum), 1.0);

  const double q = mode_match_rate(params.p_multi);
  const double branch_gain = params.branch_gain == BranchGain::Split ? 0.5 * out.Q : out.Q;
  out.RC = q * branch_gain * (1.0 - params.f * bound_entropy(out.EX) - bound_entropy(out.EZ));
  // The D1-only branch mirrors the D0-only branch under the symmetric misalignment model.
  out.RD = out.RC;
  out.R = std::max(out.RC, 0.0) + std::max(out.RD, 0.0);
  return out;
}

double plob_bound(double eta_c) {
  if (!(eta_c >= 0.0 && eta_c < 1.0)) throw std::invalid_argument("PLOB bound needs 0 <= eta_c < 1");
  return -std::log1p(-eta_c) / std::numbers::ln2;
}

IdealRates ideal_rates(double eta_d, double eta_c) {
  require_probability(eta_d, "eta_d");
  require_probability(eta_c, "eta_c");
  return {eta_d * std::sqrt(eta_c), eta_d * eta_c * eta_c, (eta_d * eta_c) * (eta_d * eta_c)};
}

double dl04_rate(const SystemParams& params, double d_km) {
  params.validate();
  const double eta_c = channel_transmittance(params.zeta, d_km);
  const double eta_d = params.eta_d;
  const double p_d = params.p_d;
  const double QA = eta_d * eta_c + p_d;
  const double QB = eta_d * eta_c * eta_c + p_d;
  if (!(QA > 0.0 && QB > 0.0)) return 0.0;
  const double e = (params.e_d * eta_d * eta_c * eta_c + params.e_0 * p_d) / QB;
  const double eps = (params.e_d * eta_d * eta_c + params.e_0 * p_d) / QA;
  const double eps_sum = std::min(2.0 * eps, 1.0);  // eps_x = eps_z = eps
  return std::max(QB * (1.0 - binary_entropy(e) - binary_entropy(eps_sum)), 0.0);
}

double mdi_rate(const SystemParams& params, double d_km) {
  params.validate();
  const double eta_c = channel_transmittance(params.zeta, d_km);
  const double t = params.mdi_transmittance == MdiTransmittance::Effective ? params.eta_d * eta_c : eta_c;
  const double p_d = params.p_d;
  const double s2 = (1.0 - p_d) * (1.0 - p_d);

  // Common background: dark-count-only and single-arrival-plus-dark terms.
  const double bg = (1.0 - t) * (1.0 - t) * p_d * p_d * s2 + (1.0 - t) * t * p_d * s2;
  const double P_HV = bg + 0.25 * t * t * s2;  // = P^VH
  const double P_HH = bg + 0.5 * t * t * p_d * s2;  // = P^VV
  const double P12_mp = bg + 0.25 * t * t * p_d * s2;  // P12^{-+} = P12^{+-} = P34^{-+} = P34^{+-}
  const double P14_mp = bg + 0.25 * t * t * (p_d + 1.0) * s2;  // P14^{-+} = P14^{+-} = P23^{-+} = P23^{+-}
  const double P12_pp = bg + 0.25 * t * t * (p_d + 1.0) * s2;  // P12^{++} = P34^{++} = P12^{--} = P34^{--}
  const double P14_pp = bg + 0.25 * t * t * p_d * s2;  // P14^{++} = P23^{++} = P14^{--} = P23^{--}

  const double G_X = P12_mp + P14_mp + P12_pp + P14_pp;  // = G_Y
  const double G_Z = 2.0 * (P_HV + P_HH);
  const double q_C1 = t / 3.0 * (G_X + G_Z);
  const double q_C2 = t + (1.0 - t) * p_d;
  const double Q = q_C1 * q_C2;
  if (!(Q > 0.0 && q_C2 > 0.0 && G_X > 0.0)) return 0.0;

  const double e_edt = params.e_d;
  const double e = (params.e_0 * p_d + e_edt * t) / q_C2;
  // (1,4),(2,3): P^{++} + P^{--};  (1,2),(3,4): P^{+-} + P^{-+}
  const double numerator = 2.0 * (P14_pp + P14_pp) + 2.0 * (P12_mp + P12_mp);
  const double eps_hat = numerator / (4.0 * G_X);
  const double eps_y = params.e_d * (1.0 - 2.0 * eps_hat) + eps_hat;
  return std::max(Q * (1.0 - binary_entropy(std::min(e, 1.0)) - binary_entropy(std::min(eps_y, 1.0))), 0.0);
}

ComparisonRates comparison_rates(const SystemParams& params, double d_km) {
  ComparisonRates out;
  const double eta_c = channel_transmittance(params.zeta, d_km);
  out.plob = eta_c >= 1.0 ? std::numeric_limits<double>::infinity() : plob_bound(eta_c);
  out.ideal = ideal_rates(params.eta_d, eta_c);
  out.dl04 = dl04_rate(params, d_km);
  out.mdi = mdi_rate(params, d_km);
  return out;
}

ChannelInformation channel_information(const SystemParams& params, const RateBreakdown& rates) {
  const double qQ = mode_match_rate(params.p_multi) * rates.Q;
  return {qQ * (1.0 - params.f * bound_entropy(rates.EX)), qQ * bound_entropy(rates.EZ)};
}

}  // namespace opiqsdc
