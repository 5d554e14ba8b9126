#include "opiqsdc/security.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "opiqsdc/errors.hpp"
#include "opiqsdc/rates.hpp"

namespace opiqsdc {

namespace {

double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

}  // namespace

void BellDiagonal::validate() const {
  for (const double l : {lambda1, lambda2, lambda3, lambda4})
    if (!(l >= 0.0)) throw std::invalid_argument("Bell-diagonal weights must be non-negative");
  const double total = lambda1 + lambda2 + lambda3 + lambda4;
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("Bell-diagonal weights must sum to 1");
}

double eve_information(const BellDiagonal& s) {
  s.validate();
  const double shannon = plogp(s.lambda1) + plogp(s.lambda2) + plogp(s.lambda3) + plogp(s.lambda4);
  return shannon - binary_entropy(std::clamp(s.lambda1 + s.lambda3, 0.0, 1.0));
}

double phase_error(const BellDiagonal& s) {
  s.validate();
  return s.lambda3 + s.lambda4;
}

double eve_bound_gap(const BellDiagonal& s) {
  return binary_entropy(std::clamp(phase_error(s), 0.0, 1.0)) - eve_information(s);
}

double FockCoefficients::norm_squared() const {
  double total = 0.0;
  for (std::size_t n = 0; n < c_even.size(); ++n) total += c_even[n] * c_even[n] + c_odd[n] * c_odd[n];
  return total;
}

FockCoefficients fock_coefficients(double u, int n_max) {
  if (!(u > 0.0) || !std::isfinite(u)) throw std::invalid_argument("intensity u must be > 0");
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");

  FockCoefficients out;
  out.n_max = n_max;
  out.c_even.resize(n_max + 1);
  out.c_odd.resize(n_max + 1);
  // C_0 = e^{-u}, C_{k+1} = C_k * sqrt(2u) / sqrt(k+1)
  const double step = std::sqrt(2.0 * u);
  double c = std::exp(-u);
  for (int k = 0; k <= 2 * n_max + 1; ++k) {
    if (k % 2 == 0) out.c_even[k / 2] = c;
    else out.c_odd[k / 2] = c;
    c *= step / std::sqrt(k + 1.0);
  }
  if (1.0 - out.norm_squared() > 1e-12)
    throw TruncationError("Fock expansion truncated at n_max=" + std::to_string(n_max) +
                          " leaves more than 1e-12 of the mass");
  return out;
}

double fock_weight(int k, double u) { return poisson_weight(k, 2.0 * u); }

ConditionalWeights conditional_weights(double u, double eta, double p_d, int n_max, bool include_vacuum) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  const double Q = gain(u, eta, p_d);
  if (!(Q > 0.0)) throw DegenerateChannel("zero gain: conditional state undefined");

  double even = 0.0;
  for (int n = include_vacuum ? 0 : 1; n <= n_max; ++n)
    even += std::sqrt(fock_weight(2 * n, u) * yield_n(2 * n, eta, p_d));
  double odd = 0.0;
  for (int n = 0; n <= n_max; ++n) odd += std::sqrt(fock_weight(2 * n + 1, u) * yield_n(2 * n + 1, eta, p_d));

  const double next = std::sqrt(fock_weight(2 * (n_max + 1), u));
  if (next > 1e-12 * even || std::sqrt(fock_weight(2 * n_max + 3, u)) > 1e-12 * odd)
    throw TruncationError("photon-number series not converged at n_max=" + std::to_string(n_max));

  return {odd * odd / Q, even * even / Q};
}

}  // namespace opiqsdc
