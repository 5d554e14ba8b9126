#pragma once

#include <vector>

namespace opiqsdc {

/// Bell-diagonal Alice-Bob state. Weights of |Psi->, |Psi+>, |Phi->, |Phi+> in that order.
struct BellDiagonal {
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  double lambda4 = 0.0;

  // Non-negative weights summing to 1 within 1e-12; throws std::invalid_argument otherwise.
  void validate() const;
};

// H(lambda) - h(lambda1 + lambda3), in bits.
double eve_information(const BellDiagonal& state);

// lambda3 + lambda4
double phase_error(const BellDiagonal& state);

// h(phase_error) - eve_information; never below -1e-12 for a valid state.
double eve_bound_gap(const BellDiagonal& state);

/// Photon-number amplitudes of the coherent state |sqrt(2) alpha>, |alpha|^2 = u, split by
/// parity: c_even[n] = C_{2n}, c_odd[n] = C_{2n+1}, for n = 0..n_max.
struct FockCoefficients {
  std::vector<double> c_even;
  std::vector<double> c_odd;
  int n_max = 0;

  double norm_squared() const;
};

/// Throws TruncationError when the amplitudes beyond n_max carry more than 1e-12 of the mass.
FockCoefficients fock_coefficients(double u, int n_max);

// |C_k|^2, the Poisson weight at mean 2u.
double fock_weight(int k, double u);

struct ConditionalWeights {
  double w_psi_plus = 0.0;  // odd-photon weight
  double w_phi_plus = 0.0;  // even-photon weight; the phase-error rate
};

/// Raw weights of the post-click Alice-Bob state. They are not renormalized and their sum
/// may exceed 1; w_phi_plus is the operative phase-error rate.
ConditionalWeights conditional_weights(double u, double eta, double p_d, int n_max, bool include_vacuum);

}  // namespace opiqsdc
