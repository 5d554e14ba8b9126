#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>

#include "opiqsdc/rates.hpp"
#include "opiqsdc/rng.hpp"
#include "opiqsdc/security.hpp"

using namespace opiqsdc;
using doctest::Approx;

namespace {

// Uniform point on the 3-simplex from the spacings of three sorted uniforms.
BellDiagonal random_state(Rng& rng) {
  std::array<double, 3> c{uniform01(rng), uniform01(rng), uniform01(rng)};
  std::sort(c.begin(), c.end());
  return {c[0], c[1] - c[0], c[2] - c[1], 1.0 - c[2]};
}

}  // namespace

TEST_CASE("eve information spot values") {
  CHECK(eve_information({1, 0, 0, 0}) == 0.0);
  CHECK(eve_information({0.25, 0.25, 0.25, 0.25}) == Approx(1.0).epsilon(1e-15));
  CHECK(eve_information({0.5, 0.5, 0, 0}) == Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(eve_information({0.5, 0.6, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(eve_information({1.2, -0.2, 0, 0}), std::invalid_argument);
}

TEST_CASE("phase error") {
  CHECK(phase_error({1, 0, 0, 0}) == 0.0);
  CHECK(phase_error({0, 0, 0.5, 0.5}) == 1.0);
  CHECK(phase_error({0.2, 0.3, 0.1, 0.4}) == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("bound gap") {
  CHECK(eve_bound_gap({0.25, 0.25, 0.25, 0.25}) == Approx(0.0).epsilon(1e-15));
  CHECK(eve_bound_gap({1, 0, 0, 0}) == 0.0);
}

TEST_CASE("eve information never exceeds h(phase error)") {
  Rng rng(derive_seed(6, 0));
  double worst = 1.0;
  for (int i = 0; i < 20000; ++i) {
    const BellDiagonal s = random_state(rng);
    const double ie = eve_information(s);
    CHECK(ie >= -1e-12);
    const double gap = eve_bound_gap(s);
    worst = std::min(worst, gap);
  }
  CHECK(worst >= -1e-12);
}

TEST_CASE("fock coefficients") {
  const auto c = fock_coefficients(0.046, 40);
  CHECK(c.c_even[0] * c.c_even[0] == Approx(0.9121051495450904).epsilon(1e-14));
  CHECK(c.norm_squared() == Approx(1.0).epsilon(1e-14));
  for (int n = 0; n <= 40; ++n) {
    CHECK(std::abs(c.c_even[n] * c.c_even[n] - poisson_weight(2 * n, 0.092)) <= 1e-12);
    CHECK(std::abs(c.c_odd[n] * c.c_odd[n] - poisson_weight(2 * n + 1, 0.092)) <= 1e-12);
  }
  const auto tiny = fock_coefficients(1e-12, 5);
  CHECK(tiny.c_even[0] * tiny.c_even[0] == Approx(1.0).epsilon(1e-11));
  CHECK(tiny.c_odd[0] * tiny.c_odd[0] < 1e-11);
  CHECK_THROWS_AS(fock_coefficients(5.0, 2), TruncationError);
  CHECK_THROWS_AS(fock_coefficients(0.0, 5), std::invalid_argument);
}

TEST_CASE("conditional weights") {
  const double eta = 0.15;
  const auto w = conditional_weights(0.046, eta, 8e-8, 40, false);
  CHECK(w.w_phi_plus == Approx(0.083809049007080006).epsilon(1e-12));
  CHECK(w.w_phi_plus == z_error(0.046, eta, 8e-8, 40, false));
  CHECK(w.w_psi_plus > 0.9);
  CHECK(conditional_weights(0.046, eta, 8e-8, 40, true).w_phi_plus ==
        Approx(0.085709047277375798).epsilon(1e-12));
  CHECK(conditional_weights(1e-9, eta, 0.0, 40, false).w_phi_plus < 1e-8);
}

TEST_CASE("conditional weights match the phase-error series") {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const double u = 1e-3 + 0.3 * uniform01(rng);
    const double eta = std::pow(10.0, -5.0 * uniform01(rng));
    const double pd = 1e-5 * uniform01(rng);
    const bool vac = (i % 2) == 1;
    CHECK(conditional_weights(u, eta, pd, 40, vac).w_phi_plus == z_error(u, eta, pd, 40, vac));
  }
}
