#include "doctest.h"

#include <chrono>
#include <cmath>
#include <sstream>

#include "opiqsdc/sweeps.hpp"

using namespace opiqsdc;
using doctest::Approx;

// Reference distances from tests/oracles/oracle.py (root finding in 50-digit arithmetic).
constexpr double kCrossingKm = 228.91274294464414;
constexpr double kReachKm = 443.45990227887782;

TEST_CASE("distance grid") {
  const auto g = distance_grid(0, 500, 1);
  CHECK(g.size() == 501);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 500.0);
  CHECK(distance_grid(0, 1, 0.1).size() == 11);
  CHECK_THROWS(distance_grid(0, 10, 0));
  CHECK_THROWS(distance_grid(10, 0, 1));
}

TEST_CASE("rate curve") {
  const SystemParams p;
  const auto grid = distance_grid(0, 500, 1);
  const auto t0 = std::chrono::steady_clock::now();
  const auto par = rate_curve(p, grid, Execution::Parallel);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 10.0);
  const auto ser = rate_curve(p, grid, Execution::Serial);
  REQUIRE(par.size() == 501);
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].ok());
    CHECK(par[i].rate == ser[i].rate);
    CHECK(par[i].comparison.dl04 == ser[i].comparison.dl04);
    if (i > 0) CHECK(par[i].rate.R <= par[i - 1].rate.R);
  }
  CHECK(par[0].rate.R > 0.0);
  CHECK(std::isinf(par[0].comparison.plob));
  CHECK(par[500].clipped);
  CHECK(par[500].rate.R == 0.0);
  CHECK(curve_csv(par) == curve_csv(ser));
}

TEST_CASE("bad points do not abort the sweep") {
  // Without dark counts the gain underflows to zero far out, leaving the error rates undefined.
  SystemParams p;
  p.p_d = 0.0;
  const std::vector<double> grid{0.0, 1e5, 2e5};
  const auto c = rate_curve(p, grid);
  CHECK(c[0].ok());
  CHECK_FALSE(c[1].ok());
  CHECK(std::isnan(c[1].rate.R));
  CHECK_FALSE(c[2].ok());
  CHECK(c[1].error.find("zero gain") != std::string::npos);
  const std::vector<double> unsorted{5.0, 1.0};
  CHECK_THROWS(rate_curve(SystemParams{}, unsorted));
}

TEST_CASE("curve csv") {
  const auto c = rate_curve(SystemParams{}, distance_grid(0, 2, 1));
  std::istringstream in(curve_csv(c));
  std::string line;
  std::getline(in, line);
  CHECK(line == "d_km,R,log10R,plob,dl04,mdi,opi_ideal,dl04_ideal,mdi_ideal,Q,EX,EZ");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("ideal rate slope") {
  const SystemParams p;
  for (double d = 0; d < 500; d += 7) {
    const auto a = ideal_rates(p.eta_d, channel_transmittance(p.zeta, d));
    const auto b = ideal_rates(p.eta_d, channel_transmittance(p.zeta, d + 1));
    CHECK(std::abs((std::log10(a.opi) - std::log10(b.opi)) - 0.01) < 1e-12);
  }
}

TEST_CASE("PLOB crossing") {
  SystemParams p;
  const auto c = find_plob_crossing(p);
  REQUIRE(c.km.has_value());
  CHECK(*c.km == Approx(kCrossingKm).epsilon(1e-5));
  const auto other = find_plob_crossing(p, 150.0, 400.0);
  CHECK(std::abs(*other.km - *c.km) < 0.1);

  p.eta_d = 1.0;
  p.p_d = 0.0;
  const auto ideal = find_plob_crossing(p);
  REQUIRE(ideal.km.has_value());
  CHECK(*ideal.km < *c.km);

  p = SystemParams{};
  p.p_d = 4e-6;
  CHECK_FALSE(find_plob_crossing(p).km.has_value());
  CHECK_THROWS(find_plob_crossing(SystemParams{}, 10.0, 5.0));
}

TEST_CASE("maximum distance") {
  SystemParams p;
  const auto r = max_distance(p);
  CHECK(r.status == DistanceStatus::Found);
  CHECK(r.km == Approx(kReachKm).epsilon(1e-5));
  CHECK(secrecy_rate(p, r.km).R > 0.0);
  CHECK(secrecy_rate(p, r.km + 0.01).R == 0.0);

  SystemParams clean = p;
  clean.p_d = 0.0;
  clean.delta_mis = 0.0;
  const auto c = max_distance(clean);
  CHECK(c.status == DistanceStatus::BeyondCeiling);
  CHECK(c.km == kSearchCeilingKm);
  CHECK(max_distance(clean, 1e-3, 2000.0).km > r.km);

  SystemParams weak = p;
  weak.u = 1e-6;
  CHECK(max_distance(weak).km < 100.0);

  SystemParams dead = p;
  dead.f = 1e6;
  CHECK(max_distance(dead).status == DistanceStatus::NoPositiveRate);
}

TEST_CASE("intensity optimizer") {
  const SystemParams p;
  const auto a = optimize_intensity(p);
  const auto b = optimize_intensity(p, 0.005, 0.2, 1e-5, Execution::Serial);
  CHECK(a.unimodal);
  CHECK(a.u_star == b.u_star);
  CHECK(a.d_max == b.d_max);
  CHECK(a.grid_u.size() == 50);
  CHECK(a.d_max > a.d_at_lo);
  CHECK(a.d_max > a.d_at_hi);
  CHECK((a.u_star > a.bracket_lo && a.u_star < a.bracket_hi));
  CHECK(a.d_max >= kReachKm);
}

TEST_CASE("dark-count sweep ordering") {
  const SystemParams p;
  const std::vector<double> pds{0.0, 8e-8, 8e-7, 4e-6};
  const auto grid = distance_grid(0, 100, 10);
  const auto fam = dark_count_sweep(p, pds, grid);
  REQUIRE(fam.size() == 4);
  CHECK(fam[0].reach.status == DistanceStatus::BeyondCeiling);
  for (std::size_t i = 1; i < fam.size(); ++i) {
    CHECK(fam[i].reach.status == DistanceStatus::Found);
    CHECK(fam[i].reach.km < fam[i - 1].reach.km);
    CHECK(fam[i].curve.size() == grid.size());
  }
  CHECK(fam[1].crossing.km.has_value());
  CHECK(fam[2].crossing.km.has_value());
}
