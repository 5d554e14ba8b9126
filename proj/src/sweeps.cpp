#include "opiqsdc/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <stdexcept>

namespace opiqsdc {

namespace {

CurvePoint evaluate_point(const SystemParams& params, double d) {
  CurvePoint p;
  p.d = d;
  try {
    p.rate = secrecy_rate(params, d);
    p.comparison = comparison_rates(params, d);
    p.clipped = p.rate.RC <= 0.0 && p.rate.RD <= 0.0;
  } catch (const std::exception& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    p.rate = {d, nan, nan, nan, nan, nan, nan, nan};
    p.comparison = {nan, {nan, nan, nan}, nan, nan};
    p.error = e.what();
  }
  return p;
}

double rate_at(const SystemParams& params, double d) {
  try {
    return secrecy_rate(params, d).R;
  } catch (const std::exception&) {
    return 0.0;
  }
}

// R - PLOB; positive once the protocol beats the repeaterless bound.
double plob_margin(const SystemParams& params, double d) {
  return rate_at(params, d) - plob_bound(channel_transmittance(params.zeta, d));
}

}  // namespace

std::vector<double> distance_grid(double dmin, double dmax, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("step must be > 0");
  if (!(dmin >= 0.0) || !(dmax >= dmin)) throw std::invalid_argument("need 0 <= dmin <= dmax");
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor((dmax - dmin) / step * (1.0 + 1e-9) + 1e-9));
  grid.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) grid.push_back(dmin + static_cast<double>(i) * step);
  return grid;
}

std::vector<CurvePoint> rate_curve(const SystemParams& params, std::span<const double> grid, Execution exec) {
  params.validate();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw std::invalid_argument("distance grid must be non-negative");
    if (i > 0 && grid[i] < grid[i - 1]) throw std::invalid_argument("distance grid must be sorted");
  }
  std::vector<CurvePoint> out(grid.size());
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = evaluate_point(params, grid[i]);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = evaluate_point(params, grid[i]);
  }
  return out;
}

CrossingResult find_plob_crossing(const SystemParams& params, double lo, double hi, double tol) {
  params.validate();
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("crossing search needs 0 < lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  CrossingResult res{std::nullopt, lo, hi};
  double a = lo;
  double fa = plob_margin(params, a);
  if (fa > 0.0) return res;  // already above the bound: no sign change to bracket
  while (a < hi) {
    const double b = std::min(hi, a + 1.0);
    const double fb = plob_margin(params, b);
    if (fb > 0.0) {
      double x0 = a, x1 = b;
      while (x1 - x0 > tol) {
        const double mid = 0.5 * (x0 + x1);
        (plob_margin(params, mid) > 0.0 ? x1 : x0) = mid;
      }
      res.km = 0.5 * (x0 + x1);
      return res;
    }
    a = b;
    fa = fb;
  }
  return res;
}

std::string to_string(DistanceStatus s) {
  switch (s) {
    case DistanceStatus::Found: return "found";
    case DistanceStatus::NoPositiveRate: return "no_positive_rate";
    case DistanceStatus::BeyondCeiling: return "beyond_ceiling";
  }
  return "?";
}

MaxDistanceResult max_distance(const SystemParams& params, double tol, double ceiling) {
  params.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (!(rate_at(params, 0.0) > 0.0)) return {DistanceStatus::NoPositiveRate, 0.0};
  double a = 0.0;
  while (a < ceiling) {
    const double b = std::min(ceiling, a + 1.0);
    if (!(rate_at(params, b) > 0.0)) {
      double x0 = a, x1 = b;
      while (x1 - x0 > tol) {
        const double mid = 0.5 * (x0 + x1);
        (rate_at(params, mid) > 0.0 ? x0 : x1) = mid;
      }
      return {DistanceStatus::Found, x0};
    }
    a = b;
  }
  return {DistanceStatus::BeyondCeiling, ceiling};
}

IntensityOptimum optimize_intensity(const SystemParams& params, double u_lo, double u_hi, double u_tol,
                                    Execution exec) {
  params.validate();
  if (!(u_lo > 0.0) || !(u_hi > u_lo)) throw std::invalid_argument("intensity range needs 0 < u_lo < u_hi");
  if (!(u_tol > 0.0)) throw std::invalid_argument("u tolerance must be > 0");
  constexpr int kCoarse = 50;
  constexpr double kDistTol = 1e-4;

  auto reach = [&](double u) {
    SystemParams p = params;
    p.u = u;
    return max_distance(p, kDistTol).km;
  };

  IntensityOptimum out;
  out.grid_u.resize(kCoarse);
  out.grid_d.resize(kCoarse);
  for (int i = 0; i < kCoarse; ++i) out.grid_u[i] = u_lo + (u_hi - u_lo) * i / (kCoarse - 1);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < kCoarse; ++i) out.grid_d[i] = reach(out.grid_u[i]);
  } else {
    for (int i = 0; i < kCoarse; ++i) out.grid_d[i] = reach(out.grid_u[i]);
  }

  const int best = static_cast<int>(std::max_element(out.grid_d.begin(), out.grid_d.end()) - out.grid_d.begin());
  // Unimodal: non-decreasing up to the best point and non-increasing after it, up to the
  // bisection resolution of the objective.
  const double slack = 2.0 * kDistTol;
  for (int i = 1; i < kCoarse; ++i) {
    const double step = out.grid_d[i] - out.grid_d[i - 1];
    if ((i <= best && step < -slack) || (i > best && step > slack)) out.unimodal = false;
  }

  const int lo_i = std::max(0, best - 1);
  const int hi_i = std::min(kCoarse - 1, best + 1);
  out.bracket_lo = out.grid_u[lo_i];
  out.bracket_hi = out.grid_u[hi_i];
  out.d_at_lo = out.grid_d[lo_i];
  out.d_at_hi = out.grid_d[hi_i];
  out.u_star = out.grid_u[best];
  out.d_max = out.grid_d[best];
  if (!out.unimodal) {
    out.warning = "coarse scan is not unimodal; returning the coarse-grid maximum";
    return out;
  }

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = out.bracket_lo, b = out.bracket_hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = reach(c), fd = reach(d);
  while (b - a > u_tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = reach(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = reach(d);
    }
  }
  const double u_mid = 0.5 * (a + b);
  const double f_mid = reach(u_mid);
  if (f_mid >= out.d_max) {
    out.u_star = u_mid;
    out.d_max = f_mid;
  }
  return out;
}

std::vector<DarkCountCurve> dark_count_sweep(const SystemParams& params, std::span<const double> p_d_values,
                                             std::span<const double> grid, Execution exec) {
  std::vector<DarkCountCurve> out;
  for (const double pd : p_d_values) {
    SystemParams p = params;
    p.p_d = pd;
    p.validate();
    DarkCountCurve c;
    c.p_d = pd;
    c.curve = rate_curve(p, grid, exec);
    c.crossing = find_plob_crossing(p);
    c.reach = max_distance(p);
    out.push_back(std::move(c));
  }
  return out;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::string out = "d_km,R,log10R,plob,dl04,mdi,opi_ideal,dl04_ideal,mdi_ideal,Q,EX,EZ\n";
  char buf[512];
  for (const CurvePoint& p : curve) {
    const double log_r = p.ok() ? (p.rate.R > 0.0 ? std::log10(p.rate.R) : -INFINITY) : NAN;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.d,
                  p.rate.R, log_r, p.comparison.plob, p.comparison.dl04, p.comparison.mdi, p.comparison.ideal.opi,
                  p.comparison.ideal.dl04, p.comparison.ideal.mdi, p.rate.Q, p.rate.EX, p.rate.EZ);
    out += buf;
  }
  return out;
}

}  // namespace opiqsdc
