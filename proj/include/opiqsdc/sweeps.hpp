#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opiqsdc/channel.hpp"
#include "opiqsdc/execution.hpp"
#include "opiqsdc/rates.hpp"

namespace opiqsdc {

inline constexpr double kSearchCeilingKm = 600.0;

struct CurvePoint {
  double d = 0.0;
  RateBreakdown rate;
  ComparisonRates comparison;
  bool clipped = false;  // both branch rates <= 0, so R was clipped to zero
  std::string error;     // non-empty when this point failed; the numeric fields are then unset

  bool ok() const { return error.empty(); }
};

// dmin, dmin + step, ... up to dmax inclusive (within step/1e9). step must be > 0.
std::vector<double> distance_grid(double dmin, double dmax, double step);

/// Evaluates every grid point; a failing point records its error and the sweep goes on.
/// The result depends only on (params, grid); Parallel and Serial produce identical output.
std::vector<CurvePoint> rate_curve(const SystemParams& params, std::span<const double> grid,
                                   Execution exec = Execution::Parallel);

struct CrossingResult {
  std::optional<double> km;  // nullopt: R - PLOB never turns positive on the interval
  double lo = 1.0;
  double hi = kSearchCeilingKm;
};

/// First distance in [lo, hi] where the secrecy rate rises above the PLOB bound: a 1 km
/// scan locates the sign change of R - PLOB, bisection refines it to `tol`.
CrossingResult find_plob_crossing(const SystemParams& params, double lo = 1.0, double hi = kSearchCeilingKm,
                                  double tol = 1e-3);

enum class DistanceStatus { Found, NoPositiveRate, BeyondCeiling };
std::string to_string(DistanceStatus s);

struct MaxDistanceResult {
  DistanceStatus status = DistanceStatus::Found;
  double km = 0.0;  // Found: last distance with R > 0; BeyondCeiling: the ceiling
};

MaxDistanceResult max_distance(const SystemParams& params, double tol = 1e-3, double ceiling = kSearchCeilingKm);

struct IntensityOptimum {
  double u_star = 0.0;
  double d_max = 0.0;
  bool unimodal = true;
  std::string warning;
  double bracket_lo = 0.0;  // coarse neighbours of the best grid point
  double bracket_hi = 0.0;
  double d_at_lo = 0.0;
  double d_at_hi = 0.0;
  std::vector<double> grid_u;  // coarse scan
  std::vector<double> grid_d;
};

/// 50-point coarse scan of max_distance over [u_lo, u_hi], then golden-section refinement
/// around the best point to `u_tol`. A non-unimodal scan returns the coarse maximum with a
/// warning.
IntensityOptimum optimize_intensity(const SystemParams& params, double u_lo = 0.005, double u_hi = 0.2,
                                    double u_tol = 1e-5, Execution exec = Execution::Parallel);

struct DarkCountCurve {
  double p_d = 0.0;
  std::vector<CurvePoint> curve;
  CrossingResult crossing;
  MaxDistanceResult reach;
};

std::vector<DarkCountCurve> dark_count_sweep(const SystemParams& params, std::span<const double> p_d_values,
                                             std::span<const double> grid, Execution exec = Execution::Parallel);

// Columns: d_km,R,log10R,plob,dl04,mdi,opi_ideal,dl04_ideal,mdi_ideal,Q,EX,EZ
std::string curve_csv(const std::vector<CurvePoint>& curve);

}  // namespace opiqsdc
