#include "opiqsdc/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace opiqsdc {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
}

}  // namespace

double SystemParams::misalignment_sin2() const {
  if (misalignment_model == MisalignmentModel::ErrorProbability) return delta_mis;
  const double s = std::sin(0.5 * delta_mis);
  return s * s;
}

void SystemParams::validate() const {
  require(std::isfinite(zeta) && zeta >= 0.0, "zeta", "must be finite and >= 0");
  require(eta_d >= 0.0 && eta_d <= 1.0, "eta_d", "must lie in [0,1]");
  require(p_d >= 0.0 && p_d < 1.0, "p_d", "must lie in [0,1)");
  require(std::isfinite(delta_mis) && delta_mis >= 0.0, "delta_mis", "must be finite and >= 0");
  if (misalignment_model == MisalignmentModel::ErrorProbability)
    require(delta_mis <= 1.0, "delta_mis", "must lie in [0,1] as an error probability");
  require(std::isfinite(f) && f >= 1.0, "f", "must be >= 1");
  require(std::isfinite(u) && u > 0.0, "u", "must be > 0");
  require(p_multi >= 0.0 && p_multi <= 1.0, "p_multi", "must lie in [0,1]");
  require(nu2 > 0.0, "nu2", "must be > 0");
  require(nu1 > nu2, "nu1", "must exceed nu2");
  require(phase_slices >= 2 && phase_slices % 2 == 0, "phase_slices", "must be even and >= 2");
  require(e_d >= 0.0 && e_d <= 1.0, "e_d", "must lie in [0,1]");
  require(e_0 >= 0.0 && e_0 <= 1.0, "e_0", "must lie in [0,1]");
  require(qber_sample_fraction >= 0.0 && qber_sample_fraction <= 1.0, "qber_sample_fraction",
          "must lie in [0,1]");
}

void SystemParams::validate_decoys() const {
  validate();
  require(u > nu1, "u", "must exceed the decoy intensity nu1");
}

double channel_transmittance(double zeta, double d_km) {
  if (!(d_km >= 0.0) || !std::isfinite(d_km)) throw std::invalid_argument("distance must be finite and >= 0");
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) throw std::invalid_argument("zeta must be finite and >= 0");
  return std::pow(10.0, -zeta * d_km / 10.0);
}

double system_transmittance(const SystemParams& params, double d_km) {
  return params.eta_d * std::sqrt(channel_transmittance(params.zeta, d_km));
}

double mode_match_rate(double p_multi) {
  if (!(p_multi >= 0.0 && p_multi <= 1.0)) throw std::invalid_argument("p_multi must lie in [0,1]");
  return 1.0 - 2.0 * p_multi * (1.0 - p_multi);
}

std::string to_string(MisalignmentModel m) {
  return m == MisalignmentModel::PhaseOffset ? "phase" : "probability";
}
std::string to_string(BranchGain g) { return g == BranchGain::Split ? "split" : "full"; }
std::string to_string(MdiTransmittance t) {
  return t == MdiTransmittance::Effective ? "effective" : "raw";
}
std::string to_string(JitterModel j) { return j == JitterModel::FixedOffset ? "fixed" : "jitter"; }

}  // namespace opiqsdc
