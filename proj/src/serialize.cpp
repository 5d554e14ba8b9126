#include "opiqsdc/serialize.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "opiqsdc/config.hpp"

namespace opiqsdc {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const SystemParams& params) {
  // Mirrors the canonical config text so both renderings share one key order.
  Json out = Json::object();
  std::istringstream lines(to_config_text(params));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find(" = ");
    if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 3);
    char* end = nullptr;
    const double num = std::strtod(value.c_str(), &end);
    if (value == "true" || value == "false") out[key] = value == "true";
    else if (end && *end == '\0' && !value.empty()) out[key] = num;
    else out[key] = value;
  }
  return out;
}

Json to_json(const RateBreakdown& r) {
  return {{"d_km", r.d},
          {"eta", number_or_null(r.eta)},
          {"Q", number_or_null(r.Q)},
          {"EX", number_or_null(r.EX)},
          {"EZ", number_or_null(r.EZ)},
          {"RC", number_or_null(r.RC)},
          {"RD", number_or_null(r.RD)},
          {"R", number_or_null(r.R)}};
}

Json to_json(const ComparisonRates& c) {
  return {{"plob", number_or_null(c.plob)},
          {"dl04", number_or_null(c.dl04)},
          {"mdi", number_or_null(c.mdi)},
          {"opi_ideal", number_or_null(c.ideal.opi)},
          {"dl04_ideal", number_or_null(c.ideal.dl04)},
          {"mdi_ideal", number_or_null(c.ideal.mdi)}};
}

Json to_json(const CurvePoint& p) {
  Json j = {{"d_km", p.d}};
  if (!p.ok()) {
    j["error"] = p.error;
    return j;
  }
  j["R"] = number_or_null(p.rate.R);
  j["log10R"] = p.rate.R > 0.0 ? Json(std::log10(p.rate.R)) : Json(nullptr);
  j["R_clipped"] = p.clipped;
  const Json comparison = to_json(p.comparison);
  for (const auto& [k, v] : comparison.items()) j[k] = v;
  j["Q"] = number_or_null(p.rate.Q);
  j["EX"] = number_or_null(p.rate.EX);
  j["EZ"] = number_or_null(p.rate.EZ);
  return j;
}

Json curve_json(const std::vector<CurvePoint>& curve) {
  Json arr = Json::array();
  for (const auto& p : curve) arr.push_back(to_json(p));
  return arr;
}

Json to_json(const CrossingResult& c) {
  return {{"crossing_km", c.km ? Json(*c.km) : Json(nullptr)},
          {"found", c.km.has_value()},
          {"search_lo_km", c.lo},
          {"search_hi_km", c.hi}};
}

Json to_json(const MaxDistanceResult& m) {
  return {{"status", to_string(m.status)},
          {"max_distance_km", m.status == DistanceStatus::NoPositiveRate ? Json(nullptr) : Json(m.km)}};
}

Json to_json(const IntensityOptimum& o) {
  return {{"u_star", o.u_star},
          {"d_max_km", o.d_max},
          {"unimodal", o.unimodal},
          {"warning", o.warning.empty() ? Json(nullptr) : Json(o.warning)},
          {"bracket", {{"u_lo", o.bracket_lo}, {"u_hi", o.bracket_hi}, {"d_lo_km", o.d_at_lo}, {"d_hi_km", o.d_at_hi}}},
          {"coarse_u", o.grid_u},
          {"coarse_d_km", o.grid_d}};
}

Json to_json(const std::optional<Estimate>& e) {
  if (!e) return nullptr;
  return {{"value", e->value}, {"std_error", e->std_error}, {"successes", e->successes}, {"trials", e->trials}};
}

Json to_json(const SimReport& r) {
  Json j = {{"n_pulses", r.n_pulses},
            {"seed", r.seed},
            {"shards", r.shards},
            {"d_km", r.d_km},
            {"params_digest", r.params_digest},
            {"truth_access", r.truth_access},
            {"kept_coding", r.kept_coding},
            {"kept_decoy", r.kept_decoy},
            {"mode_match_hat", to_json(r.mode_match_hat)},
            {"Q_hat", to_json(r.Q_hat)},
            {"EX_hat", to_json(r.EX_hat)},
            {"EX_hat_sampled", to_json(r.EX_hat_sampled)}};
  j["yields_hat"] = {{"nu1", to_json(r.yields_hat[0])},
                     {"nu2", to_json(r.yields_hat[1])},
                     {"vacuum", to_json(r.yields_hat[2])}};
  if (r.truth_access) {
    Json ty = Json::array();
    for (const auto& e : r.truth_yields) ty.push_back(to_json(e));
    j["truth_yields"] = ty;
  }
  return j;
}

Json to_json(const AnalyticComparison& c) {
  auto z = [](const std::optional<double>& v) { return v ? number_or_null(*v) : Json(nullptr); };
  return {{"Q", c.Q},
          {"EX", c.EX},
          {"z_Q", z(c.z_Q)},
          {"z_EX", z(c.z_EX)},
          {"decoy_gain", {{"nu1", c.decoy_gain[0]}, {"nu2", c.decoy_gain[1]}, {"vacuum", c.decoy_gain[2]}}},
          {"z_decoy", {{"nu1", z(c.z_decoy[0])}, {"nu2", z(c.z_decoy[1])}, {"vacuum", z(c.z_decoy[2])}}}};
}

Json to_json(const FrameRecord& f) {
  Json j = {{"index", f.index},
            {"kind", to_string(f.kind)},
            {"k", f.cfg.k},
            {"n", f.cfg.n},
            {"r", f.cfg.r},
            {"K", f.K},
            {"inner_codec", f.inner_codec}};
  if (f.previous) j["previous_estimate"] = {{"I_AB", f.previous->I_AB}, {"I_AE", f.previous->I_AE}};
  j["rate_check"] = {{"accepted", f.check.accepted()},
                     {"security_ok", f.check.security_ok},
                     {"reliability_ok", f.check.reliability_ok},
                     {"reason", f.check.reason}};
  j["transmitted"] = f.transmitted;
  if (!f.transmitted) return j;
  j["payload_bits"] = f.payload_bits;
  j["delivered"] = f.delivered;
  j["disclosed_positions"] = f.disclosed;
  j["decoded"] = f.decoded;
  if (!f.decoded) return j;
  j["bit_errors"] = f.bit_errors;
  j["qber_hat"] = f.qber_hat;
  j["estimate"] = {{"I_AB", f.estimate.I_AB}, {"I_AE", f.estimate.I_AE}};
  j["ssts"] = {{"extracted", f.extracted},
               {"pool_alice", f.pool_alice},
               {"pool_bob", f.pool_bob},
               {"pools_equal", f.pools_equal}};
  return j;
}

Json to_json(const PipelineResult& r) {
  Json frames = Json::array();
  for (const auto& f : r.frames) frames.push_back(to_json(f));
  return {{"status", to_string(r.status)},
          {"message", r.message},
          {"failed_frame", r.failed_frame ? Json(*r.failed_frame) : Json(nullptr)},
          {"message_match", r.message_match},
          {"decoded_bits", r.decoded.size()},
          {"data_frames", r.data_frames},
          {"random_frames", r.random_frames},
          {"frames", frames}};
}

}  // namespace opiqsdc
