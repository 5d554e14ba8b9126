#include "opiqsdc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace opiqsdc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view value) {
  std::string buf(value);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(v))
    throw ConfigError(std::string(key), "expected a number, got '" + buf + "'");
  return v;
}

int parse_int(std::string_view key, std::string_view value) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ConfigError(std::string(key), "expected an integer, got '" + std::string(value) + "'");
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(std::string(key), "expected true/false, got '" + std::string(value) + "'");
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void apply_setting(SystemParams& p, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "zeta") p.zeta = parse_double(key, value);
  else if (key == "eta_d") p.eta_d = parse_double(key, value);
  else if (key == "p_d") p.p_d = parse_double(key, value);
  else if (key == "delta_mis") p.delta_mis = parse_double(key, value);
  else if (key == "f") p.f = parse_double(key, value);
  else if (key == "u") p.u = parse_double(key, value);
  else if (key == "p_multi") p.p_multi = parse_double(key, value);
  else if (key == "nu1") p.nu1 = parse_double(key, value);
  else if (key == "nu2") p.nu2 = parse_double(key, value);
  else if (key == "phase_slices") p.phase_slices = parse_int(key, value);
  else if (key == "e_d") p.e_d = parse_double(key, value);
  else if (key == "e_0") p.e_0 = parse_double(key, value);
  else if (key == "qber_sample_fraction") p.qber_sample_fraction = parse_double(key, value);
  else if (key == "include_vacuum") p.include_vacuum = parse_bool(key, value);
  else if (key == "misalignment_model") {
    if (value == "phase") p.misalignment_model = MisalignmentModel::PhaseOffset;
    else if (value == "probability") p.misalignment_model = MisalignmentModel::ErrorProbability;
    else throw ConfigError(std::string(key), "expected phase|probability");
  } else if (key == "branch_gain") {
    if (value == "split") p.branch_gain = BranchGain::Split;
    else if (value == "full") p.branch_gain = BranchGain::Full;
    else throw ConfigError(std::string(key), "expected split|full");
  } else if (key == "mdi_transmittance") {
    if (value == "effective") p.mdi_transmittance = MdiTransmittance::Effective;
    else if (value == "raw") p.mdi_transmittance = MdiTransmittance::Raw;
    else throw ConfigError(std::string(key), "expected effective|raw");
  } else if (key == "jitter_model") {
    if (value == "fixed") p.jitter_model = JitterModel::FixedOffset;
    else if (value == "jitter") p.jitter_model = JitterModel::RandomJitter;
    else throw ConfigError(std::string(key), "expected fixed|jitter");
  } else {
    throw ConfigError(std::string(key), "unknown key");
  }
}

SystemParams parse_params(std::string_view text, SystemParams base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected key = value");
    apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  try {
    base.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    throw ConfigError(msg.substr(0, msg.find(':')), msg.substr(msg.find(':') + 2));
  }
  return base;
}

SystemParams load_params(const std::filesystem::path& path, SystemParams base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_params(ss.str(), base);
}

std::string to_config_text(const SystemParams& p) {
  std::ostringstream out;
  out << "zeta = " << fmt17(p.zeta) << '\n'
      << "eta_d = " << fmt17(p.eta_d) << '\n'
      << "p_d = " << fmt17(p.p_d) << '\n'
      << "delta_mis = " << fmt17(p.delta_mis) << '\n'
      << "f = " << fmt17(p.f) << '\n'
      << "u = " << fmt17(p.u) << '\n'
      << "p_multi = " << fmt17(p.p_multi) << '\n'
      << "nu1 = " << fmt17(p.nu1) << '\n'
      << "nu2 = " << fmt17(p.nu2) << '\n'
      << "phase_slices = " << p.phase_slices << '\n'
      << "e_d = " << fmt17(p.e_d) << '\n'
      << "e_0 = " << fmt17(p.e_0) << '\n'
      << "qber_sample_fraction = " << fmt17(p.qber_sample_fraction) << '\n'
      << "misalignment_model = " << to_string(p.misalignment_model) << '\n'
      << "include_vacuum = " << (p.include_vacuum ? "true" : "false") << '\n'
      << "branch_gain = " << to_string(p.branch_gain) << '\n'
      << "mdi_transmittance = " << to_string(p.mdi_transmittance) << '\n'
      << "jitter_model = " << to_string(p.jitter_model) << '\n';
  return out.str();
}

std::vector<std::string> config_keys() {
  return {"zeta",  "eta_d", "p_d", "delta_mis", "f",   "u",
          "p_multi", "nu1", "nu2", "phase_slices", "e_d", "e_0",
          "qber_sample_fraction", "misalignment_model", "include_vacuum", "branch_gain",
          "mdi_transmittance", "jitter_model"};
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string params_digest(const SystemParams& params) { return hex64(fnv1a64(to_config_text(params))); }

}  // namespace opiqsdc
