#include "cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "opiqsdc/config.hpp"
#include "opiqsdc/frame_coding.hpp"
#include "opiqsdc/pulse_sim.hpp"
#include "opiqsdc/serialize.hpp"
#include "opiqsdc/sweeps.hpp"

namespace opiqsdc::cli {

namespace fs = std::filesystem;

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// Output bookkeeping for one command run; produces the reproduction manifest.
struct Run {
  std::string command;
  std::vector<std::string> argv;
  SystemParams params;
  std::optional<std::uint64_t> seed;
  std::string out_base;
  Json outputs = Json::array();

  void emit(const std::string& suffix, const std::string& content) {
    const std::string path = out_base + suffix;
    write_atomic(path, content);
    outputs.push_back(
        {{"suffix", suffix}, {"path", path}, {"bytes", content.size()}, {"fnv1a64", hex64(fnv1a64(content))}});
  }

  void write_manifest() {
    if (out_base.empty()) return;
    const Json m = {{"tool", "opiqsdc"},
                    {"version", kToolVersion},
                    {"command", command},
                    {"argv", argv},
                    {"params", to_json(params)},
                    {"params_text", to_config_text(params)},
                    {"seed", seed ? Json(*seed) : Json(nullptr)},
                    {"outputs", outputs}};
    write_atomic(out_base + ".manifest.json", m.dump(2) + "\n");
  }
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

SystemParams resolve_params(const std::string& config_path, const std::vector<std::string>& sets) {
  std::string path = config_path;
  if (path.empty())
    if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
  SystemParams params = path.empty() ? SystemParams{} : load_params(path);
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("", "--set expects key=value, got '" + s + "'");
    apply_setting(params, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    throw ConfigError(what.substr(0, what.find(':')), what);
  }
  return params;
}

// Replay drops the parameter sources (replaced by the recorded parameter set) and points
// --out at a scratch location.
std::vector<std::string> replay_args(const std::vector<std::string>& argv, const std::string& new_out) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < argv.size(); ++i) {
    const std::string& a = argv[i];
    bool matched = false;
    for (const std::string opt : {"--config", "--set", "--out"}) {
      if (a == opt) {
        ++i;
        matched = true;
      } else if (a.rfind(opt + "=", 0) == 0) {
        matched = true;
      }
      if (matched) {
        if (opt == "--out") {
          out.push_back("--out");
          out.push_back(new_out);
        }
        break;
      }
    }
    if (!matched) out.push_back(a);
  }
  return out;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             const SystemParams* override_params);

int replay(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  const Json m = Json::parse(read_file(manifest_path));
  if (m.value("tool", "") != "opiqsdc") throw UsageError("'" + manifest_path + "' is not an opiqsdc manifest");
  const SystemParams params = parse_params(m.at("params_text").get<std::string>());
  const fs::path scratch = fs::temp_directory_path() / ("opiqsdc-replay-" + std::to_string(::getpid()));
  fs::create_directories(scratch);
  const std::string base = (scratch / "out").string();
  const auto argv = replay_args(m.at("argv").get<std::vector<std::string>>(), base);

  std::ostringstream sink_out, sink_err;
  const int code = dispatch(argv, sink_out, sink_err, &params);
  Json report = {{"command", "replay"}, {"manifest", manifest_path}, {"exit_code", code}};
  bool identical = code == kOk;
  Json rows = Json::array();
  for (const auto& o : m.at("outputs")) {
    const std::string suffix = o.at("suffix");
    std::string digest;
    try {
      digest = hex64(fnv1a64(read_file(base + suffix)));
    } catch (const UsageError&) {
      digest = "missing";
    }
    const bool same = digest == o.at("fnv1a64").get<std::string>();
    identical = identical && same;
    rows.push_back({{"suffix", suffix}, {"recorded", o.at("fnv1a64")}, {"replayed", digest}, {"identical", same}});
  }
  fs::remove_all(scratch);
  report["outputs"] = rows;
  report["reproduced"] = identical;
  out << dump(report);
  if (!identical) err << "opiqsdc: replay did not reproduce the recorded outputs\n" << sink_err.str();
  return identical ? kOk : kComputation;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             const SystemParams* override_params) {
  CLI::App app{"Rate analysis, pulse simulation and frame coding for one-photon-interference QSDC"};
  app.name("opiqsdc");
  app.set_version_flag("--version", kToolVersion);
  app.fallthrough();
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<std::string> sets;
  bool serial = false;
  app.add_option("--config", config_path, "flat key = value parameter file (default: $" + std::string(kConfigEnv) + ")");
  app.add_option("--set", sets, "override one parameter, key=value (repeatable)")->allow_extra_args(false);
  app.add_flag("--serial", serial, "use the serial reference kernels instead of OpenMP");

  std::string out_base;
  auto add_out = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option("--out", out_base, "output path prefix; a .manifest.json is written next to it");
    if (required) o->required();
  };

  double dmin = 0.0, dmax = 500.0, step = 1.0;
  auto* c_curve = app.add_subcommand("rate-curve", "secrecy and comparison rates over a distance grid (CSV + JSON)");
  c_curve->add_option("--dmin", dmin, "first distance, km")->check(CLI::NonNegativeNumber);
  c_curve->add_option("--dmax", dmax, "last distance, km")->check(CLI::NonNegativeNumber);
  c_curve->add_option("--step", step, "grid step, km")->check(CLI::PositiveNumber);
  add_out(c_curve, true);

  double u_lo = 0.005, u_hi = 0.2, u_tol = 1e-5;
  auto* c_opt = app.add_subcommand("optimize-u", "intensity maximizing the transmission distance");
  c_opt->add_option("--u-min", u_lo)->check(CLI::PositiveNumber);
  c_opt->add_option("--u-max", u_hi)->check(CLI::PositiveNumber);
  c_opt->add_option("--u-tol", u_tol)->check(CLI::PositiveNumber);
  add_out(c_opt, false);

  std::vector<double> pd_values{8e-8, 8e-7, 4e-6};
  auto* c_pd = app.add_subcommand("sweep-pd", "rate curves for a family of dark-count probabilities");
  c_pd->add_option("--pd", pd_values, "comma-separated dark-count probabilities")->delimiter(',');
  c_pd->add_option("--dmin", dmin)->check(CLI::NonNegativeNumber);
  c_pd->add_option("--dmax", dmax)->check(CLI::NonNegativeNumber);
  c_pd->add_option("--step", step)->check(CLI::PositiveNumber);
  add_out(c_pd, false);

  double lo = 1.0, hi = kSearchCeilingKm, tol = 1e-3;
  auto* c_cross = app.add_subcommand("plob-crossing", "distance where the secrecy rate overtakes the PLOB bound");
  c_cross->add_option("--lo", lo)->check(CLI::PositiveNumber);
  c_cross->add_option("--hi", hi)->check(CLI::PositiveNumber);
  c_cross->add_option("--tol", tol)->check(CLI::PositiveNumber);
  add_out(c_cross, false);

  auto* c_reach = app.add_subcommand("max-distance", "largest distance with a positive secrecy rate");
  c_reach->add_option("--tol", tol)->check(CLI::PositiveNumber);
  add_out(c_reach, false);

  double distance = 0.0, pulses = 0.0;
  std::uint64_t seed = 1;
  int shards = 4;
  bool truth = false;
  auto* c_sim = app.add_subcommand("simulate", "pulse-level Monte Carlo compared against the analytic model");
  c_sim->add_option("--distance", distance, "km")->check(CLI::NonNegativeNumber);
  c_sim->add_option("--pulses", pulses, "number of rounds (>= 1)")->required();
  c_sim->add_option("--seed", seed);
  c_sim->add_option("--shards", shards)->check(CLI::PositiveNumber);
  c_sim->add_flag("--truth", truth, "tag photon numbers and tabulate per-photon-number yields");
  add_out(c_sim, false);

  std::string message_file, channel_kind = "synthetic", precoder = "identity";
  std::size_t random_bytes = 4096, frame_length = 1024;
  double qber = 0.0, erasure = 0.0, phase_err = 0.05, margin = 0.9;
  std::optional<std::size_t> fixed_k;
  std::optional<double> assumed_qber;
  auto* c_frame = app.add_subcommand("frame-demo", "end-to-end frame pipeline transcript");
  c_frame->add_option("--message-file", message_file, "message to send (default: --random-bytes of seeded data)");
  c_frame->add_option("--random-bytes", random_bytes);
  c_frame->add_option("--qber", qber, "synthetic channel flip rate")->check(CLI::Range(0.0, 1.0));
  c_frame->add_option("--assumed-qber", assumed_qber, "flip rate the parties plan for (default: the true one)")
      ->check(CLI::Range(0.0, 0.5));
  c_frame->add_option("--erasure", erasure, "synthetic channel erasure rate")->check(CLI::Range(0.0, 1.0));
  c_frame->add_option("--phase-error", phase_err, "synthetic channel phase error")->check(CLI::Range(0.0, 1.0));
  c_frame->add_option("--channel", channel_kind)->check(CLI::IsMember({"synthetic", "pulse"}));
  c_frame->add_option("--distance", distance, "km, pulse channel")->check(CLI::NonNegativeNumber);
  c_frame->add_option("--precoder", precoder)->check(CLI::IsMember({"identity", "repetition3", "ldpc", "dense"}));
  c_frame->add_option("--frame-length", frame_length)->check(CLI::PositiveNumber);
  c_frame->add_option("--rate-margin", margin)->check(CLI::Range(0.0, 1.0));
  c_frame->add_option("--fixed-k", fixed_k, "force the secure-input length of every frame");
  c_frame->add_option("--seed", seed);
  add_out(c_frame, false);

  std::string manifest_path;
  auto* c_replay = app.add_subcommand("replay", "re-run a manifest and compare output digests");
  c_replay->add_option("manifest", manifest_path)->required();

  std::vector<const char*> argv_c{"opiqsdc"};
  for (const auto& a : args) argv_c.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv_c.size()), argv_c.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c_replay->parsed()) return replay(manifest_path, out, err);

    Run run;
    run.argv = args;
    run.out_base = out_base;
    run.params = override_params ? *override_params : resolve_params(config_path, sets);
    const SystemParams& params = run.params;
    const Execution exec = serial ? Execution::Serial : Execution::Parallel;
    Json result;

    if (c_curve->parsed()) {
      run.command = "rate-curve";
      if (dmax < dmin) throw UsageError("--dmax must not be below --dmin");
      const auto grid = distance_grid(dmin, dmax, step);
      const auto curve = rate_curve(params, grid, exec);
      run.emit(".csv", curve_csv(curve));
      run.emit(".json", dump(curve_json(curve)));
      std::size_t failed = 0;
      for (const auto& p : curve) failed += !p.ok();
      result = {{"command", run.command}, {"rows", curve.size()}, {"failed_points", failed}};
    } else if (c_opt->parsed()) {
      run.command = "optimize-u";
      if (!(u_hi > u_lo)) throw UsageError("--u-max must exceed --u-min");
      const auto opt = optimize_intensity(params, u_lo, u_hi, u_tol, exec);
      if (!opt.unimodal) err << "opiqsdc: warning: " << opt.warning << "\n";
      result = to_json(opt);
      result["command"] = run.command;
    } else if (c_pd->parsed()) {
      run.command = "sweep-pd";
      if (dmax < dmin) throw UsageError("--dmax must not be below --dmin");
      const auto grid = distance_grid(dmin, dmax, step);
      const auto family = dark_count_sweep(params, pd_values, grid, exec);
      Json curves = Json::array();
      for (std::size_t i = 0; i < family.size(); ++i) {
        Json c = {{"p_d", family[i].p_d},
                  {"plob_crossing", to_json(family[i].crossing)},
                  {"max_distance", to_json(family[i].reach)}};
        if (!run.out_base.empty()) {
          const std::string suffix = ".pd" + std::to_string(i) + ".csv";
          run.emit(suffix, curve_csv(family[i].curve));
          c["file"] = run.out_base + suffix;
        }
        curves.push_back(c);
      }
      result = {{"command", run.command}, {"curves", curves}};
    } else if (c_cross->parsed()) {
      run.command = "plob-crossing";
      if (!(hi > lo)) throw UsageError("--hi must exceed --lo");
      result = to_json(find_plob_crossing(params, lo, hi, tol));
      result["command"] = run.command;
    } else if (c_reach->parsed()) {
      run.command = "max-distance";
      result = to_json(max_distance(params, tol));
      result["command"] = run.command;
    } else if (c_sim->parsed()) {
      run.command = "simulate";
      if (!(pulses >= 1.0) || pulses != std::floor(pulses) || pulses > 1e15)
        throw UsageError("--pulses must be a whole number >= 1");
      run.seed = seed;
      const SimReport rep =
          run_campaign(params, distance, static_cast<std::uint64_t>(pulses), seed, shards, exec, truth);
      result = {{"command", run.command}, {"report", to_json(rep)}, {"analytic", to_json(compare_with_analytic(rep, params))}};
    } else if (c_frame->parsed()) {
      run.command = "frame-demo";
      run.seed = seed;
      BitVec message;
      if (!message_file.empty()) {
        const std::string bytes = read_file(message_file);
        message = bytes_to_bits(std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
      } else {
        Rng rng(derive_seed(seed, 0xfeed));
        message = random_bits(rng, 8 * random_bytes);
      }
      std::unique_ptr<BitChannel> channel;
      if (channel_kind == "pulse") channel = std::make_unique<PulseSimChannel>(params, distance);
      else channel = std::make_unique<SyntheticChannel>(erasure, qber, phase_err);
      PipelineConfig cfg;
      cfg.frame_length = frame_length;
      cfg.rate_margin = margin;
      cfg.precoder = parse_codec_kind(precoder);
      cfg.f = params.f;
      cfg.seed = seed;
      cfg.fixed_k = fixed_k;
      if (assumed_qber) {
        ChannelStats prior = channel->nominal();
        prior.crossover = *assumed_qber;
        cfg.prior = prior;
      }
      SstsPools pools;
      const PipelineResult res = run_frame_pipeline(message, cfg, *channel, pools);
      const ChannelStats nominal = channel->nominal();
      result = {{"command", run.command},
                {"channel",
                 {{"kind", channel->name()},
                  {"delivered_fraction", nominal.delivered_fraction},
                  {"crossover", nominal.crossover},
                  {"phase_error", nominal.phase_error}}},
                {"message_bits", message.size()},
                {"message_fnv1a64", hex64(fnv1a64(std::string(message.begin(), message.end())))},
                {"m_equal", res.message_match},
                {"decode_verdict", res.status == PipelineStatus::Ok ? "ok" : to_string(res.status)},
                {"transcript", to_json(res)}};
      if (res.status != PipelineStatus::Ok) {
        err << "opiqsdc: " << res.message << "\n";
        result["failed_frame"] = res.failed_frame ? Json(*res.failed_frame) : Json(nullptr);
      }
    }

    result["params_digest"] = params_digest(params);
    if (!run.out_base.empty() && run.command != "rate-curve") run.emit(".json", dump(result));
    run.write_manifest();
    if (!run.out_base.empty()) result["outputs"] = run.outputs;
    out << dump(result);
    if (run.command == "frame-demo" && result.at("decode_verdict") != "ok") return kComputation;
    return kOk;
  } catch (const UsageError& e) {
    err << "opiqsdc: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "opiqsdc: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "opiqsdc: computation error: " << e.what() << "\n";
    return kComputation;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return dispatch(args, out, err, nullptr);
}

}  // namespace opiqsdc::cli
