#include "opiqsdc/pulse_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "opiqsdc/config.hpp"
#include "opiqsdc/rates.hpp"

namespace opiqsdc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double level_intensity(Level level, const SystemParams& p) {
  switch (level) {
    case Level::Signal: return p.u;
    case Level::Decoy1: return p.nu1;
    case Level::Decoy2: return p.nu2;
    case Level::Vacuum: return 0.0;
  }
  return 0.0;
}

struct Side {
  Mode mode;
  std::uint8_t bit;
  Level level;
  double phase;
  int slice;
};

Side prepare_side(const SystemParams& p, Rng& rng, std::optional<std::uint8_t> forced_bit) {
  Side s{};
  if (bernoulli(rng, p.p_multi)) {
    s.mode = Mode::MultiIntensity;
    s.bit = 0;
    s.level = static_cast<Level>(1 + std::min<int>(2, static_cast<int>(uniform01(rng) * 3.0)));
    s.phase = uniform01(rng) * kTwoPi;
    s.slice = std::min(p.phase_slices - 1, static_cast<int>(s.phase / kTwoPi * p.phase_slices));
  } else {
    s.mode = Mode::Coding;
    s.bit = forced_bit ? static_cast<std::uint8_t>(*forced_bit & 1u) : static_cast<std::uint8_t>(rng() >> 63);
    s.level = Level::Signal;
    s.phase = s.bit ? std::numbers::pi : 0.0;
    s.slice = -1;
  }
  return s;
}

// Extra phase between the arms, drawn per round.
double misalignment_offset(const SystemParams& p, Rng& rng) {
  const double s = p.misalignment_sin2();
  if (s <= 0.0) return 0.0;
  if (p.jitter_model == JitterModel::FixedOffset) return 2.0 * std::asin(std::sqrt(s));
  if (s >= 0.5) throw std::invalid_argument("random jitter needs misalignment sin^2 < 0.5");
  // E[sin^2(x/2)] = (1 - e^{-sigma^2/2}) / 2 for x ~ N(0, sigma^2).
  std::normal_distribution<double> jitter(0.0, std::sqrt(-2.0 * std::log1p(-2.0 * s)));
  return jitter(rng);
}

bool dark_or_light(Rng& rng, double mu, double p_d) {
  // 1 - (1 - p_d) e^{-mu}
  return bernoulli(rng, -std::expm1(-mu) + p_d * std::exp(-mu));
}

}  // namespace

PulseRecord prepare_round(const SystemParams& params, Rng& rng, std::optional<std::uint8_t> alice_bit) {
  const Side a = prepare_side(params, rng, alice_bit);
  const Side b = prepare_side(params, rng, std::nullopt);
  PulseRecord r;
  r.mode_a = a.mode;
  r.mode_b = b.mode;
  r.bit_a = a.bit;
  r.bit_b = b.bit;
  r.level_a = a.level;
  r.level_b = b.level;
  r.intensity_a = level_intensity(a.level, params);
  r.intensity_b = level_intensity(b.level, params);
  r.phase_a = a.phase;
  r.phase_b = b.phase;
  r.phase_slice_a = a.slice;
  r.phase_slice_b = b.slice;
  r.sampled = bernoulli(rng, params.qber_sample_fraction);
  return r;
}

DetectorOutcome interfere_and_detect(PulseRecord& pulse, const SystemParams& params, double d_km, Rng& rng,
                                     bool truth_access) {
  const double eta = system_transmittance(params, d_km);
  const double delta = pulse.phase_b - pulse.phase_a + misalignment_offset(params, rng);
  const double ia = pulse.intensity_a;
  const double ib = pulse.intensity_b;
  const double cross = 2.0 * std::sqrt(ia * ib) * std::cos(delta);
  const double mu_c = std::max(0.0, eta * (ia + ib + cross) / 2.0);
  const double mu_d = std::max(0.0, eta * (ia + ib - cross) / 2.0);

  DetectorOutcome out;
  if (!truth_access) {
    out.click_c = dark_or_light(rng, mu_c, params.p_d);
    out.click_d = dark_or_light(rng, mu_d, params.p_d);
  } else {
    // Same click law, resolved photon by photon: Poisson source, binomial loss, binomial split.
    const double total = ia + ib;
    int n = 0;
    if (total > 0.0) n = std::poisson_distribution<int>(total)(rng);
    const int arrived = n > 0 ? std::binomial_distribution<int>(n, eta)(rng) : 0;
    const double to_c = mu_c + mu_d > 0.0 ? mu_c / (mu_c + mu_d) : 0.5;
    const int n_c = arrived > 0 ? std::binomial_distribution<int>(arrived, to_c)(rng) : 0;
    const int n_d = arrived - n_c;
    const bool dark_c = bernoulli(rng, params.p_d);
    const bool dark_d = bernoulli(rng, params.p_d);
    out.click_c = n_c > 0 || dark_c;
    out.click_d = n_d > 0 || dark_d;
    pulse.photons = n;
  }
  pulse.click_c = out.click_c;
  pulse.click_d = out.click_d;
  return out;
}

bool decoy_phases_match(const PulseRecord& r, int phase_slices) {
  if (!r.decoy_pair() || r.level_a != r.level_b) return false;
  if (r.phase_slice_a < 0 || r.phase_slice_b < 0) return false;
  const int diff = ((r.phase_slice_a - r.phase_slice_b) % phase_slices + phase_slices) % phase_slices;
  return diff == 0 || diff == phase_slices / 2;
}

SiftedRounds sift(std::span<const PulseRecord> records, int phase_slices) {
  SiftedRounds out;
  for (const PulseRecord& r : records) {
    if (r.coding_pair() && r.one_click()) out.coding_kept.push_back(r);
    else if (r.one_click() && decoy_phases_match(r, phase_slices)) out.decoy_kept.push_back(r);
    else out.discarded.push_back(r);
  }
  return out;
}

void Tally::add(const PulseRecord& r, int phase_slices) {
  ++rounds;
  if (r.mode_a == r.mode_b) ++mode_matched;
  const bool one = r.one_click();
  if (r.coding_pair()) {
    ++coding_pairs;
    if (r.photons >= 0 && r.photons <= kTruthMaxPhotons) {
      ++truth_rounds[r.photons];
      if (one) ++truth_kept[r.photons];
    }
    if (one) {
      const bool err = r.bit_error();
      ++coding_kept;
      coding_errors += err;
      if (r.sampled) {
        ++sampled_kept;
        sampled_errors += err;
      }
    }
  } else if (decoy_phases_match(r, phase_slices)) {
    const int idx = static_cast<int>(r.level_a) - 1;
    ++decoy_pairs[idx];
    if (one) ++decoy_kept[idx];
  }
}

Tally& Tally::operator+=(const Tally& o) {
  rounds += o.rounds;
  mode_matched += o.mode_matched;
  coding_pairs += o.coding_pairs;
  coding_kept += o.coding_kept;
  coding_errors += o.coding_errors;
  sampled_kept += o.sampled_kept;
  sampled_errors += o.sampled_errors;
  for (std::size_t i = 0; i < decoy_pairs.size(); ++i) {
    decoy_pairs[i] += o.decoy_pairs[i];
    decoy_kept[i] += o.decoy_kept[i];
  }
  for (std::size_t i = 0; i < truth_rounds.size(); ++i) {
    truth_rounds[i] += o.truth_rounds[i];
    truth_kept[i] += o.truth_kept[i];
  }
  return *this;
}

Tally tally(std::span<const PulseRecord> records, int phase_slices) {
  Tally t;
  for (const PulseRecord& r : records) t.add(r, phase_slices);
  return t;
}

std::optional<Estimate> binomial_estimate(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return std::nullopt;
  if (successes > trials) throw std::invalid_argument("successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  return Estimate{p, std::sqrt(p * (1.0 - p) / n), successes, trials};
}

SimReport estimate_parameters(const Tally& t, bool truth_access) {
  SimReport rep;
  rep.n_pulses = t.rounds;
  rep.truth_access = truth_access;
  rep.kept_coding = t.coding_kept;
  for (const auto k : t.decoy_kept) rep.kept_decoy += k;
  rep.mode_match_hat = binomial_estimate(t.mode_matched, t.rounds);
  rep.Q_hat = binomial_estimate(t.coding_kept, t.coding_pairs);
  rep.EX_hat = binomial_estimate(t.coding_errors, t.coding_kept);
  rep.EX_hat_sampled = binomial_estimate(t.sampled_errors, t.sampled_kept);
  for (std::size_t i = 0; i < 3; ++i) rep.yields_hat[i] = binomial_estimate(t.decoy_kept[i], t.decoy_pairs[i]);
  if (truth_access) {
    rep.truth_yields.resize(kTruthMaxPhotons + 1);
    for (int n = 0; n <= kTruthMaxPhotons; ++n) rep.truth_yields[n] = binomial_estimate(t.truth_kept[n], t.truth_rounds[n]);
  }
  return rep;
}

SimReport estimate_parameters(const SiftedRounds& rounds, int phase_slices, bool truth_access) {
  Tally t = tally(rounds.coding_kept, phase_slices);
  t += tally(rounds.decoy_kept, phase_slices);
  t += tally(rounds.discarded, phase_slices);
  return estimate_parameters(t, truth_access);
}

Tally simulate_rounds(const SystemParams& params, double d_km, std::uint64_t count, Rng& rng, bool truth_access) {
  Tally t;
  for (std::uint64_t i = 0; i < count; ++i) {
    PulseRecord r = prepare_round(params, rng);
    interfere_and_detect(r, params, d_km, rng, truth_access);
    t.add(r, params.phase_slices);
  }
  return t;
}

SimReport run_campaign(const SystemParams& params, double d_km, std::uint64_t n_pulses, std::uint64_t seed,
                       int shards, Execution exec, bool truth_access) {
  params.validate();
  params.validate_decoys();
  if (shards < 1) throw std::invalid_argument("shards must be >= 1");
  system_transmittance(params, d_km);  // rejects bad distances before any work

  std::vector<Tally> parts(static_cast<std::size_t>(shards));
  const std::uint64_t base = n_pulses / static_cast<std::uint64_t>(shards);
  const std::uint64_t extra = n_pulses % static_cast<std::uint64_t>(shards);
  auto run_shard = [&](int s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    const std::uint64_t count = base + (static_cast<std::uint64_t>(s) < extra ? 1 : 0);
    parts[s] = simulate_rounds(params, d_km, count, rng, truth_access);
  };

  if (exec == Execution::Parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (int s = 0; s < shards; ++s) {
      try {
        run_shard(s);
      } catch (...) {
#pragma omp critical(opiqsdc_campaign_error)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (int s = 0; s < shards; ++s) run_shard(s);
  }

  Tally total;
  for (const Tally& t : parts) total += t;
  SimReport rep = estimate_parameters(total, truth_access);
  rep.n_pulses = n_pulses;
  rep.seed = seed;
  rep.shards = shards;
  rep.d_km = d_km;
  rep.params_digest = params_digest(params);
  return rep;
}

namespace {

std::optional<double> z_score(const std::optional<Estimate>& e, double p) {
  if (!e) return std::nullopt;
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(e->trials));
  const double diff = e->value - p;
  if (sigma == 0.0) return diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
  return diff / sigma;
}

// One-click gain at a common intensity nu; nu = 0 leaves the dark-count floor 2 p_d.
double decoy_gain(double nu, double eta, double p_d) { return nu > 0.0 ? gain(nu, eta, p_d) : 2.0 * p_d; }

}  // namespace

AnalyticComparison compare_with_analytic(const SimReport& report, const SystemParams& params) {
  const double eta = system_transmittance(params, report.d_km);
  AnalyticComparison c;
  c.Q = gain(params.u, eta, params.p_d);
  c.EX = x_error(params.u, eta, params.p_d, params.misalignment_sin2());
  c.z_Q = z_score(report.Q_hat, c.Q);
  c.z_EX = z_score(report.EX_hat, c.EX);
  const double nus[3] = {params.nu1, params.nu2, 0.0};
  for (int i = 0; i < 3; ++i) {
    c.decoy_gain[i] = decoy_gain(nus[i], eta, params.p_d);
    c.z_decoy[i] = z_score(report.yields_hat[i], c.decoy_gain[i]);
  }
  return c;
}

}  // namespace opiqsdc
