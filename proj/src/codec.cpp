#include "opiqsdc/codec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "opiqsdc/rates.hpp"

namespace opiqsdc {

namespace {

void require_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(want) + " bits, got " +
                                std::to_string(got));
}

// Smallest p in [0, 0.5] with h(p) >= target.
double inverse_entropy(double target) {
  if (target <= 0.0) return 0.0;
  if (target >= 1.0) return 0.5;
  double lo = 0.0, hi = 0.5;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (binary_entropy(mid) < target ? lo : hi) = mid;
  }
  return lo;
}

double channel_llr(double crossover) {
  const double p = std::clamp(crossover, 1e-6, 0.45);
  return std::log((1.0 - p) / p);
}

}  // namespace

std::string to_string(CodecKind kind) {
  switch (kind) {
    case CodecKind::Identity: return "identity";
    case CodecKind::Repetition3: return "repetition3";
    case CodecKind::Ldpc: return "ldpc";
    case CodecKind::Dense: return "dense";
  }
  return "?";
}

CodecKind parse_codec_kind(const std::string& name) {
  for (CodecKind k : {CodecKind::Identity, CodecKind::Repetition3, CodecKind::Ldpc, CodecKind::Dense})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown codec '" + name + "' (identity, repetition3, ldpc, dense)");
}

BitVec IdentityCodec::encode(const BitVec& message) const {
  require_length(message.size(), k_, "identity encode");
  return message;
}

std::optional<BitVec> IdentityCodec::decode(const ChannelWord& received, double) const {
  require_length(received.size(), k_, "identity decode");
  BitVec out(k_);
  for (std::size_t i = 0; i < k_; ++i) {
    if (received[i] == kErased) return std::nullopt;
    out[i] = static_cast<std::uint8_t>(received[i]);
  }
  return out;
}

double repetition3_bit_failure(double p) { return 3.0 * p * p * (1.0 - p) + p * p * p; }

double Repetition3Codec::threshold() const {
  if (k_ == 0) return 0.5;
  double lo = 0.0, hi = 0.5;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double block_fail = -std::expm1(static_cast<double>(k_) * std::log1p(-repetition3_bit_failure(mid)));
    (block_fail < 1e-3 ? lo : hi) = mid;
  }
  return lo;
}

BitVec Repetition3Codec::encode(const BitVec& message) const {
  require_length(message.size(), k_, "repetition3 encode");
  BitVec out(3 * k_);
  for (std::size_t i = 0; i < k_; ++i) out[3 * i] = out[3 * i + 1] = out[3 * i + 2] = message[i] & 1u;
  return out;
}

std::optional<BitVec> Repetition3Codec::decode(const ChannelWord& received, double) const {
  require_length(received.size(), 3 * k_, "repetition3 decode");
  BitVec out(k_);
  for (std::size_t i = 0; i < k_; ++i) {
    int ones = 0, zeros = 0;
    for (int c = 0; c < 3; ++c) {
      const std::int8_t s = received[3 * i + c];
      if (s == kErased) continue;
      (s ? ones : zeros) += 1;
    }
    if (ones == zeros) return std::nullopt;  // all erased or a tie
    out[i] = ones > zeros;
  }
  return out;
}

LdpcCodec::LdpcCodec(std::size_t k, std::size_t n, std::uint64_t seed, int max_iterations)
    : k_(k), n_(n), max_iterations_(max_iterations) {
  if (k == 0 || k > n) throw std::invalid_argument("ldpc: need 0 < k <= n");
  const std::size_t m = n - k;
  h_ = Gf2Matrix(m, n);
  check_vars_.assign(m, {});
  var_checks_.assign(n, {});
  if (m > 0) {
    const std::size_t wc = std::min<std::size_t>(3, m);
    Rng rng(seed);
    std::vector<std::size_t> degree(m, 0);
    std::vector<std::pair<std::uint64_t, std::size_t>> order(m);
    for (std::size_t j = 0; j < n; ++j) {
      // Least-loaded rows first, random among ties: keeps row weights within one of each other.
      for (std::size_t r = 0; r < m; ++r) order[r] = {(static_cast<std::uint64_t>(degree[r]) << 40) | (rng() >> 24), r};
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(wc), order.end());
      for (std::size_t t = 0; t < wc; ++t) {
        const std::size_t r = order[t].second;
        h_.set(r, j, true);
        ++degree[r];
        check_vars_[r].push_back(j);
        var_checks_[j].push_back(r);
      }
    }
  }
  reduced_ = h_;
  pivots_ = reduced_.reduce(n);
  std::vector<std::uint8_t> is_pivot(n, 0);
  for (const auto p : pivots_) is_pivot[p] = 1;
  frozen_.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    if (is_pivot[j]) continue;
    if (info_cols_.size() < k) info_cols_.push_back(j);
    else frozen_[j] = 1;
  }
}

double LdpcCodec::threshold() const { return inverse_entropy(0.6 * (1.0 - rate())); }

BitVec LdpcCodec::encode(const BitVec& message) const {
  require_length(message.size(), k_, "ldpc encode");
  BitVec c(n_, 0);
  for (std::size_t i = 0; i < k_; ++i) c[info_cols_[i]] = message[i] & 1u;
  std::vector<std::uint64_t> packed(reduced_.words(), 0);
  for (std::size_t j = 0; j < n_; ++j)
    if (c[j]) packed[j / 64] |= std::uint64_t{1} << (j % 64);
  for (std::size_t r = 0; r < pivots_.size(); ++r) {
    const std::uint64_t* w = reduced_.row(r);
    std::uint64_t acc = 0;
    for (std::size_t t = 0; t < packed.size(); ++t) acc ^= w[t] & packed[t];
    c[pivots_[r]] = static_cast<std::uint8_t>(__builtin_parityll(acc));
  }
  return c;
}

bool LdpcCodec::is_codeword(const BitVec& word) const {
  require_length(word.size(), n_, "ldpc syndrome");
  for (const auto& vars : check_vars_) {
    unsigned parity = 0;
    for (const auto v : vars) parity ^= word[v] & 1u;
    if (parity) return false;
  }
  return true;
}

std::optional<BitVec> LdpcCodec::decode(const ChannelWord& received, double crossover) const {
  require_length(received.size(), n_, "ldpc decode");
  const double lc = channel_llr(crossover);
  constexpr double kFrozenLlr = 40.0;
  std::vector<double> prior(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    if (frozen_[j]) prior[j] = kFrozenLlr;
    else if (received[j] == kErased) prior[j] = 0.0;
    else prior[j] = received[j] ? -lc : lc;
  }

  // Edge e belongs to check c_of[e] and variable v_of[e]; edges are stored check-major.
  std::vector<std::size_t> v_of, check_start{0};
  for (const auto& vars : check_vars_) {
    v_of.insert(v_of.end(), vars.begin(), vars.end());
    check_start.push_back(v_of.size());
  }
  const std::size_t edges = v_of.size();
  std::vector<double> c2v(edges, 0.0), v2c(edges, 0.0), posterior(prior);
  BitVec hard(n_);

  auto decide = [&] {
    for (std::size_t j = 0; j < n_; ++j) hard[j] = posterior[j] < 0.0;
    return is_codeword(hard);
  };

  for (int it = 0; it <= max_iterations_; ++it) {
    if (decide()) {
      for (std::size_t j = 0; j < n_; ++j)
        if (frozen_[j] && hard[j]) return std::nullopt;
      BitVec msg(k_);
      for (std::size_t i = 0; i < k_; ++i) msg[i] = hard[info_cols_[i]];
      return msg;
    }
    if (it == max_iterations_) break;

    for (std::size_t e = 0; e < edges; ++e) v2c[e] = posterior[v_of[e]] - c2v[e];
    for (std::size_t c = 0; c + 1 < check_start.size(); ++c) {
      const std::size_t b = check_start[c], end = check_start[c + 1];
      double prod = 1.0;
      int zeros = 0;
      for (std::size_t e = b; e < end; ++e) {
        const double t = std::tanh(0.5 * v2c[e]);
        if (t == 0.0) ++zeros;
        else prod *= t;
      }
      for (std::size_t e = b; e < end; ++e) {
        const double t = std::tanh(0.5 * v2c[e]);
        double other;
        if (t == 0.0) other = zeros > 1 ? 0.0 : prod;
        else other = zeros > 0 ? 0.0 : prod / t;
        other = std::clamp(other, -1.0 + 1e-15, 1.0 - 1e-15);
        c2v[e] = 2.0 * std::atanh(other);
      }
    }
    posterior = prior;
    for (std::size_t e = 0; e < edges; ++e) posterior[v_of[e]] += c2v[e];
  }
  return std::nullopt;
}

DenseLinearCodec::DenseLinearCodec(std::size_t k, std::size_t n, std::uint64_t seed, int isd_trials)
    : k_(k), n_(n), seed_(seed), isd_trials_(isd_trials) {
  if (k == 0 || k > n) throw std::invalid_argument("dense: need 0 < k <= n");
  Rng rng(seed);
  g_ = Gf2Matrix::random(k, n, rng);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) g_.set(i, j, i == j);
}

double DenseLinearCodec::threshold() const { return inverse_entropy(0.25 * (1.0 - rate())); }

BitVec DenseLinearCodec::encode(const BitVec& message) const {
  require_length(message.size(), k_, "dense encode");
  return g_.left_multiply(message);
}

std::optional<BitVec> DenseLinearCodec::decode(const ChannelWord& received, double crossover) const {
  require_length(received.size(), n_, "dense decode");
  std::vector<std::size_t> seen;
  BitVec b(n_, 0);
  for (std::size_t j = 0; j < n_; ++j) {
    if (received[j] == kErased) continue;
    seen.push_back(j);
    b[j] = static_cast<std::uint8_t>(received[j]);
  }
  if (seen.size() < k_) return std::nullopt;
  if (auto x = solve_left(g_, seen, b)) return x;

  // Inconsistent or rank deficient: try random information sets among the received positions.
  const double p = std::clamp(crossover, 0.0, 0.5);
  const double s = static_cast<double>(seen.size());
  const std::size_t accept =
      static_cast<std::size_t>(std::floor(s * p + 3.0 * std::sqrt(s * p * (1.0 - p)))) + 1;
  Rng rng(derive_seed(seed_, 0x15d));
  std::optional<BitVec> best;
  std::size_t best_dist = seen.size() + 1;
  std::vector<std::size_t> order = seen;
  for (int t = 0; t < isd_trials_; ++t) {
    std::shuffle(order.begin(), order.end(), rng);
    Gf2Matrix sub(k_, order.size());
    for (std::size_t c = 0; c < order.size(); ++c)
      for (std::size_t r = 0; r < k_; ++r)
        if (g_.get(r, order[c])) sub.set(r, c, true);
    const auto piv = sub.reduce(order.size());
    if (piv.size() < k_) return std::nullopt;  // received positions cannot determine the message
    std::vector<std::size_t> info;
    for (const auto c : piv) info.push_back(order[c]);
    auto x = solve_left(g_, info, b);
    if (!x) continue;
    const BitVec cw = g_.left_multiply(*x);
    std::size_t dist = 0;
    for (const auto j : seen) dist += cw[j] != b[j];
    if (dist < best_dist) {
      best_dist = dist;
      best = std::move(x);
    }
  }
  if (best && best_dist <= accept) return best;
  return std::nullopt;
}

std::unique_ptr<Codec> make_codec(CodecKind kind, std::size_t k, std::size_t n, std::uint64_t seed) {
  switch (kind) {
    case CodecKind::Identity: return std::make_unique<IdentityCodec>(k);
    case CodecKind::Repetition3: return std::make_unique<Repetition3Codec>(k);
    case CodecKind::Ldpc: return std::make_unique<LdpcCodec>(k, n, seed);
    case CodecKind::Dense: return std::make_unique<DenseLinearCodec>(k, n, seed);
  }
  throw std::invalid_argument("unknown codec kind");
}

}  // namespace opiqsdc
