#include "fmoment/clt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace fmoment {

namespace {

using Matrix = std::vector<std::vector<double>>;

// Dense solve with partial pivoting; A is consumed.
std::vector<double> solve(Matrix A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    }
    if (std::abs(A[piv][c]) < 1e-14) throw std::invalid_argument("singular linear system");
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double m = A[r][c] / A[c][c];
      if (m == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) A[r][k] -= m * A[c][k];
      b[r] -= m * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
    x[i] = s / A[i][i];
  }
  return x;
}

std::vector<int> bfs_levels(const Matrix& P, bool reverse) {
  const std::size_t n = P.size();
  std::vector<int> level(n, -1);
  std::queue<std::size_t> q;
  level[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const std::size_t i = q.front();
    q.pop();
    for (std::size_t j = 0; j < n; ++j) {
      const double w = reverse ? P[j][i] : P[i][j];
      if (w > 0.0 && level[j] < 0) {
        level[j] = level[i] + 1;
        q.push(j);
      }
    }
  }
  return level;
}

void check_stochastic(const Matrix& P) {
  if (P.empty()) throw std::invalid_argument("transition matrix is empty");
  for (const auto& row : P) {
    if (row.size() != P.size()) throw std::invalid_argument("transition matrix must be square");
    double s = 0.0;
    for (double x : row) {
      if (!(x >= 0.0)) throw std::invalid_argument("transition probabilities must be >= 0");
      s += x;
    }
    if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("transition rows must sum to 1");
  }
}

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> c(p.size());
  std::partial_sum(p.begin(), p.end(), c.begin());
  c.back() = 1.0;
  return c;
}

double ecf_distance(std::span<const double> a, std::span<const double> b,
                    double x_scaled, std::size_t k) {
  const auto ca = empirical_char_fn(a, x_scaled);
  const auto cb = empirical_char_fn(b, x_scaled);
  return std::abs(ca - std::pow(cb, static_cast<int>(k)));
}

double sample_stdev(std::span<const double> v) {
  const auto e = summarize(v);
  return e.std_error * std::sqrt(static_cast<double>(v.size()));
}

double check_rho(const EstimateWithError& rho) {
  if (!(rho.mean > 0.0)) throw std::domain_error("degenerate partial sums: rho estimate is 0");
  return rho.mean;
}

}  // namespace

int chain_period(const Matrix& P) {
  check_stochastic(P);
  const auto fwd = bfs_levels(P, false);
  const auto back = bfs_levels(P, true);
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (fwd[i] < 0 || back[i] < 0) throw std::invalid_argument("transition matrix is not irreducible");
  }
  int g = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    for (std::size_t j = 0; j < P.size(); ++j) {
      if (P[i][j] > 0.0) g = std::gcd(g, std::abs(fwd[i] + 1 - fwd[j]));
    }
  }
  return g;
}

std::vector<double> stationary_distribution(const Matrix& P) {
  check_stochastic(P);
  const std::size_t n = P.size();
  Matrix A(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) A[i][j] = P[j][i] - (i == j ? 1.0 : 0.0);
  }
  std::vector<double> b(n, 0.0);
  std::fill(A[n - 1].begin(), A[n - 1].end(), 1.0);
  b[n - 1] = 1.0;
  auto pi = solve(std::move(A), std::move(b));
  for (auto& x : pi) x = std::max(x, 0.0);
  return pi;
}

SequenceModel SequenceModel::iid(Distribution d) {
  SequenceModel m;
  m.kind_ = Kind::iid;
  m.innovation_ = d.centered();
  return m;
}

SequenceModel SequenceModel::moving_average(std::vector<double> weights,
                                            Distribution innovation) {
  if (weights.empty()) throw std::invalid_argument("moving_average: need at least one weight");
  for (double w : weights) {
    if (!std::isfinite(w)) throw std::invalid_argument("moving_average: weights must be finite");
  }
  SequenceModel m;
  m.kind_ = Kind::moving_average;
  m.weights_ = std::move(weights);
  m.innovation_ = innovation.centered();
  return m;
}

SequenceModel SequenceModel::autoregressive(double phi, Distribution innovation) {
  if (!(phi > -1.0 && phi < 1.0)) throw std::invalid_argument("autoregressive: need |phi| < 1");
  SequenceModel m;
  m.kind_ = Kind::autoregressive;
  m.phi_ = phi;
  m.innovation_ = innovation.centered();
  if (m.innovation_.kind() != Distribution::Kind::normal && phi != 0.0) {
    // start from 0 and run until |phi|^B < 1e-17
    m.burn_in_ = static_cast<std::size_t>(std::ceil(std::log(1e-17) / std::log(std::abs(phi))));
  }
  return m;
}

SequenceModel SequenceModel::markov_functional(Matrix P, std::vector<double> values,
                                               int period) {
  const int d = chain_period(P);
  if (values.size() != P.size()) throw std::invalid_argument("markov_functional: one value per state required");
  if (period != d) {
    throw std::invalid_argument("markov_functional: stated period " + std::to_string(period) +
                                " but the chain has period " + std::to_string(d));
  }
  SequenceModel m;
  m.kind_ = Kind::markov_functional;
  m.period_ = d;
  m.pi_ = stationary_distribution(P);
  double mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) mean += m.pi_[i] * values[i];
  m.raw_values_ = values;
  for (auto& v : values) v -= mean;
  double check = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) check += m.pi_[i] * values[i];
  if (std::abs(check) > 1e-12) throw std::runtime_error("markov_functional: centring failed");
  m.values_ = std::move(values);
  for (const auto& row : P) m.cdf_.push_back(cumulative(row));
  m.pi_cdf_ = cumulative(m.pi_);
  m.P_ = std::move(P);
  return m;
}

std::string SequenceModel::kind_name() const {
  switch (kind_) {
    case Kind::iid: return "iid";
    case Kind::moving_average: return "moving_average";
    case Kind::autoregressive: return "autoregressive";
    case Kind::markov_functional: return "markov_functional";
  }
  return "iid";
}

std::size_t SequenceModel::draw_state(const std::vector<double>& cdf, double u) const {
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  return it == cdf.end() ? cdf.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
}

template <class Sink>
void SequenceModel::run(CounterRng& rng, std::size_t n, Sink&& sink) const {
  switch (kind_) {
    case Kind::iid:
      for (std::size_t k = 0; k < n; ++k) sink(innovation_.sample(rng));
      return;
    case Kind::moving_average: {
      const std::size_t m = weights_.size();
      std::vector<double> ring(m);
      for (std::size_t j = 0; j + 1 < m; ++j) ring[j] = innovation_.sample(rng);
      std::size_t head = m - 1;  // slot of the newest innovation
      for (std::size_t k = 0; k < n; ++k) {
        ring[head] = innovation_.sample(rng);
        double x = 0.0;
        for (std::size_t j = 0; j < m; ++j) x += weights_[j] * ring[(head + m - j) % m];
        sink(x);
        head = (head + 1) % m;
      }
      return;
    }
    case Kind::autoregressive: {
      double x = 0.0;
      if (innovation_.kind() == Distribution::Kind::normal) {
        // exact stationary start
        x = innovation_.params()[1] / std::sqrt(1.0 - phi_ * phi_) * rng.normal();
      }
      for (std::size_t k = 0; k < burn_in_; ++k) x = phi_ * x + innovation_.sample(rng);
      for (std::size_t k = 0; k < n; ++k) {
        x = phi_ * x + innovation_.sample(rng);
        sink(x);
      }
      return;
    }
    case Kind::markov_functional: {
      std::size_t z = draw_state(pi_cdf_, rng.uniform());
      for (std::size_t k = 0; k < n; ++k) {
        sink(values_[z]);
        z = draw_state(cdf_[z], rng.uniform());
      }
      return;
    }
  }
}

double SequenceModel::partial_sum(CounterRng& rng, std::size_t n) const {
  double s = 0.0;
  run(rng, n, [&](double x) { s += x; });
  return s;
}

void SequenceModel::generate(CounterRng& rng, std::span<double> out) const {
  std::size_t i = 0;
  run(rng, out.size(), [&](double x) { out[i++] = x; });
}

bool SequenceModel::has_finite_variance() const {
  return kind_ == Kind::markov_functional || innovation_.kind() != Distribution::Kind::cauchy;
}

double SequenceModel::stationary_variance() const {
  if (!has_finite_variance()) return std::numeric_limits<double>::infinity();
  switch (kind_) {
    case Kind::iid: return innovation_.variance();
    case Kind::moving_average: {
      double s = 0.0;
      for (double w : weights_) s += w * w;
      return s * innovation_.variance();
    }
    case Kind::autoregressive: return innovation_.variance() / (1.0 - phi_ * phi_);
    case Kind::markov_functional: {
      double s = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) s += pi_[i] * values_[i] * values_[i];
      return s;
    }
  }
  return 0.0;
}

double SequenceModel::long_run_variance() const {
  if (!has_finite_variance()) return std::numeric_limits<double>::infinity();
  switch (kind_) {
    case Kind::iid: return innovation_.variance();
    case Kind::moving_average: {
      const double s = std::accumulate(weights_.begin(), weights_.end(), 0.0);
      return s * s * innovation_.variance();
    }
    case Kind::autoregressive: return innovation_.variance() / ((1.0 - phi_) * (1.0 - phi_));
    case Kind::markov_functional: {
      // Poisson equation (I - P) g = v with pi g = 0; sigma^2 = 2<v,g> - <v,v>.
      const std::size_t n = values_.size();
      Matrix A(n, std::vector<double>(n, 0.0));
      std::vector<double> b(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) A[i][j] = (i == j ? 1.0 : 0.0) - P_[i][j];
        b[i] = values_[i];
      }
      // the last equation is redundant; replace it by the normalization
      A[n - 1] = pi_;
      b[n - 1] = 0.0;
      const auto g = solve(std::move(A), std::move(b));
      double vg = 0.0;
      for (std::size_t i = 0; i < n; ++i) vg += pi_[i] * values_[i] * g[i];
      return 2.0 * vg - stationary_variance();
    }
  }
  return 0.0;
}

double gaussian_abs_moment(double p) {
  if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("gaussian_abs_moment: need finite p >= 0");
  if (p == 0.0) return std::exp(-0.5 * (std::numbers::egamma + std::numbers::ln2));
  const double log_m = 0.5 * p * std::numbers::ln2 + std::lgamma(0.5 * (p + 1.0)) -
                       0.5 * std::log(std::numbers::pi);
  return std::exp(log_m / p);
}

void CltConfig::validate() const {
  const auto bad = [](const char* m) { throw std::invalid_argument(m); };
  if (!(p >= 1.0 && p < 2.0)) bad("CltConfig: p must lie in [1, 2)");
  if (n_ladder.empty()) bad("CltConfig: empty n ladder");
  for (std::size_t i = 0; i < n_ladder.size(); ++i) {
    if (n_ladder[i] < 1) bad("CltConfig: ladder entries must be >= 1");
    if (i > 0 && n_ladder[i] <= n_ladder[i - 1]) bad("CltConfig: ladder must be increasing");
  }
  if (K < 2) bad("CltConfig: K must exceed 1");
  bool tested = false;
  for (auto n : n_ladder) tested |= std::binary_search(n_ladder.begin(), n_ladder.end(), K * n);
  if (!tested) bad("CltConfig: ladder must contain K n for some n");
  if (replicates < 2) bad("CltConfig: need at least 2 replicates");
  for (auto k : k_grid) {
    if (k < 2) bad("CltConfig: WII k must be >= 2");
  }
  for (std::size_t i = 0; i < ui_thresholds.size(); ++i) {
    if (!(ui_thresholds[i] >= 0.0)) bad("CltConfig: thresholds must be >= 0");
    if (i > 0 && ui_thresholds[i] <= ui_thresholds[i - 1]) bad("CltConfig: thresholds must be increasing");
  }
  for (auto n : wii_n) {
    if (!std::binary_search(n_ladder.begin(), n_ladder.end(), n)) bad("CltConfig: WII n must be on the ladder");
  }
}

std::vector<double> simulate_partial_sums(const SequenceModel& model,
                                          std::size_t n, std::size_t replicates,
                                          const SeedSpec& seed, Parallelism par) {
  if (n < 1) throw std::invalid_argument("simulate_partial_sums: need n >= 1");
  return sample_replicates(
      [&](CounterRng& rng) { return model.partial_sum(rng, n); }, replicates,
      seed, par);
}

SeedSpec sums_seed(const SeedSpec& seed, std::size_t n) {
  return seed.child(0x53554d53).child(n);
}

SeedSpec block_seed(const SeedSpec& seed, std::size_t n, std::size_t k) {
  return seed.child(0x424c4b53).child(n).child(k);
}

EstimateWithError rho_from_sums(std::span<const double> sums, double p) {
  std::vector<double> a(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) a[i] = std::pow(std::abs(sums[i]), p);
  const auto m = summarize(a);
  const double g = gaussian_abs_moment(p);
  EstimateWithError r;
  r.n_replicates = m.n_replicates;
  if (m.mean == 0.0) return r;
  r.mean = std::pow(m.mean, 1.0 / p) / g;
  r.std_error = r.mean * m.std_error / (p * m.mean);
  return r;
}

EstimateWithError rho_n(const SequenceModel& model, std::size_t n, double p,
                        std::size_t replicates, const SeedSpec& seed,
                        Parallelism par) {
  return rho_from_sums(simulate_partial_sums(model, n, replicates, sums_seed(seed, n), par), p);
}

double wii_defect(const SequenceModel& model, std::size_t n, std::size_t k,
                  double x, std::size_t replicates, const SeedSpec& seed,
                  Parallelism par, double p) {
  if (k < 2 || n < k) throw std::invalid_argument("wii_defect: need k >= 2 and n >= k");
  if (x == 0.0) return 0.0;
  const auto a = simulate_partial_sums(model, n, replicates, sums_seed(seed, n), par);
  const double rho = check_rho(rho_from_sums(a, p));
  const auto b = simulate_partial_sums(model, n / k, replicates * k, block_seed(seed, n, k), par);
  return ecf_distance(a, b, x / rho, k);
}

std::map<std::size_t, double> ratio_diagnostic(const SequenceModel& model,
                                               double p,
                                               std::span<const std::size_t> n_ladder,
                                               std::size_t K,
                                               std::size_t replicates,
                                               const SeedSpec& seed,
                                               Parallelism par) {
  if (K < 2) throw std::invalid_argument("ratio_diagnostic: K must exceed 1");
  std::map<std::size_t, EstimateWithError> rho;
  for (auto n : n_ladder) rho[n] = rho_n(model, n, p, replicates, seed, par);
  std::map<std::size_t, double> dev;
  for (auto n : n_ladder) {
    const auto it = rho.find(K * n);
    if (it == rho.end()) continue;
    dev[n] = std::abs(it->second.mean / check_rho(rho[n]) - std::sqrt(static_cast<double>(K)));
  }
  return dev;
}

namespace {

std::map<double, double> ui_tails(std::span<const double> sums, double rho,
                                  double p, std::span<const double> thresholds) {
  std::vector<double> z(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) z[i] = std::pow(std::abs(sums[i]) / rho, p);
  std::map<double, double> out;
  for (double T : thresholds) {
    double s = 0.0;
    for (double v : z) s += v > T ? v : 0.0;
    out[T] = s / static_cast<double>(z.size());
  }
  return out;
}

double ks_of(std::span<const double> sums, double scale, double sd) {
  std::vector<double> z(sums.begin(), sums.end());
  for (auto& v : z) v /= scale;
  return ks_distance(EmpiricalSample(std::move(z)),
                     [sd](double t) { return normal_cdf(t / sd); });
}

}  // namespace

std::map<std::pair<std::size_t, double>, double> ui_diagnostic(
    const SequenceModel& model, double p, std::span<const std::size_t> n_ladder,
    std::span<const double> thresholds, std::size_t replicates,
    const SeedSpec& seed, Parallelism par) {
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1])) throw std::invalid_argument("ui_diagnostic: thresholds must be increasing");
  }
  std::map<std::pair<std::size_t, double>, double> out;
  for (auto n : n_ladder) {
    const auto sums = simulate_partial_sums(model, n, replicates, sums_seed(seed, n), par);
    const double rho = check_rho(rho_from_sums(sums, p));
    for (const auto& [T, v] : ui_tails(sums, rho, p, thresholds)) out[{n, T}] = v;
  }
  return out;
}

double ks_normality(const SequenceModel& model, double p, std::size_t n,
                    std::size_t replicates, const SeedSpec& seed,
                    Parallelism par) {
  const auto sums = simulate_partial_sums(model, n, replicates, sums_seed(seed, n), par);
  return ks_of(sums, check_rho(rho_from_sums(sums, p)), 1.0);
}

Corollary15Report corollary15_consistency(const SequenceModel& model, double p,
                                          std::span<const std::size_t> n_ladder,
                                          std::size_t replicates,
                                          const SeedSpec& seed,
                                          Parallelism par) {
  if (!model.has_finite_variance()) throw std::invalid_argument("corollary15_consistency: model needs finite variance");
  if (n_ladder.empty()) throw std::invalid_argument("corollary15_consistency: empty ladder");
  std::map<std::size_t, std::vector<double>> samples;
  Corollary15Report r;
  for (auto n : n_ladder) {
    auto sums = simulate_partial_sums(model, n, replicates, sums_seed(seed, n), par);
    const double sd = sample_stdev(sums);
    if (!(sd > 0.0)) throw std::domain_error("corollary15_consistency: zero variance of S_n");
    const double norm_p = rho_from_sums(sums, p).mean * gaussian_abs_moment(p);
    r.entries[n].sigma_n = sd;
    r.entries[n].ratio = norm_p / sd;
    samples[n] = std::move(sums);
  }
  r.c_hat = r.entries.rbegin()->second.ratio;
  r.limit_sd = r.c_hat / gaussian_abs_moment(p);
  for (auto& [n, e] : r.entries) e.ks = ks_of(samples[n], e.sigma_n, r.limit_sd);
  return r;
}

EstimateWithError block_bootstrap_rho(std::span<const double> series,
                                      std::size_t block_len, std::size_t n,
                                      double p, std::size_t resamples,
                                      const SeedSpec& seed) {
  const std::size_t N = series.size();
  if (n < 1 || n > N) throw std::invalid_argument("block_bootstrap_rho: need 1 <= n <= series length");
  if (block_len < 1 || block_len > N) throw std::invalid_argument("block_bootstrap_rho: need 1 <= block_len <= series length");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(N);
  std::vector<double> prefix(N + 1, 0.0);
  for (std::size_t i = 0; i < N; ++i) prefix[i + 1] = prefix[i] + (series[i] - mean);
  const auto block = [&](std::size_t a, std::size_t len) {
    if (a + len <= N) return prefix[a + len] - prefix[a];
    return (prefix[N] - prefix[a]) + prefix[a + len - N];
  };
  const auto sums = sample_replicates(
      [&](CounterRng& rng) {
        double s = 0.0;
        for (std::size_t done = 0; done < n; done += block_len) {
          const auto a = std::min(N - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(N)));
          s += block(a, std::min(block_len, n - done));
        }
        return s;
      },
      resamples, seed);
  return rho_from_sums(sums, p);
}

CltReport run_clt(const SequenceModel& model, const CltConfig& config,
                  const SeedSpec& seed, Parallelism par) {
  config.validate();
  CltReport r;
  r.config = config;
  const double p = config.p;
  std::vector<std::size_t> wii_n = config.wii_n;
  if (wii_n.empty()) wii_n.push_back(config.n_ladder.back());
  std::sort(wii_n.begin(), wii_n.end());
  for (auto n : config.n_ladder) {
    const auto sums = simulate_partial_sums(model, n, config.replicates, sums_seed(seed, n), par);
    const auto rho = rho_from_sums(sums, p);
    r.rho[n] = rho;
    r.sigma_n[n] = sample_stdev(sums);
    const double scale = check_rho(rho);
    r.ks[n] = ks_of(sums, scale, 1.0);
    for (const auto& [T, v] : ui_tails(sums, scale, p, config.ui_thresholds)) r.ui_tail[{n, T}] = v;
    if (!std::binary_search(wii_n.begin(), wii_n.end(), n)) continue;
    for (auto k : config.k_grid) {
      if (n < k) continue;
      const auto b = simulate_partial_sums(model, n / k, config.replicates * k, block_seed(seed, n, k), par);
      for (double x : config.x_grid) {
        r.wii_defect[{n, k, x}] = x == 0.0 ? 0.0 : ecf_distance(sums, b, x / scale, k);
      }
    }
  }
  for (auto n : config.n_ladder) {
    const auto it = r.rho.find(config.K * n);
    if (it == r.rho.end()) continue;
    r.ratio_dev[n] = std::abs(it->second.mean / r.rho[n].mean -
                              std::sqrt(static_cast<double>(config.K)));
  }
  return r;
}

}  // namespace fmoment
