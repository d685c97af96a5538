#include "fmoment/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fmoment {

namespace {

constexpr std::uint64_t kEfStream = 0;
constexpr std::uint64_t kCellStream = 0x100;

double combined(double a, double b) { return std::sqrt(a * a + b * b); }

EstimateWithError ef_at_one(const ProcessSpec& spec, const CharFn& f,
                            std::size_t n, const SeedSpec& seed,
                            Parallelism par) {
  return estimate_expectation(
      [&](CounterRng& rng) {
        const double x = sample_increment(spec, 0.0, 1.0, rng);
        return std::isfinite(x) ? f(x) : x;
      },
      n, seed.child(kEfStream), par);
}

// Matrix of increment moments; failed cells are NaN and listed in diag.
std::vector<std::vector<EstimateWithError>> cell_matrix(
    const ProcessSpec& spec, const CriterionConfig& c, const SeedSpec& seed,
    Parallelism par, std::vector<std::string>& diag) {
  std::vector<std::vector<EstimateWithError>> m(c.s_grid.size());
  for (std::size_t i = 0; i < c.s_grid.size(); ++i) {
    m[i].resize(c.h_ladder.size());
    for (std::size_t j = 0; j < c.h_ladder.size(); ++j) {
      const SeedSpec cell = seed.child(kCellStream + i).child(j);
      try {
        m[i][j] = increment_moment(spec, c.f, c.s_grid[i], c.h_ladder[j],
                                   c.replicates, cell, par);
      } catch (const EstimationError& e) {
        m[i][j] = {std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN(), c.replicates};
        diag.push_back("cell s=" + std::to_string(c.s_grid[i]) +
                       " h=" + std::to_string(c.h_ladder[j]) + ": " + e.what() +
                       " (replicate " + std::to_string(e.replicate()) + ")");
      }
    }
  }
  return m;
}

Verdict compare(double proxy, double proxy_se, const EstimateWithError& ef,
                double slack) {
  return proxy >= ef.mean - slack * combined(proxy_se, ef.std_error)
             ? Verdict::BrownianCompatible
             : Verdict::NotCompatible;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::BrownianCompatible: return "BrownianCompatible";
    case Verdict::NotCompatible: return "NotCompatible";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::vector<double> dyadic_ladder(double h0, int J) {
  if (!(h0 > 0.0 && h0 <= 1.0) || J < 0) throw std::invalid_argument("dyadic_ladder: need 0 < h0 <= 1 and J >= 0");
  std::vector<double> h;
  for (int j = 0; j <= J; ++j) h.push_back(std::ldexp(h0, -j));
  return h;
}

std::vector<double> uniform_s_grid(int points, double h0) {
  if (points < 1 || !(h0 > 0.0 && h0 <= 1.0)) throw std::invalid_argument("uniform_s_grid: need points >= 1 and 0 < h0 <= 1");
  std::vector<double> s;
  for (int i = 0; i < points; ++i) s.push_back((1.0 - h0) * i / points);
  return s;
}

CriterionConfig CriterionConfig::standard(CharFn f, std::size_t replicates,
                                          double h0, int J, int points) {
  CriterionConfig c;
  c.s_grid = uniform_s_grid(points, h0);
  c.h_ladder = dyadic_ladder(h0, J);
  c.replicates = replicates;
  c.f = std::move(f);
  return c;
}

void CriterionConfig::validate() const {
  const auto bad = [](const char* m) { throw std::invalid_argument(m); };
  if (s_grid.empty()) bad("CriterionConfig: empty s grid");
  if (h_ladder.size() < 5) bad("CriterionConfig: ladder needs J >= 4");
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (!(s_grid[i] >= 0.0 && s_grid[i] < 1.0)) bad("CriterionConfig: s grid must lie in [0, 1)");
    if (i > 0 && !(s_grid[i] > s_grid[i - 1])) bad("CriterionConfig: s grid must be sorted");
  }
  for (std::size_t j = 1; j < h_ladder.size(); ++j) {
    if (h_ladder[j] != 0.5 * h_ladder[j - 1]) bad("CriterionConfig: ladder must be h0 2^-j");
  }
  if (!(h_ladder[0] > 0.0)) bad("CriterionConfig: h0 must be positive");
  if (s_grid.back() + h_ladder[0] > 1.0 + 1e-12) bad("CriterionConfig: s + h0 must not exceed 1");
  if (replicates < 1000) bad("CriterionConfig: need at least 1000 replicates per cell");
  if (!(pass_fraction > 0.0 && pass_fraction < 1.0)) bad("CriterionConfig: pass fraction must lie in (0, 1)");
  if (!(slack >= 0.0)) bad("CriterionConfig: slack must be >= 0");
}

EstimateWithError increment_moment(const ProcessSpec& spec, const CharFn& f,
                                   double s, double h, std::size_t n,
                                   const SeedSpec& seed, Parallelism par) {
  if (n < 1000) throw std::invalid_argument("increment_moment: need n >= 1000");
  if (!(s >= 0.0) || !(h > 0.0) || s + h > 1.0 + 1e-12) {
    throw std::out_of_range("increment_moment: need 0 <= s < s+h <= 1");
  }
  const double scale = 1.0 / std::sqrt(h);
  return estimate_expectation(
      [&](CounterRng& rng) {
        // a non-finite increment is reported by the estimator with its index
        const double x = scale * sample_increment(spec, s, h, rng);
        return std::isfinite(x) ? f(x) : x;
      },
      n, seed, par);
}

CriterionReport run_criterion(const ProcessSpec& spec,
                              const CriterionConfig& config,
                              const SeedSpec& seed, Parallelism par) {
  config.validate();
  spec.validate();
  CriterionReport r;
  r.s_grid = config.s_grid;
  r.h_ladder = config.h_ladder;
  r.m_hat = cell_matrix(spec, config, seed, par, r.diagnostics);

  bool failed = !r.diagnostics.empty();
  try {
    r.ef_x1 = ef_at_one(spec, config.f, config.replicates, seed, par);
    r.sigma_hat = psi_inverse(config.f, r.ef_x1.mean);
  } catch (const std::exception& e) {
    failed = true;
    r.sigma_hat = std::numeric_limits<double>::quiet_NaN();
    r.diagnostics.push_back(std::string("E f(X(1)): ") + e.what());
  }

  std::size_t pass = 0;
  for (const auto& row : r.m_hat) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (row[j].mean < row[best].mean) best = j;
    }
    r.argmin.push_back(best);
    r.liminf_proxy.push_back(row[best].mean);
    const bool ok = !failed && compare(row[best].mean, row[best].std_error,
                                       r.ef_x1, config.slack) ==
                                   Verdict::BrownianCompatible;
    r.passes.push_back(ok);
    pass += ok;
  }
  const double n_s = static_cast<double>(r.s_grid.size());
  r.pass_share = pass / n_s;
  if (failed) {
    r.verdict = Verdict::Inconclusive;
  } else if (r.pass_share >= 1.0 - config.pass_fraction) {
    r.verdict = Verdict::BrownianCompatible;
  } else if ((n_s - pass) / n_s >= config.pass_fraction) {
    r.verdict = Verdict::NotCompatible;
  } else {
    r.verdict = Verdict::Inconclusive;
  }
  return r;
}

namespace {

void check_sequence(std::span<const double> t_seq) {
  if (t_seq.empty()) throw std::invalid_argument("subsequence_criterion: empty sequence");
  for (double t : t_seq) {
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("subsequence_criterion: sequence must lie in (0, 1]");
  }
}

void finish(SubsequenceReport& r, const CharFn& f, double slack) {
  r.argmin = 0;
  for (std::size_t i = 1; i < r.values.size(); ++i) {
    if (r.values[i].mean < r.values[r.argmin].mean) r.argmin = i;
  }
  r.liminf_proxy = r.values[r.argmin].mean;
  r.sigma_hat = psi_inverse(f, r.ef_x1.mean);
  r.verdict = compare(r.liminf_proxy, r.values[r.argmin].std_error, r.ef_x1, slack);
}

}  // namespace

SubsequenceReport subsequence_criterion(const ProcessSpec& spec,
                                        const CharFn& f,
                                        std::span<const double> t_seq,
                                        std::size_t n, const SeedSpec& seed,
                                        Parallelism par, double slack) {
  spec.validate();
  if (!spec.is_homogeneous()) {
    throw std::invalid_argument("subsequence_criterion: spec must be homogeneous (linear variance and drift, no fixed jumps)");
  }
  check_sequence(t_seq);
  SubsequenceReport r;
  r.t_seq.assign(t_seq.begin(), t_seq.end());
  for (std::size_t i = 0; i < t_seq.size(); ++i) {
    r.values.push_back(increment_moment(spec, f, 0.0, t_seq[i], n,
                                        seed.child(kCellStream + i), par));
  }
  r.ef_x1 = ef_at_one(spec, f, n, seed, par);
  finish(r, f, slack);
  return r;
}

SubsequenceReport subsequence_criterion(const RestrictedCounterexample& ce,
                                        const CharFn& f, std::size_t n,
                                        const SeedSpec& seed, Parallelism par,
                                        double slack) {
  if (n < 1000) throw std::invalid_argument("subsequence_criterion: need n >= 1000");
  check_sequence(ce.t_seq());
  SubsequenceReport r;
  r.t_seq = ce.t_seq();
  for (std::size_t i = 0; i < r.t_seq.size(); ++i) {
    const double scale = 1.0 / std::sqrt(r.t_seq[i]);
    r.values.push_back(estimate_expectation(
        [&](CounterRng& rng) { return f(scale * ce.sample_at_index(i, rng)); },
        n, seed.child(kCellStream + i), par));
  }
  r.ef_x1 = estimate_expectation(
      [&](CounterRng& rng) { return f(ce.sample_at(1.0, rng)); }, n,
      seed.child(kEfStream), par);
  finish(r, f, slack);
  return r;
}

NegligibilityProfile negligibility_profile(const ProcessSpec& spec,
                                           const CriterionConfig& config,
                                           const SeedSpec& seed,
                                           Parallelism par) {
  config.validate();
  spec.validate();
  if (spec.has_gaussian_component()) {
    throw std::invalid_argument("negligibility_profile: spec must have no Gaussian component");
  }
  NegligibilityProfile p;
  p.h_ladder = config.h_ladder;
  std::vector<std::string> diag;
  p.m_hat = cell_matrix(spec, config, seed, par, diag);
  if (!diag.empty()) throw EstimationError(diag.front(), 0);
  for (std::size_t j = 0; j < p.h_ladder.size(); ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.m_hat.size(); ++i) {
      if (p.m_hat[i][j].mean > p.m_hat[best][j].mean) best = i;
    }
    p.sup_at.push_back(best);
    p.sup_mean.push_back(p.m_hat[best][j].mean);
    p.sup_std_error.push_back(p.m_hat[best][j].std_error);
  }
  std::size_t dec = 0;
  for (std::size_t j = 1; j < p.sup_mean.size(); ++j) dec += p.sup_mean[j] < p.sup_mean[j - 1];
  p.decrease_fraction = static_cast<double>(dec) / static_cast<double>(p.sup_mean.size() - 1);
  return p;
}

GaussianVarianceReport gaussian_variance_check(const ProcessSpec& spec,
                                               double sigma_target,
                                               std::span<const double> grid) {
  spec.validate();
  if (spec.has_jumps()) throw std::invalid_argument("gaussian_variance_check: spec must be jump-free");
  if (!(sigma_target >= 0.0)) throw std::invalid_argument("gaussian_variance_check: sigma_target must be >= 0");
  constexpr double tol = 1e-12;
  const double s2 = sigma_target * sigma_target;
  GaussianVarianceReport r;
  r.grid.assign(grid.begin(), grid.end());
  for (double t : grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("gaussian_variance_check: grid must lie in [0, 1]");
    const double v = spec.variance_fn(t);
    if (v < s2 * t - tol) r.lower_bound_violations.push_back(t);
    r.max_equality_deviation = std::max(r.max_equality_deviation, std::abs(v - s2 * t));
  }
  r.lower_bound_holds = r.lower_bound_violations.empty();
  r.equality_at_one = std::abs(spec.variance_fn(1.0) - s2) <= tol;
  r.linear_equality = r.equality_at_one && r.max_equality_deviation <= tol;
  return r;
}

}  // namespace fmoment
