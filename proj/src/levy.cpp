#include "fmoment/levy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fmoment {

void ProcessSpec::validate() const {
  if (std::abs(variance_fn(0.0)) > 1e-15) {
    throw std::invalid_argument("ProcessSpec: variance function must vanish at 0");
  }
  double prev = variance_fn(0.0);
  for (int i = 1; i <= 1024; ++i) {
    const double v = variance_fn(i / 1024.0);
    if (!std::isfinite(v) || v < prev - 1e-15) {
      throw std::invalid_argument("ProcessSpec: variance function must be finite and non-decreasing");
    }
    prev = v;
  }
  if (std::abs(drift(0.0)) > 1e-15) {
    throw std::invalid_argument("ProcessSpec: drift must vanish at 0");
  }
  double last = 0.0;
  for (const auto& j : fixed_jumps) {
    if (!(j.time > last) || j.time > 1.0) {
      throw std::invalid_argument("ProcessSpec: fixed jump times must be distinct, sorted and in (0, 1]");
    }
    last = j.time;
  }
  if (!(jump_rate >= 0.0) || !std::isfinite(jump_rate)) {
    throw std::invalid_argument("ProcessSpec: jump rate must be finite and >= 0");
  }
  if (!(truncation >= 0.0)) {
    throw std::invalid_argument("ProcessSpec: truncation must be >= 0");
  }
}

bool ProcessSpec::is_homogeneous() const {
  return variance_fn.is_linear() && drift.is_linear() && fixed_jumps.empty();
}

bool ProcessSpec::has_gaussian_component() const {
  return !variance_fn.is_identically_zero() && variance_fn(1.0) > 0.0;
}

bool ProcessSpec::has_jumps() const {
  const bool cp = jump_rate > 0.0 &&
                  !(jump_dist.kind() == Distribution::Kind::constant &&
                    jump_dist.params()[0] == 0.0);
  return cp || !fixed_jumps.empty();
}

ProcessSpec brownian(double sigma, double drift_slope) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("brownian: sigma must be finite and >= 0");
  }
  ProcessSpec s;
  s.variance_fn = sigma == 0.0 ? Curve::zero() : Curve::linear(sigma * sigma);
  s.drift = drift_slope == 0.0 ? Curve::zero() : Curve::linear(drift_slope);
  return s;
}

ProcessSpec compound_poisson(double rate, Distribution jumps) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("compound_poisson: rate must be > 0");
  }
  ProcessSpec s;
  s.jump_rate = rate;
  s.jump_dist = std::move(jumps);
  return s;
}

ProcessSpec with_compound_poisson(ProcessSpec spec, double rate, Distribution jumps) {
  if (spec.jump_rate > 0.0) {
    throw std::invalid_argument("with_compound_poisson: spec already has a compound-Poisson part");
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("with_compound_poisson: rate must be > 0");
  }
  spec.jump_rate = rate;
  spec.jump_dist = std::move(jumps);
  return spec;
}

std::uint64_t poisson_from_uniform(double mean, double u) {
  if (mean <= 0.0) return 0;
  if (mean > 700.0) throw std::invalid_argument("poisson_from_uniform: mean above 700");
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    if (static_cast<double>(k) > mean && p < 1e-17 * cdf) break;
  }
  return k;
}

double sample_increment(const ProcessSpec& spec, double s, double h,
                        CounterRng& rng) {
  if (!std::isfinite(s) || !std::isfinite(h) || s < 0.0 || !(h > 0.0) ||
      s + h > 1.0 + 1e-12) {
    throw std::out_of_range("sample_increment: interval (s, s+h] must lie in [0, 1]");
  }
  const double e = s + h;
  double x = spec.drift(e) - spec.drift(s);
  const double dv = spec.variance_fn(e) - spec.variance_fn(s);
  if (dv > 0.0) x += std::sqrt(dv) * rng.normal();
  for (const auto& j : spec.fixed_jumps) {
    if (j.time > s && j.time <= e) x += j.jump.sample(rng);
  }
  if (spec.jump_rate > 0.0) {
    const auto count = poisson_from_uniform(spec.jump_rate * h, rng.uniform());
    for (std::uint64_t k = 0; k < count; ++k) x += spec.jump_dist.sample(rng);
  }
  return x;
}

std::vector<double> sample_increments(const ProcessSpec& spec, double s,
                                      double h, std::size_t n,
                                      const SeedSpec& seed, Parallelism par) {
  return sample_replicates(
      [&](CounterRng& rng) { return sample_increment(spec, s, h, rng); }, n,
      seed, par);
}

PathGrid sample_path(const ProcessSpec& spec, std::span<const double> grid,
                     const SeedSpec& seed, std::uint64_t replicate) {
  if (grid.empty()) throw std::invalid_argument("sample_path: empty grid");
  if (!(grid.front() > 0.0) || grid.back() > 1.0) {
    throw std::invalid_argument("sample_path: grid must lie in (0, 1]");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("sample_path: grid must be strictly increasing");
  }
  PathGrid path;
  path.seed = seed;
  path.replicate = replicate;
  path.times.assign(grid.begin(), grid.end());
  path.values.reserve(grid.size());
  CounterRng rng(seed, replicate);
  double prev_t = 0.0;
  double acc = 0.0;
  for (double t : grid) {
    acc += sample_increment(spec, prev_t, t - prev_t, rng);
    path.values.push_back(acc);
    prev_t = t;
  }
  return path;
}

double small_jump_variance(const ProcessSpec& spec, double t, double a) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::out_of_range("small_jump_variance: t must lie in [0, 1]");
  if (!(a > 0.0)) throw std::invalid_argument("small_jump_variance: a must be > 0");
  if (spec.jump_rate == 0.0) return 0.0;
  return spec.jump_rate * t * spec.jump_dist.truncated_second_moment(a);
}

double RestrictedCounterexample::k_at(double t) const {
  if (t == 1.0) return 0.0;
  const auto it = std::find(t_seq_.begin(), t_seq_.end(), t);
  if (it == t_seq_.end()) {
    throw std::domain_error("counterexample: k is only defined on the sequence and at 1");
  }
  return k_values_[static_cast<std::size_t>(it - t_seq_.begin())];
}

double RestrictedCounterexample::sample_at_index(std::size_t n,
                                                 CounterRng& rng) const {
  const double u = rng.uniform();
  const double y = u <= no_jump_prob_.at(n)
                       ? 0.0
                       : static_cast<double>(poisson_from_uniform(t_seq_[n], u));
  return b_ * y + k_values_[n];
}

double RestrictedCounterexample::sample_at(double t, CounterRng& rng) const {
  if (t == 1.0) {
    return b_ * static_cast<double>(poisson_from_uniform(1.0, rng.uniform()));
  }
  const auto it = std::find(t_seq_.begin(), t_seq_.end(), t);
  if (it == t_seq_.end()) {
    throw std::domain_error("counterexample: X(t) is only available on the sequence and at 1");
  }
  return sample_at_index(static_cast<std::size_t>(it - t_seq_.begin()), rng);
}

double poisson_moment(const CharFn& f, double b) {
  double p = std::exp(-1.0);
  double mass = p;
  double sum = 0.0;
  for (int k = 1; k <= 400; ++k) {
    p /= k;
    mass += p;
    sum += p * f(b * k);
    if (1.0 - mass < 1e-14 && k >= 2) break;
  }
  return sum;
}

RestrictedCounterexample counterexample(const CharFn& f,
                                        std::vector<double> t_seq) {
  if (t_seq.empty()) throw std::invalid_argument("counterexample: empty sequence");
  for (std::size_t i = 0; i < t_seq.size(); ++i) {
    if (!(t_seq[i] > 0.0 && t_seq[i] <= 1.0)) {
      throw std::invalid_argument("counterexample: sequence must lie in (0, 1]");
    }
    if (i > 0 && !(t_seq[i] < t_seq[i - 1])) {
      throw std::invalid_argument("counterexample: sequence must be strictly decreasing");
    }
  }
  double lo = 0.0;
  double hi = 1.0;
  while (poisson_moment(f, hi) < 1.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("counterexample: no scale b found");
  }
  for (int i = 0; i < 300 && hi - lo > 1e-16 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (poisson_moment(f, mid) < 1.0 ? lo : hi) = mid;
  }
  RestrictedCounterexample ce;
  ce.b_ = 0.5 * (lo + hi);
  ce.calibrated_ = poisson_moment(f, ce.b_);
  if (std::abs(ce.calibrated_ - 1.0) > 1e-8) {
    throw std::runtime_error("counterexample: calibration E f(bY(1)) = 1 failed");
  }
  const double f_inv_one = f.inverse(1.0);
  ce.t_seq_ = std::move(t_seq);
  for (double t : ce.t_seq_) {
    ce.k_values_.push_back(f_inv_one * std::sqrt(t));
    ce.no_jump_prob_.push_back(std::exp(-t));
  }
  return ce;
}

}  // namespace fmoment
