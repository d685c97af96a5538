#include "fmoment/mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <thread>

namespace fmoment {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::size_t kBlock = 4096;

struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) noexcept {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  // Chan et al. pairwise merge.
  void merge(const Moments& o) noexcept {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double n = na + nb;
    const double d = o.mean - mean;
    mean += d * (nb / n);
    m2 += o.m2 + d * d * (na * nb / n);
    count += o.count;
  }
};

EstimateWithError finish(const Moments& m) {
  EstimateWithError e;
  e.mean = m.mean;
  e.n_replicates = m.count;
  e.std_error = m.count > 1 ? std::sqrt(std::max(0.0, m.m2) /
                                        static_cast<double>(m.count - 1) /
                                        static_cast<double>(m.count))
                            : 0.0;
  return e;
}

template <typename Value>
EstimateWithError blocked_estimate(std::size_t n, Parallelism par,
                                   const Value& value_at) {
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<Moments> parts(blocks);
  std::vector<std::optional<std::size_t>> bad(blocks);
  parallel_for(blocks, par, [&](std::size_t b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    Moments m;
    for (std::size_t i = lo; i < hi; ++i) {
      const double x = value_at(i);
      if (!std::isfinite(x)) {
        bad[b] = i;
        break;
      }
      m.push(x);
    }
    parts[b] = m;
  });
  Moments total;
  for (std::size_t b = 0; b < blocks; ++b) {
    if (bad[b]) {
      throw EstimationError("non-finite replicate value at index " +
                                std::to_string(*bad[b]),
                            *bad[b]);
    }
    total.merge(parts[b]);
  }
  return finish(total);
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

SeedSpec SeedSpec::child(std::uint64_t tag) const noexcept {
  return {master_seed, mix64(stream_id ^ mix64(tag + kGolden))};
}

std::uint64_t SeedSpec::replicate_key(std::uint64_t index) const noexcept {
  std::uint64_t h = mix64(master_seed + kGolden);
  h = mix64(h ^ (stream_id + 0xD1B54A32D192ED03ULL));
  h = mix64(h ^ (index + 0x8CB92BA72F3D8DD7ULL));
  return h;
}

std::uint64_t CounterRng::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept {
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(next_u64() >> 11) + 0.5) * scale;
}

double CounterRng::normal() noexcept { return normal_quantile(uniform()); }

void parallel_for(std::size_t n, Parallelism par,
                  const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, par.threads), n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> error_index(workers, n);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) {
          try {
            body(i);
          } catch (...) {
            errors[w] = std::current_exception();
            error_index[w] = i;
            return;
          }
        }
      });
    }
  }
  // Chunks are ordered, so the first failing chunk holds the lowest index.
  for (std::size_t w = 0; w < workers; ++w) {
    if (errors[w]) std::rethrow_exception(errors[w]);
  }
}

EstimateWithError estimate_expectation(const ReplicateSampler& sampler,
                                       std::size_t n, const SeedSpec& seed,
                                       Parallelism par) {
  if (n < 2) throw std::invalid_argument("estimate_expectation: n must be >= 2");
  return blocked_estimate(n, par, [&](std::size_t i) {
    CounterRng rng(seed, i);
    return sampler(rng);
  });
}

EstimateWithError summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: empty input");
  return blocked_estimate(values.size(), {},
                          [&](std::size_t i) { return values[i]; });
}

std::vector<double> sample_replicates(const ReplicateSampler& sampler,
                                      std::size_t n, const SeedSpec& seed,
                                      Parallelism par) {
  std::vector<double> out(n);
  parallel_for(n, par, [&](std::size_t i) {
    CounterRng rng(seed, i);
    out[i] = sampler(rng);
  });
  return out;
}

EmpiricalSample::EmpiricalSample(std::vector<double> values, SeedSpec seed)
    : values_(std::move(values)), seed_(seed) {
  std::sort(values_.begin(), values_.end());
}

EmpiricalSample EmpiricalSample::draw(const ReplicateSampler& sampler,
                                      std::size_t n, const SeedSpec& seed,
                                      Parallelism par) {
  return EmpiricalSample(sample_replicates(sampler, n, seed, par), seed);
}

double EmpiricalSample::mean() const { return summarize(values_).mean; }

double EmpiricalSample::stdev() const {
  const auto e = summarize(values_);
  return e.std_error * std::sqrt(static_cast<double>(e.n_replicates));
}

double ks_distance(const EmpiricalSample& sample,
                   const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
  const auto& v = sample.values();
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  double prev = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i + 1;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double F = cdf(v[i]);
    if (F < prev - 1e-12) {
      throw std::invalid_argument("ks_distance: cdf is not non-decreasing");
    }
    prev = F;
    d = std::max({d, F - static_cast<double>(i) / n,
                  static_cast<double>(j) / n - F});
    i = j;
  }
  return std::clamp(d, 0.0, 1.0);
}

double normal_fit_ks(const EmpiricalSample& sample) {
  const double mu = sample.mean();
  const double sd = sample.stdev();
  if (!(sd > 0.0)) return 0.5;
  return ks_distance(sample,
                     [&](double x) { return normal_cdf((x - mu) / sd); });
}

NormalFitDistance min_normal_ks(const EmpiricalSample& sample) {
  if (sample.empty()) throw std::invalid_argument("min_normal_ks: empty sample");
  NormalFitDistance out;
  const auto& v = sample.values();
  std::size_t atom = 1;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i + 1;
    while (j < v.size() && v[j] == v[i]) ++j;
    atom = std::max(atom, j - i);
    i = j;
  }
  out.atom_lower_bound = 0.5 * static_cast<double>(atom) /
                         static_cast<double>(v.size());
  const double mu0 = sample.mean();
  const double sd0 = sample.stdev();
  out.best_mean = mu0;
  out.best_stdev = sd0;
  if (!(sd0 > 0.0)) {
    out.best_search = 0.5;
    return out;
  }
  auto ks_at = [&](double mu, double sd) {
    return ks_distance(sample,
                       [&](double x) { return normal_cdf((x - mu) / sd); });
  };
  out.best_search = ks_at(mu0, sd0);
  double mu_span = 2.0 * sd0;
  double log_sd_span = 2.0;
  constexpr int steps = 10;
  for (int round = 0; round < 4; ++round) {
    const double mu_c = out.best_mean;
    const double lsd_c = std::log2(out.best_stdev);
    for (int a = -steps; a <= steps; ++a) {
      for (int b = -steps; b <= steps; ++b) {
        const double mu = mu_c + mu_span * a / steps;
        const double sd = std::exp2(lsd_c + log_sd_span * b / steps);
        const double d = ks_at(mu, sd);
        if (d < out.best_search) {
          out.best_search = d;
          out.best_mean = mu;
          out.best_stdev = sd;
        }
      }
    }
    mu_span /= 4.0;
    log_sd_span /= 4.0;
  }
  return out;
}

std::complex<double> empirical_char_fn(std::span<const double> values,
                                       double x) {
  if (values.empty()) {
    throw std::invalid_argument("empirical_char_fn: empty sample");
  }
  if (x == 0.0) return {1.0, 0.0};
  double re = 0.0;
  double im = 0.0;
  for (double v : values) {
    re += std::cos(x * v);
    im += std::sin(x * v);
  }
  const double n = static_cast<double>(values.size());
  return {re / n, im / n};
}

std::complex<double> empirical_char_fn(const EmpiricalSample& sample,
                                       double x) {
  return empirical_char_fn(std::span<const double>(sample.values()), x);
}

double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    if (u == 0.0) return -std::numeric_limits<double>::infinity();
    if (u == 1.0) return std::numeric_limits<double>::infinity();
    throw std::domain_error("normal_quantile: argument outside [0, 1]");
  }
  const double q = u - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
            1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? u : 1.0 - u;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return q < 0.0 ? -val : val;
}

}  // namespace fmoment
