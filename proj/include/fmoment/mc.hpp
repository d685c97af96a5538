#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fmoment {

// splitmix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  // Sub-stream for a labelled sub-task (a grid cell, a replicate set, ...).
  SeedSpec child(std::uint64_t tag) const noexcept;

  // Key of replicate `index`; depends only on (master_seed, stream_id, index).
  std::uint64_t replicate_key(std::uint64_t index) const noexcept;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

// Counter-based generator: output k is mix64(key + k * golden). A replicate
// owns one of these, so draws never depend on scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}
  CounterRng(const SeedSpec& seed, std::uint64_t replicate) noexcept
      : key_(seed.replicate_key(replicate)) {}

  std::uint64_t next_u64() noexcept;
  // Uniform on the open interval (0, 1), 53 bits.
  double uniform() noexcept;
  // Standard normal by inverse CDF: exactly one uniform per draw.
  double normal() noexcept;

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct Parallelism {
  unsigned threads = 1;
};

// Runs body(i) for i in [0, n). Work is split into contiguous chunks; when
// several indices throw, the exception of the lowest index is rethrown.
void parallel_for(std::size_t n, Parallelism par,
                  const std::function<void(std::size_t)>& body);

struct EstimateWithError {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_replicates = 0;
};

class EstimationError : public std::runtime_error {
 public:
  EstimationError(const std::string& what, std::size_t replicate)
      : std::runtime_error(what), replicate_(replicate) {}
  std::size_t replicate() const noexcept { return replicate_; }

 private:
  std::size_t replicate_;
};

using ReplicateSampler = std::function<double(CounterRng&)>;

// Mean and unbiased standard error over exactly n replicates. Replicates are
// accumulated in fixed blocks merged in index order, so the result is
// bit-identical for every thread count. Throws EstimationError carrying the
// lowest offending index when a replicate is not finite.
EstimateWithError estimate_expectation(const ReplicateSampler& sampler,
                                       std::size_t n, const SeedSpec& seed,
                                       Parallelism par = {});

// Same statistic over already materialized values.
EstimateWithError summarize(std::span<const double> values);

std::vector<double> sample_replicates(const ReplicateSampler& sampler,
                                      std::size_t n, const SeedSpec& seed,
                                      Parallelism par = {});

class EmpiricalSample {
 public:
  EmpiricalSample() = default;
  explicit EmpiricalSample(std::vector<double> values, SeedSpec seed = {});

  static EmpiricalSample draw(const ReplicateSampler& sampler, std::size_t n,
                              const SeedSpec& seed, Parallelism par = {});

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  const SeedSpec& seed() const noexcept { return seed_; }
  double mean() const;
  double stdev() const;  // unbiased

 private:
  std::vector<double> values_;  // sorted
  SeedSpec seed_;
};

// sup_x |F_n(x) - cdf(x)| using both one-sided limits of F_n at each point.
double ks_distance(const EmpiricalSample& sample,
                   const std::function<double(double)>& cdf);

// KS distance against the normal with the sample's mean and stdev.
double normal_fit_ks(const EmpiricalSample& sample);

// Smallest KS distance to any normal law found by a coarse-to-fine search
// over (mean, stdev), together with the rigorous lower bound
// (largest atom)/2 that holds for every continuous cdf.
struct NormalFitDistance {
  double best_search = 1.0;
  double atom_lower_bound = 0.0;
  double best_mean = 0.0;
  double best_stdev = 1.0;
};
NormalFitDistance min_normal_ks(const EmpiricalSample& sample);

std::complex<double> empirical_char_fn(const EmpiricalSample& sample, double x);
std::complex<double> empirical_char_fn(std::span<const double> values,
                                       double x);

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
// Wichura AS241; relative accuracy about 1e-16.
double normal_quantile(double u);

}  // namespace fmoment
