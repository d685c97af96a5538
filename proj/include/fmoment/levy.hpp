#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fmoment/charfunc.hpp"
#include "fmoment/curve.hpp"
#include "fmoment/distribution.hpp"
#include "fmoment/mc.hpp"

namespace fmoment {

struct FixedJump {
  double time = 1.0;  // in (0, 1]
  Distribution jump = Distribution::constant(0.0);
};

// Independent-increment process on [0, 1] given by its decomposition into a
// centred Gaussian part with variance function sigma^2(t), a drift c(t),
// jumps at fixed times and a finite-activity compound-Poisson part. Small
// jumps below `truncation` are only tracked diagnostically.
struct ProcessSpec {
  Curve variance_fn = Curve::zero();
  Curve drift = Curve::zero();
  std::vector<FixedJump> fixed_jumps;  // sorted, distinct times
  double jump_rate = 0.0;
  Distribution jump_dist = Distribution::constant(0.0);
  double truncation = 0.0;

  // Throws std::invalid_argument when an invariant fails (sigma^2(0) != 0,
  // sigma^2 decreasing on a 1024-point grid, c(0) != 0, unsorted or
  // out-of-range jump times, negative rate).
  void validate() const;
  bool is_homogeneous() const;
  bool has_gaussian_component() const;
  bool has_jumps() const;
};

ProcessSpec brownian(double sigma, double drift_slope = 0.0);
ProcessSpec compound_poisson(double rate, Distribution jumps);
// Adds an independent compound-Poisson component to a spec without one.
ProcessSpec with_compound_poisson(ProcessSpec spec, double rate, Distribution jumps);

// Poisson(mean) by inversion of one uniform; mean <= 700.
std::uint64_t poisson_from_uniform(double mean, double u);

// X(s+h) - X(s).
double sample_increment(const ProcessSpec& spec, double s, double h,
                        CounterRng& rng);
// Replicate i of the increment over (s, s+h], i = 0..n-1.
std::vector<double> sample_increments(const ProcessSpec& spec, double s,
                                      double h, std::size_t n,
                                      const SeedSpec& seed,
                                      Parallelism par = {});

struct PathGrid {
  std::vector<double> times;
  std::vector<double> values;
  SeedSpec seed;
  std::uint64_t replicate = 0;
};

// Cumulative sums of increments over (0, t_0], (t_0, t_1], ...
PathGrid sample_path(const ProcessSpec& spec, std::span<const double> grid,
                     const SeedSpec& seed, std::uint64_t replicate = 0);

// lambda t E[xi^2 1{|xi| <= a}] for the compound-Poisson part.
double small_jump_variance(const ProcessSpec& spec, double t, double a);

// Non-Gaussian homogeneous process X(t) = b Y(t) + k(t) with Y a unit-rate
// Poisson process, realised only on a decreasing sequence t_n and on t = 1.
// k is additive, fixed by k(t_n) = f^{-1}(1) sqrt(t_n) and k(1) = 0; the
// sequence is assumed rationally independent (not checkable numerically).
class RestrictedCounterexample {
 public:
  const std::vector<double>& t_seq() const noexcept { return t_seq_; }
  const std::vector<double>& k_values() const noexcept { return k_values_; }
  double b() const noexcept { return b_; }
  double base_rate() const noexcept { return 1.0; }
  // E f(b Y(1)) at the solved b.
  double calibrated_moment() const noexcept { return calibrated_; }

  // k at a sequence point or at 1; other times throw std::domain_error.
  double k_at(double t) const;
  double sample_at_index(std::size_t n, CounterRng& rng) const;
  // X(t) for t in the sequence or t = 1.
  double sample_at(double t, CounterRng& rng) const;

 private:
  friend RestrictedCounterexample counterexample(const CharFn& f,
                                                 std::vector<double> t_seq);
  std::vector<double> t_seq_;
  std::vector<double> k_values_;
  std::vector<double> no_jump_prob_;  // exp(-t_n)
  double b_ = 1.0;
  double calibrated_ = 1.0;
};

// E f(b Y) for Y ~ Poisson(1), series cut once the tail mass is below 1e-14.
double poisson_moment(const CharFn& f, double b);

// Solves E f(b Y(1)) = 1 within 1e-8 and tabulates k on t_seq, which must be
// strictly decreasing in (0, 1].
RestrictedCounterexample counterexample(const CharFn& f,
                                        std::vector<double> t_seq);

}  // namespace fmoment
