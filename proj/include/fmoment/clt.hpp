#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "fmoment/distribution.hpp"
#include "fmoment/mc.hpp"

namespace fmoment {

// Strictly stationary, centred sequence generator.
class SequenceModel {
 public:
  enum class Kind { iid, moving_average, autoregressive, markov_functional };

  static SequenceModel iid(Distribution d);
  // X_k = sum_{j=0}^{m} w_j eps_{k-j}
  static SequenceModel moving_average(std::vector<double> weights,
                                      Distribution innovation);
  // X_k = phi X_{k-1} + eps_k, |phi| < 1
  static SequenceModel autoregressive(double phi, Distribution innovation);
  // X_k = v(Z_k) for an irreducible chain Z with transition matrix P and the
  // stated period, started from its stationary law; v is centred under it.
  static SequenceModel markov_functional(std::vector<std::vector<double>> P,
                                         std::vector<double> values, int period);

  Kind kind() const noexcept { return kind_; }
  std::string kind_name() const;

  // S_n of one realization.
  double partial_sum(CounterRng& rng, std::size_t n) const;
  void generate(CounterRng& rng, std::span<double> out) const;

  bool has_finite_variance() const;
  double stationary_variance() const;
  // sum over all lags of the autocovariance
  double long_run_variance() const;

  const Distribution& innovation() const noexcept { return innovation_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double phi() const noexcept { return phi_; }
  const std::vector<std::vector<double>>& transition() const noexcept { return P_; }
  // Centred state values.
  const std::vector<double>& state_values() const noexcept { return values_; }
  const std::vector<double>& raw_state_values() const noexcept { return raw_values_; }
  const std::vector<double>& stationary() const noexcept { return pi_; }
  int period() const noexcept { return period_; }
  std::size_t burn_in() const noexcept { return burn_in_; }

 private:
  SequenceModel() = default;

  template <class Sink>
  void run(CounterRng& rng, std::size_t n, Sink&& sink) const;
  std::size_t draw_state(const std::vector<double>& cdf, double u) const;

  Kind kind_ = Kind::iid;
  Distribution innovation_ = Distribution::normal(0.0, 1.0);
  std::vector<double> weights_;
  double phi_ = 0.0;
  std::size_t burn_in_ = 0;
  std::vector<std::vector<double>> P_;
  std::vector<std::vector<double>> cdf_;
  std::vector<double> raw_values_;
  std::vector<double> values_;
  std::vector<double> pi_;
  std::vector<double> pi_cdf_;
  int period_ = 1;
};

// Period of an irreducible transition matrix; throws when not irreducible.
int chain_period(const std::vector<std::vector<double>>& P);
std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& P);

// (E|W|^p)^{1/p}; the p -> 0 limit exp((psi(1/2) + ln 2)/2) at p = 0.
double gaussian_abs_moment(double p);

struct CltConfig {
  double p = 1.0;
  std::vector<std::size_t> n_ladder{256, 512, 1024, 2048, 4096};
  std::size_t K = 2;
  std::size_t replicates = 20000;
  std::vector<double> x_grid{0.5, 1.0, 2.0};
  std::vector<std::size_t> k_grid{2, 4};
  std::vector<double> ui_thresholds{1.0, 2.0, 5.0, 10.0};
  // n values at which WII is measured; empty means the largest ladder n.
  std::vector<std::size_t> wii_n;
  void validate() const;
};

// Replicate i of S_n, i = 0..replicates-1.
std::vector<double> simulate_partial_sums(const SequenceModel& model,
                                          std::size_t n, std::size_t replicates,
                                          const SeedSpec& seed,
                                          Parallelism par = {});

// Seeds used for the replicate sets, shared by the standalone operations
// and run_clt so that both report the same numbers.
SeedSpec sums_seed(const SeedSpec& seed, std::size_t n);
SeedSpec block_seed(const SeedSpec& seed, std::size_t n, std::size_t k);

// rho estimate from a sample of S_n with delta-method standard error.
EstimateWithError rho_from_sums(std::span<const double> sums, double p);

EstimateWithError rho_n(const SequenceModel& model, std::size_t n, double p,
                        std::size_t replicates, const SeedSpec& seed,
                        Parallelism par = {});

double wii_defect(const SequenceModel& model, std::size_t n, std::size_t k,
                  double x, std::size_t replicates, const SeedSpec& seed,
                  Parallelism par = {}, double p = 1.0);

std::map<std::size_t, double> ratio_diagnostic(const SequenceModel& model,
                                               double p,
                                               std::span<const std::size_t> n_ladder,
                                               std::size_t K,
                                               std::size_t replicates,
                                               const SeedSpec& seed,
                                               Parallelism par = {});

std::map<std::pair<std::size_t, double>, double> ui_diagnostic(
    const SequenceModel& model, double p, std::span<const std::size_t> n_ladder,
    std::span<const double> thresholds, std::size_t replicates,
    const SeedSpec& seed, Parallelism par = {});

double ks_normality(const SequenceModel& model, double p, std::size_t n,
                    std::size_t replicates, const SeedSpec& seed,
                    Parallelism par = {});

struct Corollary15Entry {
  double ratio = 0.0;    // ||S_n||_p / sigma_n
  double sigma_n = 0.0;  // sample stdev of S_n
  double ks = 0.0;       // S_n / sigma_n against N(0, (c / ||W||_p)^2)
};
struct Corollary15Report {
  std::map<std::size_t, Corollary15Entry> entries;
  double c_hat = 0.0;  // terminal ratio
  double limit_sd = 0.0;  // c_hat / ||W||_p
};
// Throws std::domain_error for zero-variance models.
Corollary15Report corollary15_consistency(const SequenceModel& model, double p,
                                          std::span<const std::size_t> n_ladder,
                                          std::size_t replicates,
                                          const SeedSpec& seed,
                                          Parallelism par = {});

// Circular block bootstrap of ||S_n||_p / ||W||_p from one centred series.
EstimateWithError block_bootstrap_rho(std::span<const double> series,
                                      std::size_t block_len, std::size_t n,
                                      double p, std::size_t resamples,
                                      const SeedSpec& seed);

struct CltReport {
  CltConfig config;
  std::map<std::size_t, EstimateWithError> rho;
  std::map<std::size_t, double> sigma_n;
  std::map<std::size_t, double> ratio_dev;
  std::map<std::size_t, double> ks;
  std::map<std::tuple<std::size_t, std::size_t, double>, double> wii_defect;
  std::map<std::pair<std::size_t, double>, double> ui_tail;
};

CltReport run_clt(const SequenceModel& model, const CltConfig& config,
                  const SeedSpec& seed, Parallelism par = {});

}  // namespace fmoment
