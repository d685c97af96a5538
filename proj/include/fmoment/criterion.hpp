#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fmoment/charfunc.hpp"
#include "fmoment/levy.hpp"
#include "fmoment/mc.hpp"

namespace fmoment {

enum class Verdict { BrownianCompatible, NotCompatible, Inconclusive };
std::string to_string(Verdict v);

struct CriterionConfig {
  std::vector<double> s_grid;    // sorted, in [0, 1)
  std::vector<double> h_ladder;  // h0 * 2^-j, j = 0..J
  std::size_t replicates = 50000;
  CharFn f = CharFn::abs();
  double pass_fraction = 0.1;  // delta
  double slack = 3.0;          // in combined standard errors

  // 32-point grid, ladder h0 2^-j for j <= J.
  static CriterionConfig standard(CharFn f, std::size_t replicates,
                                  double h0 = 0.1, int J = 8, int points = 32);
  void validate() const;
};

std::vector<double> dyadic_ladder(double h0, int J);
// s_i = (1 - h0) i / points, i = 0..points-1; keeps s + h0 <= 1.
std::vector<double> uniform_s_grid(int points, double h0);

// E f(h^{-1/2} [X(s+h) - X(s)]) by Monte Carlo; n >= 1000.
EstimateWithError increment_moment(const ProcessSpec& spec, const CharFn& f,
                                   double s, double h, std::size_t n,
                                   const SeedSpec& seed, Parallelism par = {});

struct CriterionReport {
  std::vector<double> s_grid;
  std::vector<double> h_ladder;
  std::vector<std::vector<EstimateWithError>> m_hat;  // [s][h]
  std::vector<double> liminf_proxy;                   // min_j m_hat[s][j].mean
  std::vector<std::size_t> argmin;
  std::vector<bool> passes;
  double pass_share = 0.0;
  EstimateWithError ef_x1;
  double sigma_hat = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<std::string> diagnostics;
};

CriterionReport run_criterion(const ProcessSpec& spec,
                              const CriterionConfig& config,
                              const SeedSpec& seed, Parallelism par = {});

struct SubsequenceReport {
  std::vector<double> t_seq;
  std::vector<EstimateWithError> values;  // E f(t_n^{-1/2} X(t_n))
  EstimateWithError ef_x1;
  double liminf_proxy = 0.0;  // min over the sequence
  std::size_t argmin = 0;
  double sigma_hat = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

// Homogeneous specs only (std::invalid_argument otherwise).
SubsequenceReport subsequence_criterion(const ProcessSpec& spec,
                                        const CharFn& f,
                                        std::span<const double> t_seq,
                                        std::size_t n, const SeedSpec& seed,
                                        Parallelism par = {},
                                        double slack = 3.0);
SubsequenceReport subsequence_criterion(const RestrictedCounterexample& ce,
                                        const CharFn& f, std::size_t n,
                                        const SeedSpec& seed,
                                        Parallelism par = {},
                                        double slack = 3.0);

struct NegligibilityProfile {
  std::vector<double> h_ladder;
  std::vector<double> sup_mean;  // per h: max over s of m_hat mean
  std::vector<double> sup_std_error;
  std::vector<std::size_t> sup_at;  // s index of the max
  std::vector<std::vector<EstimateWithError>> m_hat;  // [s][h]
  double decrease_fraction = 0.0;  // share of consecutive decreases
};

// Spec must have no Gaussian component.
NegligibilityProfile negligibility_profile(const ProcessSpec& spec,
                                           const CriterionConfig& config,
                                           const SeedSpec& seed,
                                           Parallelism par = {});

struct GaussianVarianceReport {
  std::vector<double> grid;
  std::vector<double> lower_bound_violations;  // t with sigma^2(t) < target^2 t
  bool lower_bound_holds = true;
  bool equality_at_one = false;  // sigma^2(1) == target^2
  // Only meaningful when equality_at_one.
  bool linear_equality = false;
  double max_equality_deviation = 0.0;
};

// Analytic check on the variance function; spec must be jump-free.
GaussianVarianceReport gaussian_variance_check(const ProcessSpec& spec,
                                               double sigma_target,
                                               std::span<const double> grid);

}  // namespace fmoment
