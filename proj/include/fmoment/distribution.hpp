#pragma once

#include <string>
#include <vector>

#include "fmoment/mc.hpp"

namespace fmoment {

// Real distribution sampled by inverse CDF from a single uniform.
class Distribution {
 public:
  enum class Kind { constant, uniform, normal, discrete, cauchy };

  static Distribution constant(double value);
  static Distribution uniform(double lo, double hi);
  static Distribution normal(double mean, double sd);
  // Values may repeat and come in any order; probabilities must sum to 1.
  static Distribution discrete(std::vector<double> values,
                               std::vector<double> probs);
  static Distribution cauchy(double location, double scale);

  Kind kind() const noexcept { return kind_; }
  std::string kind_name() const;

  double quantile(double u) const;
  double sample(CounterRng& rng) const { return quantile(rng.uniform()); }

  bool has_mean() const noexcept { return kind_ != Kind::cauchy; }
  double mean() const;
  double variance() const;
  // E[X^2 1{|X| <= a}]
  double truncated_second_moment(double a) const;
  // Smallest |x| over the support.
  double min_abs_support() const;
  bool is_symmetric(double tol = 1e-12) const;
  // Same law shifted to mean 0 (median 0 for Cauchy).
  Distribution centered() const;

  // constant: {value}; uniform: {lo, hi}; normal: {mean, sd};
  // cauchy: {location, scale}; discrete: empty.
  const std::vector<double>& params() const noexcept { return params_; }
  // Discrete support (sorted, merged) and probabilities.
  const std::vector<double>& support() const noexcept { return values_; }
  const std::vector<double>& probabilities() const noexcept { return probs_; }

 private:
  Distribution() = default;

  Kind kind_ = Kind::constant;
  std::vector<double> params_;
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

}  // namespace fmoment
