#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fmoment/charfunc.hpp"
#include "fmoment/curve.hpp"
#include "fmoment/distribution.hpp"

namespace fmoment {

// (X_k, I_{B_k}) with B_k independent of X_k and P(B_k) = p.
struct IndicatorPair {
  Distribution x = Distribution::constant(0.0);
  double p = 0.0;
};

struct IndicatorPairFamily {
  std::vector<IndicatorPair> pairs;
  double A_bound = 1.0;
  std::string label;
  // X_k discrete (or constant), p_k in [0, 1], sum p_k <= A_bound.
  void validate() const;
};

// middle is the sandwiched quantity; lower_sum/upper_sum the comparison
// sides; ratios are middle/side (NaN when the side is 0).
struct SandwichResult {
  double lower_sum = 0.0;
  double middle = 0.0;
  double upper_sum = 0.0;
  double ratio_low = 0.0;
  double ratio_high = 0.0;
};

using Gauge = std::function<double(double)>;

// Both sides of the Klass-Nowicki sandwich by exact enumeration of the law
// of sum X_k I_{B_k}. Throws std::length_error when the enumeration would
// exceed the state cap (use klass_nowicki_mc then).
SandwichResult klass_nowicki_exact(const Gauge& H,
                                   const IndicatorPairFamily& family);
SandwichResult klass_nowicki_mc(const Gauge& H,
                                const IndicatorPairFamily& family,
                                std::size_t n, const SeedSpec& seed);

// Fixed family of 50 instances, at most 12 pairs with at most 4 support
// points each, A_bound = 2.
std::vector<IndicatorPairFamily> builtin_kn_family();

struct FamilyRatioSummary {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::size_t instances = 0;
  bool within(double lo, double hi) const noexcept {
    return min_ratio >= lo && max_ratio <= hi;
  }
};
FamilyRatioSummary kn_family_ratios(const Gauge& H,
                                    std::span<const IndicatorPairFamily> family);

// E f(sum xi_k 1{|xi_k|>1}) against E f((sum xi_k^2 1{|xi_k|>1})^{1/2}).
// Each xi_k must be symmetric.
SandwichResult burkholder_check(std::span<const Distribution> jumps,
                                const CharFn& f);

struct GLemmaResult {
  double lhs = 0.0;  // E f(X)
  double mid = 0.0;  // E f(X - Y)
  bool left_holds = true;
  std::optional<double> realized_C1;  // mid / lhs, absent when lhs = 0
};
// X must be centred within 1e-12.
GLemmaResult glemma_d_check(const Distribution& x, const CharFn& f);

struct VitaliResult {
  double measure_estimate = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  bool holds = true;
  int min_scale = 8;
  int max_scale = 16;
};

// Share of s_i = (i + 1/2)/resolution with max_j |F(s+h_j) - F(s)|/h_j >= K,
// h_j = 2^-j for j in [8, 16] (backward quotient when s + h > 1). The
// tolerance is 2^-8 + 1/resolution. F must be non-decreasing.
VitaliResult vitali_bound_check(const Curve& F, double K, int resolution);

struct DriftProfile {
  std::vector<double> s_grid;
  std::vector<double> minima;  // min_j |c(s+h_j) - c(s)| / sqrt(h_j)
  double threshold = 0.01;
  double fraction_below = 0.0;
};
DriftProfile drift_liminf_profile(const Curve& c, std::span<const double> s_grid,
                                  std::span<const double> h_ladder,
                                  double threshold = 0.01);

}  // namespace fmoment
