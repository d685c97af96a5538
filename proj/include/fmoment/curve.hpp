#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fmoment {

// Real function of time used for variance functions, drifts and the
// monotone functions of the Vitali bench. Presets are serializable; custom
// callables are not.
class Curve {
 public:
  enum class Kind { zero, linear, power, polynomial, step, custom };

  Curve() = default;
  static Curve zero() { return {}; }
  static Curve linear(double slope);
  // scale * t^exponent for t >= 0
  static Curve power(double scale, double exponent);
  // sum_i coeffs[i] * t^i
  static Curve polynomial(std::vector<double> coeffs);
  // height * 1{t >= at}
  static Curve step(double at, double height);
  static Curve custom(std::function<double(double)> fn,
                      std::string label = "custom");

  double operator()(double t) const;

  Kind kind() const noexcept { return kind_; }
  std::string kind_name() const;
  const std::vector<double>& params() const noexcept { return params_; }
  const std::string& label() const noexcept { return label_; }

  // zero or linear
  bool is_linear() const noexcept;
  double slope() const;
  bool is_identically_zero() const noexcept;

 private:
  Kind kind_ = Kind::zero;
  std::vector<double> params_;
  std::function<double(double)> fn_;
  std::string label_;
};

}  // namespace fmoment
