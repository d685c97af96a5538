#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace fmoment {

struct QuadratureResult {
  double value = 0.0;
  double achieved_rel_change = 0.0;
  int nodes = 0;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

// Tanh-sinh rule on [a, b]; the step is halved (node count doubled) until
// successive sums agree within rel_tol. Endpoint kinks and algebraic
// singularities do not slow convergence.
QuadratureResult tanh_sinh(const std::function<double(double)>& g, double a,
                           double b, double rel_tol = 1e-10);

// E g(W) for W standard normal. `kinks` lists points where g is not smooth;
// the line is split there. Mass beyond |w| = 12 is below 1e-32 and dropped.
QuadratureResult gaussian_expectation(const std::function<double(double)>& g,
                                      std::span<const double> kinks,
                                      double rel_tol = 1e-10);

}  // namespace fmoment
