#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fmoment {

// Parameters of f(x) = |x|^p (A + B ln(1 + C|x|)).
struct CharFnParams {
  double p = 1.0;
  double A = 1.0;
  double B = 0.0;
  double C = 0.0;
  // Exponent p' in f(Kx) <= K^p' f(x); defaulted when absent.
  std::optional<double> p_prime;
  // Threshold K0 >= 2 above which the growth bound holds; defaulted when absent.
  std::optional<double> K0;
};

// Symmetric convex characterizing function with f(0) = 0, strictly
// increasing on the positive half-line and f(Kx) <= K^p' f(x) for K >= K0.
class CharFn {
 public:
  // Logarithmic power family. Throws std::invalid_argument on parameters
  // outside p in [1,2), A > 0, B, C >= 0, p <= p' < 2, K0 >= 2.
  static CharFn family(const CharFnParams& params);
  static CharFn power(double p, double A = 1.0);
  static CharFn abs() { return power(1.0); }

  // User-supplied f (given on x >= 0 and extended symmetrically). The growth
  // and convexity conditions are verified on the default grids at
  // construction; a violation throws std::invalid_argument.
  static CharFn custom(std::function<double(double)> f, double p, double p_prime,
                       double K0, std::string label = "custom");

  double operator()(double x) const;
  // f'(x) for x > 0 (right derivative at 0). Family only.
  double derivative(double x) const;
  bool has_derivative() const noexcept { return !custom_; }
  // Inverse of f restricted to [0, inf).
  double inverse(double y) const;

  double p() const noexcept { return p_; }
  double A() const noexcept { return A_; }
  double B() const noexcept { return B_; }
  double C() const noexcept { return C_; }
  double p_prime() const noexcept { return p_prime_; }
  double K0() const noexcept { return K0_; }
  bool is_family() const noexcept { return !custom_; }
  const std::string& label() const noexcept { return label_; }
  CharFnParams params() const;

 private:
  CharFn() = default;
  double raw(double ax) const;

  double p_ = 1.0, A_ = 1.0, B_ = 0.0, C_ = 0.0;
  double p_prime_ = 1.0, K0_ = 2.0;
  std::function<double(double)> custom_;
  std::string label_;
};

double eval(const CharFn& f, double x);

// Default growth exponent: p when the log term vanishes, otherwise
// min((p+2)/2, p+0.2).
double default_p_prime(double p, double B, double C);

// Smallest power of two K0 >= 2 for which the growth bound provably holds
// for the logarithmic family with ratio beta = B/A and gap d = p' - p > 0:
// 1 + beta ln K <= K^d at K0 and K^d / (1 + beta ln K) increasing after.
double certified_k0(double beta, double gap);

struct FcondReport {
  std::size_t convexity_violations = 0;
  std::size_t monotonicity_violations = 0;
  std::size_t symmetry_violations = 0;
  std::size_t growth_violations = 0;
  double worst_growth_ratio = 0.0;  // max f(Kx) / (K^p' f(x))
  double alpha = 0.0;               // p' log2(K0)
  bool ok() const noexcept {
    return convexity_violations == 0 && monotonicity_violations == 0 &&
           symmetry_violations == 0 && growth_violations == 0;
  }
};

// Grid check of the characterizing-function conditions. x_grid must be
// positive; every K must be >= f.K0().
FcondReport verify_fcond(const CharFn& f, std::span<const double> x_grid,
                         std::span<const double> K_grid, double tol = 1e-12);

std::vector<double> default_x_grid();
std::vector<double> default_k_grid(double K0);

// Psi(x) = E f(xW), W standard normal.
double psi(const CharFn& f, double x);
double psi_derivative(const CharFn& f, double x);
// x >= 0 with |Psi(x) - y| <= 1e-10 max(1, y).
double psi_inverse(const CharFn& f, double y);
// G(y) = E f(W + y)
double g_shift(const CharFn& f, double y);
// E f(scale W + shift)
double gaussian_shift_moment(const CharFn& f, double scale, double shift);

}  // namespace fmoment
