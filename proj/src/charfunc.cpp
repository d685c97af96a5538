#include "fmoment/charfunc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fmoment/quadrature.hpp"

namespace fmoment {

double default_p_prime(double p, double B, double C) {
  if (B == 0.0 || C == 0.0) return p;
  return std::min((p + 2.0) / 2.0, p + 0.2);
}

double certified_k0(double beta, double gap) {
  if (!(gap > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("certified_k0: need beta > 0 and gap > 0");
  }
  const double monotone_from = 1.0 / gap - 1.0 / beta;
  for (int k = 1; k <= 1000; ++k) {
    const double lnK = k * std::numbers::ln2;
    if (lnK < monotone_from) continue;
    if (1.0 + beta * lnK <= std::exp(gap * lnK)) return std::ldexp(1.0, k);
  }
  throw std::invalid_argument("certified_k0: no threshold below 2^1000");
}

CharFn CharFn::family(const CharFnParams& in) {
  const auto bad = [](const char* msg) { throw std::invalid_argument(msg); };
  if (!(in.p >= 1.0 && in.p < 2.0)) bad("CharFn: p must lie in [1, 2)");
  if (!(in.A > 0.0) || !std::isfinite(in.A)) bad("CharFn: A must be > 0");
  if (!(in.B >= 0.0) || !std::isfinite(in.B)) bad("CharFn: B must be >= 0");
  if (!(in.C >= 0.0) || !std::isfinite(in.C)) bad("CharFn: C must be >= 0");
  CharFn f;
  f.p_ = in.p;
  f.A_ = in.A;
  f.B_ = in.B;
  f.C_ = in.C;
  f.p_prime_ = in.p_prime.value_or(default_p_prime(in.p, in.B, in.C));
  if (!(f.p_prime_ >= f.p_ && f.p_prime_ < 2.0)) bad("CharFn: p' must lie in [p, 2)");
  const bool log_term = in.B > 0.0 && in.C > 0.0;
  if (in.K0) {
    f.K0_ = *in.K0;
  } else if (log_term && f.p_prime_ > f.p_) {
    f.K0_ = certified_k0(in.B / in.A, f.p_prime_ - f.p_);
  } else {
    f.K0_ = 2.0;
  }
  if (!(f.K0_ >= 2.0) || !std::isfinite(f.K0_)) bad("CharFn: K0 must be >= 2");
  f.label_ = "family";
  return f;
}

CharFn CharFn::power(double p, double A) {
  CharFnParams params;
  params.p = p;
  params.A = A;
  return family(params);
}

CharFn CharFn::custom(std::function<double(double)> fn, double p,
                      double p_prime, double K0, std::string label) {
  if (!fn) throw std::invalid_argument("CharFn::custom: empty callable");
  if (!(p >= 1.0 && p < 2.0) || !(p_prime >= p && p_prime < 2.0) || !(K0 >= 2.0)) {
    throw std::invalid_argument("CharFn::custom: need 1 <= p <= p' < 2 and K0 >= 2");
  }
  CharFn f;
  f.p_ = p;
  f.p_prime_ = p_prime;
  f.K0_ = K0;
  f.custom_ = std::move(fn);
  f.label_ = std::move(label);
  if (std::abs(f.custom_(0.0)) > 0.0) {
    throw std::invalid_argument("CharFn::custom: f(0) must be 0");
  }
  const auto xs = default_x_grid();
  const auto ks = default_k_grid(K0);
  const FcondReport report = verify_fcond(f, xs, ks);
  if (!report.ok()) {
    throw std::invalid_argument("CharFn::custom: characterizing-function conditions fail on the verification grid");
  }
  return f;
}

double CharFn::raw(double ax) const {
  if (custom_) return custom_(ax);
  if (ax == 0.0) return 0.0;
  const double base = p_ == 1.0 ? ax : std::pow(ax, p_);
  if (B_ == 0.0 || C_ == 0.0) return A_ * base;
  return base * (A_ + B_ * std::log1p(C_ * ax));
}

double CharFn::operator()(double x) const {
  if (!std::isfinite(x)) throw std::invalid_argument("CharFn: non-finite argument");
  return raw(std::abs(x));
}

double CharFn::derivative(double x) const {
  if (custom_) throw std::logic_error("CharFn: derivative unavailable for custom f");
  const double ax = std::abs(x);
  double d;
  if (ax == 0.0) {
    d = p_ == 1.0 ? A_ : 0.0;
  } else {
    const double lg = (B_ == 0.0 || C_ == 0.0) ? 0.0 : B_ * std::log1p(C_ * ax);
    d = p_ * std::pow(ax, p_ - 1.0) * (A_ + lg) +
        (B_ == 0.0 ? 0.0 : std::pow(ax, p_) * B_ * C_ / (1.0 + C_ * ax));
  }
  return x < 0.0 ? -d : d;
}

double CharFn::inverse(double y) const {
  if (!std::isfinite(y)) throw std::invalid_argument("CharFn::inverse: non-finite argument");
  if (y <= 0.0) return 0.0;
  if (!custom_ && (B_ == 0.0 || C_ == 0.0)) return std::pow(y / A_, 1.0 / p_);
  double lo = 0.0;
  double hi = 1.0;
  while (raw(hi) < y) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("CharFn::inverse: bracket overflow");
  }
  for (int i = 0; i < 2000 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (raw(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

CharFnParams CharFn::params() const {
  CharFnParams out;
  out.p = p_;
  out.A = A_;
  out.B = B_;
  out.C = C_;
  out.p_prime = p_prime_;
  out.K0 = K0_;
  return out;
}

double eval(const CharFn& f, double x) { return f(x); }

std::vector<double> default_x_grid() {
  std::vector<double> xs;
  for (int i = -60; i <= 30; ++i) xs.push_back(std::pow(10.0, i / 10.0));
  return xs;
}

std::vector<double> default_k_grid(double K0) {
  std::vector<double> ks;
  for (int j = 0; j <= 40; ++j) ks.push_back(K0 * std::exp2(j / 4.0));
  return ks;
}

FcondReport verify_fcond(const CharFn& f, std::span<const double> x_grid,
                         std::span<const double> K_grid, double tol) {
  if (x_grid.empty() || K_grid.empty()) {
    throw std::invalid_argument("verify_fcond: grids must be non-empty");
  }
  for (double x : x_grid) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("verify_fcond: x grid must be positive");
  }
  for (double K : K_grid) {
    if (!(K >= f.K0()) || !std::isfinite(K)) throw std::invalid_argument("verify_fcond: K grid entries must be >= K0");
  }
  FcondReport rep;
  rep.alpha = f.p_prime() * std::log2(f.K0());

  std::vector<double> pos(x_grid.begin(), x_grid.end());
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());

  if (f(0.0) != 0.0) ++rep.monotonicity_violations;
  double prev = 0.0;
  for (double x : pos) {
    const double fx = f(x);
    if (!(fx > prev)) ++rep.monotonicity_violations;
    prev = fx;
    if (std::abs(f(-x) - fx) > tol * std::max(1.0, fx)) ++rep.symmetry_violations;
  }

  std::vector<double> sym;
  sym.reserve(2 * pos.size() + 1);
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) sym.push_back(-*it);
  sym.push_back(0.0);
  sym.insert(sym.end(), pos.begin(), pos.end());
  std::vector<double> fs(sym.size());
  for (std::size_t i = 0; i < sym.size(); ++i) fs[i] = f(sym[i]);
  for (std::size_t i = 0; i < sym.size(); ++i) {
    for (std::size_t j = i + 1; j < sym.size(); ++j) {
      const double chord = 0.5 * (fs[i] + fs[j]);
      const double mid = f(0.5 * (sym[i] + sym[j]));
      if (mid > chord + tol * std::max(1.0, chord)) ++rep.convexity_violations;
    }
  }

  for (double x : pos) {
    const double fx = f(x);
    for (double K : K_grid) {
      const double bound = std::pow(K, f.p_prime()) * fx;
      const double fkx = f(K * x);
      rep.worst_growth_ratio = std::max(rep.worst_growth_ratio, fkx / bound);
      if (fkx > bound * (1.0 + tol)) ++rep.growth_violations;
    }
  }
  return rep;
}

double psi(const CharFn& f, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("psi: need finite x >= 0");
  if (x == 0.0) return 0.0;
  const double kink = 0.0;
  return gaussian_expectation([&](double w) { return f(x * w); }, {&kink, 1}).value;
}

double psi_derivative(const CharFn& f, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("psi_derivative: need finite x >= 0");
  const double kink = 0.0;
  return gaussian_expectation([&](double w) { return w * f.derivative(x * w); },
                              {&kink, 1})
      .value;
}

double psi_inverse(const CharFn& f, double y) {
  if (!std::isfinite(y)) throw std::invalid_argument("psi_inverse: non-finite argument");
  if (y < 0.0) throw std::invalid_argument("psi_inverse: need y >= 0");
  if (y == 0.0) return 0.0;
  // Newton usually lands far inside the contract 1e-10 max(1, y); aim tight
  // and fall back to the contract once the bracket is exhausted.
  const double contract = 1e-10 * std::max(1.0, y);
  const double target = 1e-14 * std::max(1.0, y);
  double lo = 0.0;
  double hi = 1.0;
  while (psi(f, hi) < y) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("psi_inverse: bracket overflow");
  }
  double x = 0.5 * (lo + hi);
  double best = x;
  double best_residual = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 400; ++iter) {
    const double v = psi(f, x) - y;
    if (std::abs(v) < best_residual) best_residual = std::abs(v), best = x;
    if (best_residual <= target) return best;
    (v < 0.0 ? lo : hi) = x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    double next = 0.5 * (lo + hi);
    if (f.has_derivative()) {
      const double d = psi_derivative(f, x);
      const double newton = x - v / d;
      if (d > 0.0 && newton > lo && newton < hi) next = newton;
    }
    x = next;
  }
  if (best_residual <= contract) return best;
  char msg[96];
  std::snprintf(msg, sizeof msg, "psi_inverse: tolerance not reached; residual %.3g", best_residual);
  throw std::runtime_error(msg);
}

double g_shift(const CharFn& f, double y) {
  return gaussian_shift_moment(f, 1.0, y);
}

double gaussian_shift_moment(const CharFn& f, double scale, double shift) {
  if (!std::isfinite(scale) || !std::isfinite(shift)) {
    throw std::invalid_argument("gaussian_shift_moment: non-finite argument");
  }
  if (scale == 0.0) return f(shift);
  const double s = std::abs(scale);
  const double kink = -shift / s;
  return gaussian_expectation([&](double w) { return f(s * w + shift); },
                              {&kink, 1})
      .value;
}

}  // namespace fmoment
