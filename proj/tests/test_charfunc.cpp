#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fmoment/charfunc.hpp"
#include "fmoment/clt.hpp"
#include "fmoment/mc.hpp"
#include "fmoment/quadrature.hpp"

using namespace fmoment;

namespace {

// independent oracle: 2 * int_0^inf g(w) phi(w) dw by adaptive Gauss-Kronrod
double oracle_even(const std::function<double(double)>& g) {
  const auto h = [&](double w) { return g(w) * std::exp(-0.5 * w * w) / std::sqrt(2 * std::numbers::pi); };
  return 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                   h, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-13);
}

double oracle_shift(const CharFn& f, double y) {
  const auto h = [&](double w) {
    return f(w + y) * std::exp(-0.5 * w * w) / std::sqrt(2 * std::numbers::pi);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double inf = std::numeric_limits<double>::infinity();
  return GK::integrate(h, -inf, -y, 15, 1e-13) + GK::integrate(h, -y, inf, 15, 1e-13);
}

CharFn random_f(CounterRng& r) {
  CharFnParams q;
  q.p = 1.0 + 0.9 * r.uniform();
  q.A = 0.5 + 1.5 * r.uniform();
  q.B = r.uniform() < 0.25 ? 0.0 : 2.0 * r.uniform();
  q.C = 3.0 * r.uniform();
  return CharFn::family(q);
}

}  // namespace

TEST_SUITE("charfunc") {

TEST_CASE("eval examples") {
  CHECK(eval(CharFn::abs(), 3.0) == 3.0);
  CHECK(eval(CharFn::power(1.5), 4.0) == doctest::Approx(8.0).epsilon(1e-15));
  const auto f = CharFn::family({1.0, 1.0, 1.0, 1.0, {}, {}});
  CHECK(eval(f, 1.0) == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-15));
  CHECK(eval(f, -2.5) == eval(f, 2.5));
  CHECK(eval(f, 0.0) == 0.0);
  CHECK_THROWS_AS(eval(f, std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(CharFn::family({2.0, 1.0, 0.0, 0.0, {}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(CharFn::family({0.9, 1.0, 0.0, 0.0, {}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(CharFn::family({1.0, 0.0, 0.0, 0.0, {}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(CharFn::family({1.0, 1.0, -1.0, 0.0, {}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(CharFn::family({1.5, 1.0, 0.0, 0.0, 1.4, {}}), std::invalid_argument);
  CHECK_THROWS_AS(CharFn::family({1.5, 1.0, 0.0, 0.0, {}, 1.5}), std::invalid_argument);
}

TEST_CASE("default growth exponent") {
  CHECK(default_p_prime(1.3, 0.0, 0.0) == 1.3);
  CHECK(default_p_prime(1.0, 1.0, 1.0) == doctest::Approx(1.2));
  CHECK(default_p_prime(1.9, 1.0, 1.0) == doctest::Approx(1.95));
}

TEST_CASE("verify_fcond examples") {
  const auto pure = CharFn::family({1.3, 1.0, 0.0, 0.0, 1.3, {}});
  const auto r1 = verify_fcond(pure, default_x_grid(), default_k_grid(pure.K0()));
  CHECK(r1.ok());
  CHECK(r1.worst_growth_ratio <= 1.0 + 1e-12);

  const auto logf = CharFn::family({1.0, 1.0, 1.0, 1.0, 1.4, 4.0});
  std::vector<double> xs, ks;
  for (int i = 0; i <= 200; ++i) xs.push_back(std::pow(10.0, -3.0 + 6.0 * i / 200));
  for (int i = 0; i <= 100; ++i) ks.push_back(4.0 * std::pow(250.0, i / 100.0));
  CHECK(verify_fcond(logf, xs, ks).ok());
  CHECK(verify_fcond(logf, xs, ks).alpha == doctest::Approx(2.8));

  const auto broken = CharFn::family({1.0, 1.0, 1.0, 1.0, 1.0, {}});
  CHECK(verify_fcond(broken, default_x_grid(), default_k_grid(2.0)).growth_violations > 0);
  CHECK_THROWS(verify_fcond(logf, xs, std::vector<double>{2.0}));
}

TEST_CASE("certified K0 really works for random valid parameters") {
  CounterRng r(0xc0ffee);
  for (int i = 0; i < 40; ++i) {
    const auto f = random_f(r);
    const auto rep = verify_fcond(f, default_x_grid(), default_k_grid(f.K0()));
    INFO("p=" << f.p() << " B=" << f.B() << " C=" << f.C() << " K0=" << f.K0());
    CHECK(rep.ok());
  }
}

TEST_CASE("psi against closed forms and an independent quadrature") {
  CHECK(psi(CharFn::abs(), 2.0) == doctest::Approx(2.0 * std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-12));
  CHECK(psi(CharFn::abs(), 2.0) == doctest::Approx(1.5958).epsilon(1e-4));
  CHECK(psi(CharFn::power(1.5), 0.0) == 0.0);
  const double m15 = std::pow(2.0, 0.75) * std::tgamma(1.25) / std::sqrt(std::numbers::pi);
  CHECK(psi(CharFn::power(1.5), 1.0) == doctest::Approx(m15).epsilon(1e-12));
  CHECK(psi(CharFn::power(1.5), 1.0) == doctest::Approx(0.8600).epsilon(1e-4));

  CounterRng r(17);
  for (int i = 0; i < 10; ++i) {
    const auto f = random_f(r);
    for (double x : {0.01, 0.5, 1.0, 3.0, 40.0}) {
      const double want = oracle_even([&](double w) { return f(x * w); });
      CHECK(psi(f, x) == doctest::Approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("psi derivative matches a central difference") {
  const auto f = CharFn::family({1.2, 1.0, 0.7, 2.0, {}, {}});
  for (double x : {0.3, 1.0, 2.5}) {
    const double h = 1e-5;
    CHECK(psi_derivative(f, x) == doctest::Approx((psi(f, x + h) - psi(f, x - h)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("psi_inverse examples and roundtrip") {
  CHECK(psi_inverse(CharFn::abs(), std::sqrt(2.0 / std::numbers::pi)) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(psi_inverse(CharFn::abs(), 0.0) == 0.0);
  const auto f = CharFn::family({1.4, 2.0, 0.5, 1.0, {}, {}});
  CHECK(std::abs(psi_inverse(f, psi(f, 2.0)) - 2.0) < 1e-8);
  for (int i = 0; i <= 60; ++i) {
    const double y = std::pow(10.0, -3.0 + 6.0 * i / 60);
    CHECK(std::abs(psi(f, psi_inverse(f, y)) - y) <= 1e-8 * std::max(1.0, y));
  }
  CHECK_THROWS(psi_inverse(f, -1.0));
  CHECK_THROWS(psi_inverse(f, std::numeric_limits<double>::infinity()));
}

TEST_CASE("g_shift examples") {
  const auto f = CharFn::abs();
  CHECK(g_shift(f, 0.0) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-12));
  CHECK(g_shift(f, 1.7) == doctest::Approx(g_shift(f, -1.7)).epsilon(1e-13));
  const double exact = 3.0 * (2.0 * normal_cdf(3.0) - 1.0) + 2.0 * normal_pdf(3.0);
  CHECK(g_shift(f, 3.0) == doctest::Approx(exact).epsilon(1e-11));
  CHECK(std::abs(g_shift(f, 3.0) - 3.0) < 0.002);
  const auto h = CharFn::family({1.6, 1.0, 1.0, 0.5, {}, {}});
  for (double y : {-2.0, 0.3, 1.0, 5.0}) CHECK(g_shift(h, y) == doctest::Approx(oracle_shift(h, y)).epsilon(1e-10));
}

TEST_CASE("psi and g_shift are strictly increasing") {
  CounterRng r(99);
  for (int i = 0; i < 5; ++i) {
    const auto f = random_f(r);
    double prev_p = psi(f, 0.0), prev_g = g_shift(f, 0.0);
    for (int k = 1; k <= 40; ++k) {
      const double x = 0.05 * k * k;
      const double pv = psi(f, x), gv = g_shift(f, x);
      CHECK(pv > prev_p);
      CHECK(gv > prev_g);
      prev_p = pv;
      prev_g = gv;
    }
  }
}

TEST_CASE("growth triple on random f") {
  CounterRng r(2024);
  for (int i = 0; i < 20; ++i) {
    const auto f = random_f(r);
    const double alpha = verify_fcond(f, default_x_grid(), default_k_grid(f.K0())).alpha;
    const double c = std::exp2(alpha - 1.0);
    for (int k = 0; k < 200; ++k) {
      const double x = std::pow(10.0, -3 + 6 * r.uniform());
      const double y = std::pow(10.0, -3 + 6 * r.uniform());
      REQUIRE(f(x + y) <= c * (f(x) + f(y)) * (1 + 1e-12));
    }
    // C* found on a coarse grid, then confirmed on a finer and wider one
    double cstar = 1.0;
    for (int k = 0; k <= 60; ++k) {
      const double x = std::pow(10.0, -4.0 + 8.0 * k / 60);
      cstar = std::max(cstar, f(x) / (x + x * x));
      if (x > 1.0) cstar = std::max(cstar, x / f(x));
    }
    cstar *= 2.0;
    REQUIRE(std::isfinite(cstar));
    for (int k = 0; k <= 1000; ++k) {
      const double x = std::pow(10.0, -6.0 + 12.0 * k / 1000);
      CHECK(f(x) <= cstar * (x + x * x));
      if (x > 1.0) CHECK(f(x) >= x / cstar);
    }
  }
}

TEST_CASE("independent discrete shift never lowers the moment") {
  CounterRng r(31337);
  for (int i = 0; i < 8; ++i) {
    const auto f = random_f(r);
    const double x = 0.2 + 2.0 * r.uniform();
    const double base = gaussian_shift_moment(f, x, 0.0);
    CHECK(base == doctest::Approx(psi(f, x)).epsilon(1e-12));
    for (int k = 0; k < 6; ++k) {
      // Y on up to 3 points, at least one of them non-zero
      const int m = 1 + k % 3;
      std::vector<double> v(m), w(m);
      double tot = 0.0;
      for (int j = 0; j < m; ++j) {
        v[j] = j == 0 ? 0.1 + r.uniform() : 4.0 * r.uniform() - 2.0;
        w[j] = 0.1 + r.uniform();
        tot += w[j];
      }
      double shifted = 0.0;
      for (int j = 0; j < m; ++j) shifted += w[j] / tot * gaussian_shift_moment(f, x, v[j]);
      CHECK(shifted > base * (1 + 1e-9));
    }
  }
}

TEST_CASE("gaussian_abs_moment against quadrature") {
  for (double p : {1.0, 1.3, 1.5, 1.9}) {
    const double q = oracle_even([&](double w) { return std::pow(w, p); });
    CHECK(std::abs(gaussian_abs_moment(p) - std::pow(q, 1.0 / p)) <= 1e-10);
  }
}

TEST_CASE("tanh-sinh integrates endpoint singularities") {
  const auto r = tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-12);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
  const auto g = gaussian_expectation([](double w) { return std::abs(w - 0.5); }, std::vector<double>{0.5});
  const double exact = 0.5 * (2 * normal_cdf(0.5) - 1) + 2 * normal_pdf(0.5);
  CHECK(g.value == doctest::Approx(exact).epsilon(1e-11));
}

TEST_CASE("custom f is verified at construction") {
  const auto ok = CharFn::custom([](double x) { return x + std::pow(x, 1.5); }, 1.5, 1.5, 2.0);
  CHECK(ok(4.0) == doctest::Approx(12.0));
  CHECK(ok(-2.0) == ok(2.0));
  CHECK_THROWS_AS(CharFn::custom([](double x) { return x * x; }, 1.0, 1.5, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(CharFn::custom([](double x) { return std::sqrt(x); }, 1.0, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("inverse of f") {
  const auto f = CharFn::family({1.2, 1.5, 0.4, 2.0, {}, {}});
  for (double y : {0.0, 1e-6, 0.3, 1.0, 50.0, 1e5}) CHECK(f(f.inverse(y)) == doctest::Approx(y).epsilon(1e-12));
}

}
