#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fmoment/levy.hpp"

using namespace fmoment;

namespace {

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

double var_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

double corr(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean_of(a), mb = mean_of(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// increments over given intervals sharing a replicate index
std::vector<std::vector<double>> joint_increments(const ProcessSpec& s,
                                                  const std::vector<double>& grid,
                                                  std::size_t n, SeedSpec seed) {
  std::vector<std::vector<double>> out(grid.size(), std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto p = sample_path(s, grid, seed, r);
    for (std::size_t k = 0; k < grid.size(); ++k)
      out[k][r] = p.values[k] - (k ? p.values[k - 1] : 0.0);
  }
  return out;
}

}  // namespace

TEST_SUITE("levy") {

TEST_CASE("brownian examples") {
  const auto s = brownian(1.0);
  CHECK(s.is_homogeneous());
  const auto inc = sample_increments(s, 0.0, 0.25, 100000, {1, 0});
  CHECK(std::abs(var_of(inc) / 0.25 - 1.0) < 0.02);
  CHECK(ks_distance(EmpiricalSample(inc), [](double x) { return normal_cdf(x / 0.5); }) < 1.36 * 1.5 / std::sqrt(1e5));
  CHECK(std::abs(var_of(sample_increments(brownian(2.0), 0.0, 1.0, 100000, {2, 0})) - 4.0) < 0.08);
  CHECK(std::abs(mean_of(sample_increments(brownian(1.0, 3.0), 0.0, 1.0, 100000, {3, 0})) - 3.0) < 0.02);
}

TEST_CASE("compound poisson examples") {
  const auto s = compound_poisson(1.0, Distribution::constant(1.0));
  const auto x1 = sample_increments(s, 0.0, 1.0, 100000, {4, 0});
  CHECK(std::abs(mean_of(x1) - 1.0) < 4 * std::sqrt(1.0 / 1e5));
  for (double v : x1) REQUIRE(v == std::floor(v));
  const auto s2 = compound_poisson(2.0, Distribution::constant(1.0));
  CHECK(std::abs(mean_of(sample_increments(s2, 0.2, 0.5, 100000, {5, 0})) - 1.0) < 0.02);
  const double h = 0.01;
  const auto xh = sample_increments(s, 0.3, h, 200000, {6, 0});
  double m = 0;
  for (double v : xh) m += std::abs(v) / std::sqrt(h);
  m /= xh.size();
  CHECK(std::abs(m - std::sqrt(h)) < 4.0 / std::sqrt(2e5));
}

TEST_CASE("poisson inversion matches the pmf") {
  for (double mean : {0.01, 1.0, 7.5, 120.0}) {
    std::vector<double> draws;
    for (int i = 0; i < 50000; ++i) {
      CounterRng r({8, 0}, i);
      draws.push_back(double(poisson_from_uniform(mean, r.uniform())));
    }
    CHECK(std::abs(mean_of(draws) - mean) < 5 * std::sqrt(mean / 5e4));
    CHECK(std::abs(var_of(draws) / mean - 1.0) < 0.05);
  }
  CHECK(poisson_from_uniform(0.0, 0.7) == 0);
  CHECK(poisson_from_uniform(1.0, 1e-300) == 0);
}

TEST_CASE("fixed jumps are included in the right interval") {
  ProcessSpec s;
  s.fixed_jumps.push_back({0.5, Distribution::constant(5.0)});
  s.validate();
  const auto a = sample_increments(s, 0.4, 0.2, 1000, {9, 0});
  const auto b = sample_increments(s, 0.6, 0.2, 1000, {9, 1});
  CHECK(mean_of(a) - mean_of(b) == doctest::Approx(5.0));
  // right-closed intervals: the jump at 0.5 is in (0.3, 0.5] but not (0.5, 0.7]
  CHECK(mean_of(sample_increments(s, 0.3, 0.2, 100, {9, 2})) == 5.0);
  CHECK(mean_of(sample_increments(s, 0.5, 0.2, 100, {9, 3})) == 0.0);
  CHECK_FALSE(s.is_homogeneous());
}

TEST_CASE("additivity of increments") {
  const auto s = with_compound_poisson(brownian(1.0, 0.5), 2.0, Distribution::normal(0.3, 1.0));
  const auto joint = joint_increments(s, {0.3, 1.0}, 100000, {10, 0});
  std::vector<double> sum(100000);
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = joint[0][i] + joint[1][i];
  const auto whole = sample_increments(s, 0.0, 1.0, 100000, {10, 1});
  CHECK(two_sample_ks(sum, whole) < 0.01);
}

TEST_CASE("independent increments over disjoint intervals") {
  const auto s = with_compound_poisson(brownian(1.0), 3.0, Distribution::uniform(-1.0, 2.0));
  const auto joint = joint_increments(s, {0.2, 0.5, 0.55, 1.0}, 100000, {11, 0});
  for (std::size_t a = 0; a < joint.size(); ++a)
    for (std::size_t b = a + 1; b < joint.size(); ++b)
      CHECK(std::abs(corr(joint[a], joint[b])) < 3.0 / std::sqrt(1e5));
}

TEST_CASE("non-homogeneous gaussian component") {
  ProcessSpec s;
  s.variance_fn = Curve::power(2.0, 2.0);
  s.drift = Curve::polynomial({0.0, 1.0, -0.5});
  s.validate();
  CHECK_FALSE(s.is_homogeneous());
  const double sc = 0.3, h = 0.4;
  const double mu = s.drift(sc + h) - s.drift(sc);
  const double sd = std::sqrt(s.variance_fn(sc + h) - s.variance_fn(sc));
  const auto inc = sample_increments(s, sc, h, 100000, {12, 0});
  CHECK(ks_distance(EmpiricalSample(inc), [&](double x) { return normal_cdf((x - mu) / sd); }) <
        1.36 * 1.5 / std::sqrt(1e5));
}

TEST_CASE("spec validation") {
  ProcessSpec s;
  s.variance_fn = Curve::polynomial({0.0, 1.0, -1.0});  // decreasing after 1/2
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = ProcessSpec{};
  s.variance_fn = Curve::polynomial({0.1, 1.0});
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = ProcessSpec{};
  s.drift = Curve::polynomial({1.0});
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = ProcessSpec{};
  s.fixed_jumps = {{0.6, Distribution::constant(1.0)}, {0.4, Distribution::constant(1.0)}};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.fixed_jumps = {{0.0, Distribution::constant(1.0)}};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = ProcessSpec{};
  s.jump_rate = -1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  CounterRng r(1);
  CHECK_THROWS_AS(sample_increment(brownian(1.0), 0.8, 0.3, r), std::out_of_range);
  CHECK_THROWS_AS(sample_increment(brownian(1.0), -0.1, 0.3, r), std::out_of_range);
}

TEST_CASE("sample_path examples") {
  const std::vector<double> one{1.0};
  const auto p = sample_path(brownian(1.0), one, {13, 0});
  REQUIRE(p.values.size() == 1);
  CHECK(std::isfinite(p.values[0]));
  ProcessSpec det;
  det.drift = Curve::linear(1.0);
  const std::vector<double> grid{0.1, 0.25, 0.5, 0.9, 1.0};
  const auto q = sample_path(det, grid, {13, 1});
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(q.values[i] == doctest::Approx(grid[i]).epsilon(1e-14));
  std::vector<double> fine;
  for (int i = 1; i <= 100; ++i) fine.push_back(i / 100.0);
  const auto pois = compound_poisson(1.0, Distribution::constant(1.0));
  for (std::uint64_t r = 0; r < 200; ++r) {
    const auto path = sample_path(pois, fine, {13, 2}, r);
    REQUIRE(std::is_sorted(path.values.begin(), path.values.end()));
  }
  const std::vector<double> bad{0.5, 0.3};
  CHECK_THROWS(sample_path(pois, bad, {13, 3}));
}

TEST_CASE("small jump variance") {
  const auto unit = compound_poisson(1.0, Distribution::constant(1.0));
  CHECK(small_jump_variance(unit, 1.0, 0.5) == 0.0);
  CHECK(small_jump_variance(unit, 1.0, 2.0) == doctest::Approx(1.0));
  const auto uni = compound_poisson(1.0, Distribution::uniform(0.0, 1.0));
  CHECK(small_jump_variance(uni, 1.0, 0.5) == doctest::Approx(1.0 / 24.0).epsilon(1e-12));
  const auto mix = compound_poisson(2.5, Distribution::discrete({-3.0, 0.2, 0.7}, {0.2, 0.5, 0.3}));
  double prev = -1.0;
  for (double a : {1e-9, 0.1, 0.19, 0.2, 0.5, 0.7, 1.0, 3.0, 10.0}) {
    const double v = small_jump_variance(mix, 1.0, a);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(small_jump_variance(mix, 1.0, 0.19) == 0.0);
  prev = -1.0;
  for (double t : {0.0, 0.3, 0.6, 1.0}) {
    const double v = small_jump_variance(mix, t, 1.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("counterexample construction") {
  std::vector<double> t;
  for (int n = 1; n <= 10; ++n) t.push_back(std::pow(4.0, -n));
  const auto ce = counterexample(CharFn::abs(), t);
  CHECK(ce.b() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(ce.calibrated_moment() - 1.0) <= 1e-8);
  for (std::size_t n = 0; n < t.size(); ++n) CHECK(ce.k_values()[n] == std::sqrt(t[n]));
  CHECK(ce.k_at(1.0) == 0.0);
  CHECK_THROWS_AS(ce.k_at(0.3), std::domain_error);
  CounterRng r(5);
  CHECK_THROWS_AS(ce.sample_at(0.3, r), std::domain_error);
  CHECK_THROWS(counterexample(CharFn::abs(), {0.5, 0.7}));

  const auto f = CharFn::family({1.5, 1.0, 0.5, 2.0, {}, {}});
  const auto cf = counterexample(f, t);
  CHECK(std::abs(poisson_moment(f, cf.b()) - 1.0) <= 1e-8);
  for (std::size_t n = 0; n < t.size(); ++n) CHECK(cf.k_values()[n] == f.inverse(1.0) * std::sqrt(t[n]));
}

TEST_CASE("poisson moment series against a direct sum") {
  const auto f = CharFn::power(1.3);
  double want = 0.0, pk = std::exp(-1.0);
  for (int k = 0; k < 60; ++k) {
    want += pk * f(0.7 * k);
    pk /= (k + 1);
  }
  CHECK(poisson_moment(f, 0.7) == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("counterexample marginal is far from every normal") {
  const auto ce = counterexample(CharFn::abs(), {0.25, 1.0 / 16});
  const auto x1 = EmpiricalSample::draw([&](CounterRng& r) { return ce.sample_at(1.0, r); }, 100000, {14, 0});
  const auto fit = min_normal_ks(x1);
  CHECK(fit.atom_lower_bound > 0.1);
  CHECK(fit.best_search > 0.1);
}

TEST_CASE("sampling is thread-count invariant") {
  const auto s = with_compound_poisson(brownian(0.7), 4.0, Distribution::cauchy(0.0, 1.0));
  const auto a = sample_increments(s, 0.1, 0.3, 20001, {15, 0}, {1});
  CHECK(a == sample_increments(s, 0.1, 0.3, 20001, {15, 0}, {4}));
  CHECK(a == sample_increments(s, 0.1, 0.3, 20001, {15, 0}, {8}));
}

}
