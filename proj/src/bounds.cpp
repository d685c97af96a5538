#include "fmoment/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

namespace fmoment {

namespace {

// Joint outcome count above which enumeration is refused.
constexpr double kMaxOutcomes = 244140625.0;  // 5^12

struct Atom {
  double value;
  double prob;
};

std::vector<Atom> atoms(const Distribution& d) {
  std::vector<Atom> out;
  if (d.kind() == Distribution::Kind::constant) {
    out.push_back({d.params()[0], 1.0});
  } else if (d.kind() == Distribution::Kind::discrete) {
    for (std::size_t i = 0; i < d.support().size(); ++i) {
      out.push_back({d.support()[i], d.probabilities()[i]});
    }
  } else {
    throw std::invalid_argument("exact enumeration needs a discrete or constant distribution, got " + d.kind_name());
  }
  return out;
}

double ratio(double num, double den) {
  return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : num / den;
}

void check_outcomes(double outcomes) {
  if (outcomes > kMaxOutcomes) {
    throw std::length_error("exact enumeration state space exceeds 5^12 joint outcomes; use the Monte Carlo mode");
  }
}

// Exact paths accumulate in long double so the reported doubles are
// correctly rounded whatever the enumeration order.
using Acc = long double;

double kn_side(const Gauge& H, const IndicatorPairFamily& fam) {
  Acc side = 0.0L;
  for (const auto& pr : fam.pairs) {
    Acc e = 0.0L;
    for (const auto& a : atoms(pr.x)) e += Acc(a.prob) * H(a.value);
    side += Acc(pr.p) * e;
  }
  return static_cast<double>(side);
}

}  // namespace

void IndicatorPairFamily::validate() const {
  double total = 0.0;
  for (const auto& pr : pairs) {
    if (!(pr.p >= 0.0 && pr.p <= 1.0)) throw std::invalid_argument("IndicatorPairFamily: P(B_k) must lie in [0, 1]");
    atoms(pr.x);
    total += pr.p;
  }
  if (!(A_bound > 0.0)) throw std::invalid_argument("IndicatorPairFamily: A must be > 0");
  if (total > A_bound * (1.0 + 1e-12)) {
    throw std::invalid_argument("IndicatorPairFamily: sum of P(B_k) exceeds A");
  }
}

SandwichResult klass_nowicki_exact(const Gauge& H,
                                   const IndicatorPairFamily& family) {
  family.validate();
  double outcomes = 1.0;
  for (const auto& pr : family.pairs) outcomes *= static_cast<double>(atoms(pr.x).size() + 1);
  check_outcomes(outcomes);

  std::map<double, Acc> law{{0.0, 1.0L}};
  for (const auto& pr : family.pairs) {
    std::map<double, Acc> next;
    for (const auto& [v, q] : law) {
      next[v] += (1.0L - pr.p) * q;
      for (const auto& a : atoms(pr.x)) next[v + a.value] += Acc(pr.p) * a.prob * q;
    }
    law = std::move(next);
  }
  SandwichResult r;
  Acc middle = 0.0L;
  for (const auto& [v, q] : law) middle += q * H(v);
  r.middle = static_cast<double>(middle);
  r.lower_sum = r.upper_sum = kn_side(H, family);
  r.ratio_low = r.ratio_high = ratio(r.middle, r.lower_sum);
  return r;
}

SandwichResult klass_nowicki_mc(const Gauge& H,
                                const IndicatorPairFamily& family,
                                std::size_t n, const SeedSpec& seed) {
  family.validate();
  const auto est = estimate_expectation(
      [&](CounterRng& rng) {
        double s = 0.0;
        for (const auto& pr : family.pairs) {
          const double u = rng.uniform();
          const double x = pr.x.sample(rng);
          if (u < pr.p) s += x;
        }
        return H(s);
      },
      n, seed);
  SandwichResult r;
  r.middle = est.mean;
  r.lower_sum = r.upper_sum = kn_side(H, family);
  r.ratio_low = r.ratio_high = ratio(r.middle, r.lower_sum);
  return r;
}

std::vector<IndicatorPairFamily> builtin_kn_family() {
  std::vector<IndicatorPairFamily> fam;
  {
    IndicatorPairFamily one;
    one.pairs.push_back({Distribution::constant(1.0), 0.5});
    one.label = "single";
    fam.push_back(one);
    IndicatorPairFamily three;
    for (int k = 0; k < 3; ++k) three.pairs.push_back({Distribution::constant(1.0), 0.2});
    three.label = "binomial3";
    fam.push_back(three);
  }
  for (auto& f : fam) f.A_bound = 2.0;
  CounterRng rng(mix64(0x6b6e66616d696c79ULL));
  while (fam.size() < 50) {
    const std::size_t i = fam.size();
    IndicatorPairFamily inst;
    inst.A_bound = 2.0;
    inst.label = "random" + std::to_string(i);
    const std::size_t m = 1 + i % 12;
    std::vector<double> ps;
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t pts = 1 + rng.next_u64() % 4;
      std::vector<double> vals;
      std::vector<double> probs;
      double mass = 0.0;
      for (std::size_t j = 0; j < pts; ++j) {
        // nonzero multiples of 1/4 in [-4, 4]
        double v = static_cast<double>(1 + rng.next_u64() % 16) * 0.25;
        if (rng.uniform() < 0.5) v = -v;
        vals.push_back(v);
        probs.push_back(0.1 + rng.uniform());
        mass += probs.back();
      }
      for (auto& q : probs) q /= mass;
      double s = 0.0;
      for (double q : probs) s += q;
      probs.back() += 1.0 - s;
      inst.pairs.push_back({Distribution::discrete(vals, probs), 0.0});
      ps.push_back(0.05 + 0.95 * rng.uniform());
      total += ps.back();
    }
    const double scale = total > 2.0 ? 2.0 / total : 1.0;
    for (std::size_t k = 0; k < m; ++k) inst.pairs[k].p = ps[k] * scale * (scale < 1.0 ? 0.999 : 1.0);
    fam.push_back(std::move(inst));
  }
  return fam;
}

FamilyRatioSummary kn_family_ratios(const Gauge& H,
                                    std::span<const IndicatorPairFamily> family) {
  FamilyRatioSummary s;
  s.min_ratio = std::numeric_limits<double>::infinity();
  s.max_ratio = 0.0;
  for (const auto& inst : family) {
    const auto r = klass_nowicki_exact(H, inst);
    if (std::isnan(r.ratio_low)) continue;
    s.min_ratio = std::min(s.min_ratio, r.ratio_low);
    s.max_ratio = std::max(s.max_ratio, r.ratio_high);
    ++s.instances;
  }
  return s;
}

SandwichResult burkholder_check(std::span<const Distribution> jumps,
                                const CharFn& f) {
  double outcomes = 1.0;
  for (const auto& d : jumps) {
    if (!d.is_symmetric()) {
      throw std::invalid_argument("burkholder_check: jump distributions must be symmetric (symmetrize first)");
    }
    outcomes *= static_cast<double>(atoms(d).size());
  }
  check_outcomes(outcomes);
  std::map<std::pair<double, double>, Acc> law{{{0.0, 0.0}, 1.0L}};
  for (const auto& d : jumps) {
    std::map<std::pair<double, double>, Acc> next;
    for (const auto& [state, q] : law) {
      for (const auto& a : atoms(d)) {
        const double x = std::abs(a.value) > 1.0 ? a.value : 0.0;
        next[{state.first + x, state.second + x * x}] += q * a.prob;
      }
    }
    law = std::move(next);
  }
  SandwichResult r;
  Acc left = 0.0L, right = 0.0L;
  for (const auto& [state, q] : law) {
    left += q * f(state.first);
    right += q * f(std::sqrt(state.second));
  }
  r.middle = static_cast<double>(left);
  r.upper_sum = static_cast<double>(right);
  r.lower_sum = r.upper_sum;
  r.ratio_low = r.ratio_high = ratio(r.middle, r.upper_sum);
  return r;
}

GLemmaResult glemma_d_check(const Distribution& x, const CharFn& f) {
  const auto a = atoms(x);
  double mean = 0.0;
  for (const auto& t : a) mean += t.prob * t.value;
  if (std::abs(mean) > 1e-12) throw std::invalid_argument("glemma_d_check: distribution must be centred");
  GLemmaResult r;
  Acc lhs = 0.0L, mid = 0.0L;
  for (const auto& t : a) lhs += Acc(t.prob) * f(t.value);
  for (const auto& s : a) {
    for (const auto& t : a) mid += Acc(s.prob) * t.prob * f(s.value - t.value);
  }
  r.lhs = static_cast<double>(lhs);
  r.mid = static_cast<double>(mid);
  r.left_holds = r.lhs <= r.mid + 1e-12 * std::max(1.0, r.mid);
  if (r.lhs > 0.0) r.realized_C1 = r.mid / r.lhs;
  return r;
}

VitaliResult vitali_bound_check(const Curve& F, double K, int resolution) {
  if (!(K > 0.0)) throw std::invalid_argument("vitali_bound_check: K must be > 0");
  if (resolution < 1) throw std::invalid_argument("vitali_bound_check: resolution must be >= 1");
  const auto bad = [] { throw std::invalid_argument("vitali_bound_check: F must be non-decreasing"); };
  const int dense = 4 * resolution;
  double prev = F(0.0);
  for (int i = 1; i <= dense; ++i) {
    const double v = F(static_cast<double>(i) / dense);
    if (v < prev) bad();
    prev = v;
  }
  VitaliResult r;
  r.bound = (F(1.0) - F(0.0)) / K;
  r.tolerance = std::ldexp(1.0, -r.min_scale) + 1.0 / resolution;
  std::size_t hits = 0;
  for (int i = 0; i < resolution; ++i) {
    const double s = (i + 0.5) / resolution;
    double q = 0.0;
    for (int j = r.min_scale; j <= r.max_scale; ++j) {
      const double h = std::ldexp(1.0, -j);
      const double lo = s + h <= 1.0 ? s : s - h;
      const double d = F(lo + h) - F(lo);
      if (d < 0.0) bad();
      q = std::max(q, d / h);
    }
    hits += q >= K;
  }
  r.measure_estimate = static_cast<double>(hits) / resolution;
  r.holds = r.measure_estimate <= r.bound + r.tolerance;
  return r;
}

DriftProfile drift_liminf_profile(const Curve& c, std::span<const double> s_grid,
                                  std::span<const double> h_ladder,
                                  double threshold) {
  if (s_grid.empty() || h_ladder.empty()) throw std::invalid_argument("drift_liminf_profile: empty grid or ladder");
  DriftProfile p;
  p.threshold = threshold;
  p.s_grid.assign(s_grid.begin(), s_grid.end());
  std::size_t below = 0;
  for (double s : s_grid) {
    double m = std::numeric_limits<double>::infinity();
    for (double h : h_ladder) {
      if (!(h > 0.0) || s < 0.0 || s + h > 1.0 + 1e-12) {
        throw std::out_of_range("drift_liminf_profile: need 0 <= s < s+h <= 1");
      }
      m = std::min(m, std::abs(c(s + h) - c(s)) / std::sqrt(h));
    }
    p.minima.push_back(m);
    below += m < threshold;
  }
  p.fraction_below = static_cast<double>(below) / static_cast<double>(s_grid.size());
  return p;
}

}  // namespace fmoment
