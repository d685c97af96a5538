#include "fmoment/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "fmoment/mc.hpp"

namespace fmoment {

namespace {

// Nodes reach within ~1e-37 of the ends, enough for x^-1/2 type singularities.
constexpr double kTmax = 4.0;
constexpr int kFirstLevel = 2;  // h = 1/4
constexpr int kLastLevel = 8;   // h = 1/256
constexpr double kGaussCut = 12.0;

struct Piece {
  double a;
  double b;
};

// Sum of w_k g(x_k) over nodes t = k h with k odd (or all k when `all`).
double level_sum(const std::function<double(double)>& g, const Piece& p,
                 double h, bool all, int& nodes) {
  const double r = 0.5 * (p.b - p.a);
  const double c = 0.5 * (p.a + p.b);
  double s = 0.0;
  if (all) {
    s += r * 0.5 * std::numbers::pi * g(c);
    ++nodes;
  }
  const int kmax = static_cast<int>(std::ceil(kTmax / h));
  const int stride = all ? 1 : 2;
  for (int k = 1; k <= kmax; k += stride) {
    const double t = k * h;
    const double u = 0.5 * std::numbers::pi * std::sinh(t);
    const double e = std::exp(-2.0 * u);
    const double delta = 2.0 * r * e / (1.0 + e);
    // a node that rounds onto an endpoint is dropped; its weight is below
    // ulp(endpoint) there
    const bool left = delta > 0.0 && p.a + delta != p.a;
    const bool right = delta > 0.0 && p.b - delta != p.b;
    if (!left && !right) break;
    const double w =
        r * 0.5 * std::numbers::pi * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
    if (left) s += w * g(p.a + delta), ++nodes;
    if (right) s += w * g(p.b - delta), ++nodes;
  }
  return s;
}

QuadratureResult integrate_pieces(const std::function<double(double)>& g,
                                  const std::vector<Piece>& pieces,
                                  double rel_tol) {
  QuadratureResult res;
  double h = std::ldexp(1.0, -kFirstLevel);
  double raw = 0.0;
  for (const auto& p : pieces) raw += level_sum(g, p, h, true, res.nodes);
  double current = h * raw;
  double change = 0.0;
  for (int level = kFirstLevel + 1; level <= kLastLevel; ++level) {
    h *= 0.5;
    for (const auto& p : pieces) raw += level_sum(g, p, h, false, res.nodes);
    const double next = h * raw;
    change = next == 0.0 ? std::abs(next - current)
                         : std::abs(next - current) / std::abs(next);
    current = next;
    if (change <= rel_tol || (next == 0.0 && change == 0.0)) {
      res.value = current;
      res.achieved_rel_change = change;
      return res;
    }
  }
  char msg[96];
  std::snprintf(msg, sizeof msg, "quadrature did not converge; achieved relative change %.3g", change);
  throw QuadratureError(msg, change);
}

}  // namespace

QuadratureResult tanh_sinh(const std::function<double(double)>& g, double a,
                           double b, double rel_tol) {
  if (!(a < b)) throw std::invalid_argument("tanh_sinh: need a < b");
  return integrate_pieces(g, {{a, b}}, rel_tol);
}

QuadratureResult gaussian_expectation(const std::function<double(double)>& g,
                                      std::span<const double> kinks,
                                      double rel_tol) {
  std::vector<double> cuts{-kGaussCut};
  for (double k : kinks) {
    if (k > -kGaussCut && k < kGaussCut) cuts.push_back(k);
  }
  cuts.push_back(kGaussCut);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) pieces.push_back({cuts[i], cuts[i + 1]});
  auto weighted = [&](double w) { return g(w) * normal_pdf(w); };
  return integrate_pieces(weighted, pieces, rel_tol);
}

}  // namespace fmoment
