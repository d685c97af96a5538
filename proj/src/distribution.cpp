#include "fmoment/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace fmoment {

Distribution Distribution::constant(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("constant: non-finite value");
  Distribution d;
  d.kind_ = Kind::constant;
  d.params_ = {value};
  d.values_ = {value};
  d.probs_ = {1.0};
  d.cumulative_ = {1.0};
  return d;
}

Distribution Distribution::uniform(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw std::invalid_argument("uniform: need finite lo < hi");
  }
  Distribution d;
  d.kind_ = Kind::uniform;
  d.params_ = {lo, hi};
  return d;
}

Distribution Distribution::normal(double mean, double sd) {
  if (!(std::isfinite(mean) && std::isfinite(sd) && sd > 0.0)) {
    throw std::invalid_argument("normal: need finite mean and sd > 0");
  }
  Distribution d;
  d.kind_ = Kind::normal;
  d.params_ = {mean, sd};
  return d;
}

Distribution Distribution::cauchy(double location, double scale) {
  if (!(std::isfinite(location) && std::isfinite(scale) && scale > 0.0)) {
    throw std::invalid_argument("cauchy: need finite location and scale > 0");
  }
  Distribution d;
  d.kind_ = Kind::cauchy;
  d.params_ = {location, scale};
  return d;
}

Distribution Distribution::discrete(std::vector<double> values,
                                    std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size()) {
    throw std::invalid_argument("discrete: values and probs must be non-empty and equal length");
  }
  std::map<double, double> merged;
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || !(probs[i] >= 0.0)) {
      throw std::invalid_argument("discrete: invalid value or probability");
    }
    if (probs[i] > 0.0) merged[values[i]] += probs[i];
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("discrete: probabilities must sum to 1");
  }
  Distribution d;
  d.kind_ = Kind::discrete;
  double acc = 0.0;
  for (const auto& [v, p] : merged) {
    d.values_.push_back(v);
    d.probs_.push_back(p / total);
    acc += p / total;
    d.cumulative_.push_back(acc);
  }
  d.cumulative_.back() = 1.0;
  return d;
}

std::string Distribution::kind_name() const {
  switch (kind_) {
    case Kind::constant: return "constant";
    case Kind::uniform: return "uniform";
    case Kind::normal: return "normal";
    case Kind::discrete: return "discrete";
    case Kind::cauchy: return "cauchy";
  }
  return "unknown";
}

double Distribution::quantile(double u) const {
  switch (kind_) {
    case Kind::constant:
      return params_[0];
    case Kind::uniform:
      return params_[0] + (params_[1] - params_[0]) * u;
    case Kind::normal:
      return params_[0] + params_[1] * normal_quantile(u);
    case Kind::cauchy:
      return params_[0] + params_[1] * std::tan(std::numbers::pi * (u - 0.5));
    case Kind::discrete: {
      const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
      const auto idx = std::min<std::size_t>(
          static_cast<std::size_t>(it - cumulative_.begin()), values_.size() - 1);
      return values_[idx];
    }
  }
  return 0.0;
}

double Distribution::mean() const {
  switch (kind_) {
    case Kind::constant: return params_[0];
    case Kind::uniform: return 0.5 * (params_[0] + params_[1]);
    case Kind::normal: return params_[0];
    case Kind::cauchy: throw std::domain_error("cauchy distribution has no mean");
    case Kind::discrete: {
      double m = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) m += values_[i] * probs_[i];
      return m;
    }
  }
  return 0.0;
}

double Distribution::variance() const {
  switch (kind_) {
    case Kind::constant: return 0.0;
    case Kind::uniform: {
      const double w = params_[1] - params_[0];
      return w * w / 12.0;
    }
    case Kind::normal: return params_[1] * params_[1];
    case Kind::cauchy: throw std::domain_error("cauchy distribution has no variance");
    case Kind::discrete: {
      const double m = mean();
      double v = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        v += (values_[i] - m) * (values_[i] - m) * probs_[i];
      }
      return v;
    }
  }
  return 0.0;
}

double Distribution::truncated_second_moment(double a) const {
  if (a < 0.0) return 0.0;
  switch (kind_) {
    case Kind::constant:
    case Kind::discrete: {
      double s = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (std::abs(values_[i]) <= a) s += values_[i] * values_[i] * probs_[i];
      }
      return s;
    }
    case Kind::uniform: {
      const double lo = std::max(params_[0], -a);
      const double hi = std::min(params_[1], a);
      if (hi <= lo) return 0.0;
      return (hi * hi * hi - lo * lo * lo) / (3.0 * (params_[1] - params_[0]));
    }
    case Kind::normal: {
      const double m = params_[0];
      const double s = params_[1];
      const double al = (-a - m) / s;
      const double be = (a - m) / s;
      const double mass = normal_cdf(be) - normal_cdf(al);
      return m * m * mass + 2.0 * m * s * (normal_pdf(al) - normal_pdf(be)) +
             s * s * (mass + al * normal_pdf(al) - be * normal_pdf(be));
    }
    case Kind::cauchy: {
      // integral of x^2 g(x) over [-a, a] for g the Cauchy density
      const double l = params_[0];
      const double g = params_[1];
      auto prim = [&](double x) {
        const double z = x - l;
        return (g * z + 2.0 * g * l * 0.5 * std::log(z * z + g * g) +
                (l * l - g * g) * std::atan2(z, g)) /
               std::numbers::pi;
      };
      return prim(a) - prim(-a);
    }
  }
  return 0.0;
}

double Distribution::min_abs_support() const {
  switch (kind_) {
    case Kind::constant:
    case Kind::discrete: {
      double m = std::abs(values_[0]);
      for (double v : values_) m = std::min(m, std::abs(v));
      return m;
    }
    case Kind::uniform:
      if (params_[0] <= 0.0 && params_[1] >= 0.0) return 0.0;
      return std::min(std::abs(params_[0]), std::abs(params_[1]));
    case Kind::normal:
    case Kind::cauchy:
      return 0.0;
  }
  return 0.0;
}

bool Distribution::is_symmetric(double tol) const {
  switch (kind_) {
    case Kind::constant: return params_[0] == 0.0;
    case Kind::uniform: return std::abs(params_[0] + params_[1]) <= tol;
    case Kind::normal:
    case Kind::cauchy: return std::abs(params_[0]) <= tol;
    case Kind::discrete: {
      const std::size_t n = values_.size();
      for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(values_[i] + values_[n - 1 - i]) > tol) return false;
        if (std::abs(probs_[i] - probs_[n - 1 - i]) > tol) return false;
      }
      return true;
    }
  }
  return false;
}

Distribution Distribution::centered() const {
  switch (kind_) {
    case Kind::constant: return constant(0.0);
    case Kind::uniform: {
      const double h = 0.5 * (params_[1] - params_[0]);
      return uniform(-h, h);
    }
    case Kind::normal: return normal(0.0, params_[1]);
    case Kind::cauchy: return cauchy(0.0, params_[1]);
    case Kind::discrete: {
      const double m = mean();
      std::vector<double> v = values_;
      for (double& x : v) x -= m;
      return discrete(std::move(v), probs_);
    }
  }
  return *this;
}

}  // namespace fmoment
