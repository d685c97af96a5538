#include "fmoment/curve.hpp"

#include <cmath>
#include <stdexcept>

namespace fmoment {

Curve Curve::linear(double slope) {
  if (!std::isfinite(slope)) throw std::invalid_argument("linear curve: non-finite slope");
  Curve c;
  c.kind_ = Kind::linear;
  c.params_ = {slope};
  return c;
}

Curve Curve::power(double scale, double exponent) {
  if (!std::isfinite(scale) || !(exponent > 0.0)) {
    throw std::invalid_argument("power curve: need finite scale and exponent > 0");
  }
  Curve c;
  c.kind_ = Kind::power;
  c.params_ = {scale, exponent};
  return c;
}

Curve Curve::polynomial(std::vector<double> coeffs) {
  for (double a : coeffs) {
    if (!std::isfinite(a)) throw std::invalid_argument("polynomial curve: non-finite coefficient");
  }
  Curve c;
  c.kind_ = Kind::polynomial;
  c.params_ = std::move(coeffs);
  return c;
}

Curve Curve::step(double at, double height) {
  if (!std::isfinite(at) || !std::isfinite(height)) {
    throw std::invalid_argument("step curve: non-finite parameter");
  }
  Curve c;
  c.kind_ = Kind::step;
  c.params_ = {at, height};
  return c;
}

Curve Curve::custom(std::function<double(double)> fn, std::string label) {
  if (!fn) throw std::invalid_argument("custom curve: empty callable");
  Curve c;
  c.kind_ = Kind::custom;
  c.fn_ = std::move(fn);
  c.label_ = std::move(label);
  return c;
}

double Curve::operator()(double t) const {
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::linear: return params_[0] * t;
    case Kind::power: return t <= 0.0 ? 0.0 : params_[0] * std::pow(t, params_[1]);
    case Kind::polynomial: {
      double acc = 0.0;
      for (auto it = params_.rbegin(); it != params_.rend(); ++it) acc = acc * t + *it;
      return acc;
    }
    case Kind::step: return t >= params_[0] ? params_[1] : 0.0;
    case Kind::custom: return fn_(t);
  }
  return 0.0;
}

std::string Curve::kind_name() const {
  switch (kind_) {
    case Kind::zero: return "zero";
    case Kind::linear: return "linear";
    case Kind::power: return "power";
    case Kind::polynomial: return "polynomial";
    case Kind::step: return "step";
    case Kind::custom: return "custom";
  }
  return "unknown";
}

bool Curve::is_linear() const noexcept {
  return kind_ == Kind::zero || kind_ == Kind::linear;
}

double Curve::slope() const {
  if (kind_ == Kind::zero) return 0.0;
  if (kind_ == Kind::linear) return params_[0];
  throw std::logic_error("slope requested for a non-linear curve");
}

bool Curve::is_identically_zero() const noexcept {
  switch (kind_) {
    case Kind::zero: return true;
    case Kind::linear: return params_[0] == 0.0;
    case Kind::power: return params_[0] == 0.0;
    case Kind::step: return params_[1] == 0.0;
    case Kind::polynomial:
      for (double a : params_) {
        if (a != 0.0) return false;
      }
      return true;
    case Kind::custom: return false;
  }
  return false;
}

}  // namespace fmoment
