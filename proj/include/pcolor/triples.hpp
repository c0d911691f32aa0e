#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "pcolor/error.hpp"

namespace pcolor {

/// Half of a 16-bit quantization step: pixel values 0 and 255 land strictly
/// inside (0,1) without moving interior 8-bit levels.
inline constexpr double kDefaultClampEps = 1.0 / (2.0 * 255.0 * 256.0);

/// min(max(v, eps), 1 - eps). Requires eps in (0, 0.5).
inline double clamp_open_unit(double v, double eps = kDefaultClampEps) {
  if (!(eps > 0.0 && eps < 0.5)) {
    throw DomainError("clamp epsilon must lie in (0, 0.5)");
  }
  if (std::isnan(v)) {
    throw DomainError("cannot clamp NaN into (0,1)");
  }
  return std::min(std::max(v, eps), 1.0 - eps);
}

namespace detail {

inline std::string format_triple(double a, double b, double c) {
  std::ostringstream os;
  os.precision(17);
  os << '(' << a << ", " << b << ", " << c << ')';
  return os.str();
}

}  // namespace detail

/// Point of the multiplicative group ((R+)^3, .). Identity is (1,1,1).
/// Also the carrier of CIE XYZ tristimulus values.
class PositiveTriple {
 public:
  PositiveTriple(double x, double y, double z) : x_(x), y_(y), z_(z) {
    if (!(x > 0.0 && y > 0.0 && z > 0.0) || !std::isfinite(x) || !std::isfinite(y) ||
        !std::isfinite(z)) {
      throw DomainError("triple must have finite, strictly positive components, got " +
                        detail::format_triple(x, y, z));
    }
  }

  explicit PositiveTriple(const Eigen::Vector3d& v) : PositiveTriple(v[0], v[1], v[2]) {}

  static PositiveTriple identity() { return {1.0, 1.0, 1.0}; }

  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  double operator[](int i) const { return i == 0 ? x_ : (i == 1 ? y_ : z_); }

  Eigen::Vector3d vec() const { return {x_, y_, z_}; }

  friend bool operator==(const PositiveTriple&, const PositiveTriple&) = default;

 private:
  double x_;
  double y_;
  double z_;
};

using Tristimulus = PositiveTriple;

/// Point of the additive group (R^3, +).
struct EuclideanTriple {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;

  Eigen::Vector3d vec() const { return {p, q, r}; }
  static EuclideanTriple from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

  friend EuclideanTriple operator+(const EuclideanTriple& a, const EuclideanTriple& b) {
    return {a.p + b.p, a.q + b.q, a.r + b.r};
  }
  friend bool operator==(const EuclideanTriple&, const EuclideanTriple&) = default;
};

/// Linear-light RGB before the transfer curve. Components may leave [0,1]
/// for out-of-gamut colors.
struct LinearRgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  Eigen::Vector3d vec() const { return {r, g, b}; }
  static LinearRgb from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

  bool in_gamut() const {
    return r >= 0.0 && r <= 1.0 && g >= 0.0 && g <= 1.0 && b >= 0.0 && b <= 1.0;
  }
};

/// Scaled display RGB strictly inside the open cube (0,1)^3.
///
/// The constructor validates; use `clamped()` at data boundaries (pixel
/// means, converted colors) to pull closed-interval values inside.
class UnitRgb {
 public:
  UnitRgb(double u, double v, double w) : u_(u), v_(v), w_(w) {
    if (!(inside(u) && inside(v) && inside(w))) {
      throw DomainError("unit RGB components must lie in the open interval (0,1), got " +
                        detail::format_triple(u, v, w));
    }
  }

  static UnitRgb clamped(double u, double v, double w, double eps = kDefaultClampEps) {
    return {clamp_open_unit(u, eps), clamp_open_unit(v, eps), clamp_open_unit(w, eps)};
  }

  /// Builds from values that are mathematically in (0,1) but may have
  /// rounded onto an endpoint; nudges them to the nearest interior double.
  static UnitRgb from_open(const Eigen::Vector3d& c) {
    return {nudge(c[0]), nudge(c[1]), nudge(c[2])};
  }

  double u() const { return u_; }
  double v() const { return v_; }
  double w() const { return w_; }
  double operator[](int i) const { return i == 0 ? u_ : (i == 1 ? v_ : w_); }

  Eigen::Vector3d vec() const { return {u_, v_, w_}; }

  friend bool operator==(const UnitRgb&, const UnitRgb&) = default;

 private:
  static bool inside(double t) { return t > 0.0 && t < 1.0; }

  static double nudge(double t) {
    if (std::isnan(t)) throw DomainError("NaN unit RGB component");
    constexpr double lo = std::numeric_limits<double>::denorm_min();
    constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    return std::min(std::max(t, lo), hi);
  }

  double u_;
  double v_;
  double w_;
};

}  // namespace pcolor
