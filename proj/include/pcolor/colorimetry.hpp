#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <cmath>
#include <string>

#include "pcolor/error.hpp"
#include "pcolor/spectral.hpp"
#include "pcolor/triples.hpp"

namespace pcolor {

// ---------------------------------------------------------------------------
// Spectral -> XYZ
// ---------------------------------------------------------------------------

enum class Normalization {
  unit,  // k = 1
  y100,  // k chosen so that Y = 100
};

/// k * (int phi xbar, int phi ybar, int phi zbar) by trapezoid quadrature on
/// the CMF grid, with the SPD linearly interpolated onto it. Throws
/// DomainError when the ranges do not overlap or any channel integrates to 0.
inline Tristimulus integrate_tristimulus(const SpectralDistribution& spd,
                                         const ColorMatchingFunctions& cmf, double k = 1.0) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("normalization k must be positive");
  const auto xyz = quadrature::integrate(spd, cmf, k);
  if (!(xyz[0] > 0.0 && xyz[1] > 0.0 && xyz[2] > 0.0)) {
    throw DomainError("tristimulus integral is zero in at least one channel " +
                      detail::format_triple(xyz[0], xyz[1], xyz[2]));
  }
  return {xyz[0], xyz[1], xyz[2]};
}

/// The k that scales the luminance integral of `spd` to 100.
inline double y100_constant(const SpectralDistribution& spd, const ColorMatchingFunctions& cmf) {
  const double y = quadrature::integrate(spd, cmf)[1];
  if (!(y > 0.0)) throw DomainError("luminance integral is zero; cannot normalize to Y = 100");
  return 100.0 / y;
}

inline Tristimulus integrate_tristimulus(const SpectralDistribution& spd,
                                         const ColorMatchingFunctions& cmf, Normalization mode) {
  return integrate_tristimulus(spd, cmf, mode == Normalization::y100 ? y100_constant(spd, cmf) : 1.0);
}

// ---------------------------------------------------------------------------
// XYZ <-> linear RGB
// ---------------------------------------------------------------------------

/// XYZ -> linear sRGB primaries.
inline const Eigen::Matrix3d& xyz_to_rgb_matrix() {
  static const Eigen::Matrix3d m = [] {
    Eigen::Matrix3d a;
    // clang-format off
    a << +3.2406, -1.5372, -0.4986,
         -0.9689, +1.8758, +0.0415,
         +0.0557, -0.2040, +1.0570;
    // clang-format on
    return a;
  }();
  return m;
}

/// Cofactor inverse of `xyz_to_rgb_matrix()`, computed once.
inline const Eigen::Matrix3d& rgb_to_xyz_matrix() {
  static const Eigen::Matrix3d m_inv = xyz_to_rgb_matrix().inverse();
  return m_inv;
}

inline LinearRgb xyz_to_linear_rgb(const Tristimulus& t) {
  return LinearRgb::from(xyz_to_rgb_matrix() * t.vec());
}

inline Tristimulus linear_rgb_to_xyz(const LinearRgb& c) {
  const Eigen::Vector3d xyz = rgb_to_xyz_matrix() * c.vec();
  if (!(xyz.array() > 0.0).all()) {
    throw DomainError("linear RGB maps outside the positive XYZ octant: " +
                      detail::format_triple(xyz[0], xyz[1], xyz[2]));
  }
  return Tristimulus(xyz);
}

// ---------------------------------------------------------------------------
// Transfer curve
// ---------------------------------------------------------------------------

inline constexpr double kGammaKnot = 0.0031308;
/// Image of the knot under the linear branch; decode switches branch here.
inline constexpr double kGammaDecodeKnot = 323.0 * kGammaKnot / 25.0;

inline double gamma_encode(double u) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("gamma_encode expects a value in [0,1], got " + std::to_string(u));
  }
  if (u <= kGammaKnot) return 323.0 * u / 25.0;
  return (211.0 * std::pow(u, 5.0 / 12.0) - 11.0) / 200.0;
}

inline double gamma_decode(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError("gamma_decode expects a value in [0,1], got " + std::to_string(v));
  }
  if (v <= kGammaDecodeKnot) return 25.0 * v / 323.0;
  return std::pow((200.0 * v + 11.0) / 211.0, 12.0 / 5.0);
}

// ---------------------------------------------------------------------------
// XYZ <-> encoded sRGB
// ---------------------------------------------------------------------------

struct SrgbConversion {
  UnitRgb rgb;
  /// Set when the color was out of gamut or an encoded channel hit the
  /// open-interval guard.
  bool clamped = false;
};

inline SrgbConversion xyz_to_srgb(const Tristimulus& t, double eps = kDefaultClampEps) {
  const Eigen::Vector3d linear = xyz_to_linear_rgb(t).vec();
  bool clamped = false;
  Eigen::Vector3d encoded;
  for (int i = 0; i < 3; ++i) {
    const double c = std::clamp(linear[i], 0.0, 1.0);
    clamped = clamped || c != linear[i];
    encoded[i] = gamma_encode(c);
  }
  auto rgb = UnitRgb::clamped(encoded[0], encoded[1], encoded[2], eps);
  clamped = clamped || rgb.vec() != encoded;
  return {rgb, clamped};
}

inline Tristimulus srgb_to_xyz(const UnitRgb& c) {
  return linear_rgb_to_xyz({gamma_decode(c.u()), gamma_decode(c.v()), gamma_decode(c.w())});
}

}  // namespace pcolor
