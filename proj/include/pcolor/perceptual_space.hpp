#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcolor/error.hpp"
#include "pcolor/spectral.hpp"
#include "pcolor/triples.hpp"

namespace pcolor {

// ---------------------------------------------------------------------------
// Maps between scaled RGB and the group models
// ---------------------------------------------------------------------------

/// (u,v,w) -> (-ln u, -ln v, -ln w), into the multiplicative group.
inline PositiveTriple h_map(const UnitRgb& c) {
  return {-std::log(c.u()), -std::log(c.v()), -std::log(c.w())};
}

inline UnitRgb h_inverse(const PositiveTriple& t) {
  return UnitRgb::from_open(Eigen::Vector3d(std::exp(-t.x()), std::exp(-t.y()), std::exp(-t.z())));
}

/// Componentwise ln(-ln u). Sends (1/e,1/e,1/e) to the origin.
inline EuclideanTriple loglog_map(const UnitRgb& c) {
  return {std::log(-std::log(c.u())), std::log(-std::log(c.v())), std::log(-std::log(c.w()))};
}

inline UnitRgb loglog_inverse(const EuclideanTriple& t) {
  return UnitRgb::from_open(
      Eigen::Vector3d(std::exp(-std::exp(t.p)), std::exp(-std::exp(t.q)), std::exp(-std::exp(t.r))));
}

// ---------------------------------------------------------------------------
// The group ((0,1)^3, *) carried over from (R^3, +)
// ---------------------------------------------------------------------------

inline UnitRgb unit_identity() {
  const double e_inv = std::exp(-1.0);
  return {e_inv, e_inv, e_inv};
}

/// a * b = exp(-(ln a)(ln b)) componentwise.
inline UnitRgb induced_op(const UnitRgb& a, const UnitRgb& b) {
  Eigen::Vector3d out;
  for (int i = 0; i < 3; ++i) out[i] = std::exp(-std::log(a[i]) * std::log(b[i]));
  return UnitRgb::from_open(out);
}

/// exp(1/ln a) componentwise, so that a * a^-1 is the identity.
inline UnitRgb induced_inverse(const UnitRgb& a) {
  Eigen::Vector3d out;
  for (int i = 0; i < 3; ++i) out[i] = std::exp(1.0 / std::log(a[i]));
  return UnitRgb::from_open(out);
}

// ---------------------------------------------------------------------------
// Multiplicative group ((R+)^3, .) acting on itself
// ---------------------------------------------------------------------------

/// (x',y',z') . (x,y,z) = (x'x, y'y, z'z).
inline PositiveTriple group_act(const PositiveTriple& g, const PositiveTriple& x) {
  return {g.x() * x.x(), g.y() * x.y(), g.z() * x.z()};
}

inline PositiveTriple group_inverse(const PositiveTriple& g) {
  return {1.0 / g.x(), 1.0 / g.y(), 1.0 / g.z()};
}

/// The unique g with group_act(g, m1) == m2. Equal means <=> g is (1,1,1).
inline PositiveTriple group_difference(const PositiveTriple& m1, const PositiveTriple& m2) {
  return {m2.x() / m1.x(), m2.y() / m1.y(), m2.z() / m1.z()};
}

/// group_difference expressed in the additive chart: ln of each ratio,
/// which is zero exactly when the two means coincide.
inline EuclideanTriple group_difference_log(const PositiveTriple& m1, const PositiveTriple& m2) {
  const auto g = group_difference(m1, m2);
  return {std::log(g.x()), std::log(g.y()), std::log(g.z())};
}

// ---------------------------------------------------------------------------
// Cone activation and metamerism
// ---------------------------------------------------------------------------

struct ActivationVector {
  std::array<double, 3> alpha{};

  double operator[](int i) const { return alpha.at(i); }
};

/// alpha_i = int S_i(l) x(l) dl, trapezoid on the sensitivity grid.
inline ActivationVector activation_coefficients(const SpectralDistribution& x,
                                                const ConeSensitivities& s) {
  return {quadrature::integrate(x, s)};
}

/// |alpha_i(x) - alpha_i(y)| <= tol * max(1, |alpha_i(x)|) for all three cones.
inline bool is_metameric(const SpectralDistribution& x, const SpectralDistribution& y,
                         const ConeSensitivities& s, double tol) {
  if (!(tol > 0.0)) throw DomainError("metamerism tolerance must be positive");
  const auto ax = activation_coefficients(x, s);
  const auto ay = activation_coefficients(y, s);
  for (int i = 0; i < 3; ++i) {
    if (std::abs(ax[i] - ay[i]) > tol * std::max(1.0, std::abs(ax[i]))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Executable axiom checks on the Euclidean cone model
// ---------------------------------------------------------------------------

struct AxiomVerdict {
  int axiom = 0;
  std::string name;
  bool passed = true;
  std::size_t checks = 0;
  std::optional<std::string> counterexample;
};

struct AxiomReport {
  std::vector<AxiomVerdict> verdicts;

  bool all_passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.passed; });
  }
};

namespace detail {

inline bool positive_finite(const Eigen::Vector3d& v) {
  return (v.array() > 0.0).all() && v.allFinite();
}

inline void fail_once(AxiomVerdict& v, const std::string& what) {
  if (v.passed) v.counterexample = what;
  v.passed = false;
}

}  // namespace detail

/// Checks, on the given sample of the cone (R+)^3 with scalar action
/// a . x = a x and superposition x + y:
///   1. closure under positive scalars,
///   2. no x, y with x + y = 0,
///   3. closure under convex combinations,
///   5. transitivity of the componentwise action: for every ordered pair the
///      group difference moves x onto y (relative tolerance `tol`).
inline AxiomReport check_axioms(std::span<const PositiveTriple> sample,
                                std::span<const double> scalars, double tol = 1e-12) {
  if (sample.empty() || scalars.empty()) {
    throw DomainError("axiom check needs a nonempty sample and scalar list");
  }
  for (double a : scalars) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("scalars must be positive and finite");
  }

  AxiomVerdict scalar{1, "closure under positive scalar action", true, 0, std::nullopt};
  AxiomVerdict no_inverse{2, "no additive inverses", true, 0, std::nullopt};
  AxiomVerdict convex{3, "convexity", true, 0, std::nullopt};
  AxiomVerdict homogeneous{5, "homogeneity under the componentwise action", true, 0, std::nullopt};

  const double max_scalar = *std::max_element(scalars.begin(), scalars.end());

  for (const auto& x : sample) {
    for (double a : scalars) {
      ++scalar.checks;
      const Eigen::Vector3d ax = a * x.vec();
      if (!detail::positive_finite(ax)) {
        detail::fail_once(scalar, std::to_string(a) + " * " +
                                      detail::format_triple(x.x(), x.y(), x.z()) + " leaves (R+)^3");
      }
    }
  }

  for (const auto& x : sample) {
    for (const auto& y : sample) {
      ++no_inverse.checks;
      const Eigen::Vector3d sum = x.vec() + y.vec();
      if ((sum.array() <= 0.0).any()) {
        detail::fail_once(no_inverse, detail::format_triple(x.x(), x.y(), x.z()) + " + " +
                                          detail::format_triple(y.x(), y.y(), y.z()) +
                                          " reaches a zero coordinate");
      }

      // Weights are the scalars rescaled into (0,1], plus both endpoints.
      auto combine = [&](double t) {
        ++convex.checks;
        const Eigen::Vector3d c = t * x.vec() + (1.0 - t) * y.vec();
        if (!detail::positive_finite(c)) {
          detail::fail_once(convex, "convex combination with weight " + std::to_string(t) +
                                        " leaves (R+)^3");
        }
      };
      combine(0.0);
      combine(1.0);
      for (double a : scalars) combine(a / max_scalar);

      ++homogeneous.checks;
      const auto g = group_difference(x, y);
      const Eigen::Vector3d moved = group_act(g, x).vec();
      const double err = ((moved - y.vec()).array() / y.vec().array()).abs().maxCoeff();
      if (!(err <= tol)) {
        detail::fail_once(homogeneous, "g(x, y) . x misses y by relative " + std::to_string(err));
      }
    }
  }

  return {{scalar, no_inverse, convex, homogeneous}};
}

}  // namespace pcolor
