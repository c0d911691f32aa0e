#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <boost/math/distributions/fisher_f.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pcolor/error.hpp"
#include "pcolor/perceptual_space.hpp"
#include "pcolor/triples.hpp"

namespace pcolor {

/// Labeled set of 3-vectors, one per image.
class SampleGroup {
 public:
  SampleGroup(std::string label, std::vector<Eigen::Vector3d> observations)
      : label_(std::move(label)), observations_(std::move(observations)) {
    if (observations_.size() < 2) {
      throw InsufficientSampleError("group '" + label_ + "' needs at least 2 observations, has " +
                                    std::to_string(observations_.size()));
    }
    for (const auto& o : observations_) {
      if (!o.allFinite()) throw DomainError("group '" + label_ + "' has a non-finite entry");
    }
  }

  const std::string& label() const { return label_; }
  std::span<const Eigen::Vector3d> observations() const { return observations_; }
  std::size_t size() const { return observations_.size(); }

  /// Rows are observations.
  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd m(observations_.size(), 3);
    for (std::size_t i = 0; i < observations_.size(); ++i) m.row(i) = observations_[i].transpose();
    return m;
  }

 private:
  std::string label_;
  std::vector<Eigen::Vector3d> observations_;
};

// ---------------------------------------------------------------------------
// Moments (rows of `x` are observations)
// ---------------------------------------------------------------------------

inline Eigen::VectorXd mean_vector(const Eigen::MatrixXd& x) {
  if (x.rows() < 1) throw InsufficientSampleError("mean of an empty sample");
  return x.colwise().mean().transpose();
}

inline Eigen::Vector3d mean_vector(const SampleGroup& g) { return mean_vector(g.matrix()); }

/// Unbiased (n - 1) sample covariance.
inline Eigen::MatrixXd covariance(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw InsufficientSampleError("covariance needs at least 2 observations");
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::MatrixXd s = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
  // Exact symmetry regardless of the product kernel's summation order.
  return (0.5 * (s + s.transpose())).eval();
}

inline Eigen::Matrix3d covariance(const SampleGroup& g) { return covariance(g.matrix()); }

// ---------------------------------------------------------------------------
// F distribution
// ---------------------------------------------------------------------------

/// P(F > f) for F ~ F(d1, d2).
inline double f_upper_tail(double f, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw DomainError("F degrees of freedom must be positive");
  if (std::isnan(f)) throw DomainError("F statistic is NaN");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f_distribution<double>(d1, d2), f));
}

// ---------------------------------------------------------------------------
// Two-sample Hotelling T^2
// ---------------------------------------------------------------------------

struct T2Options {
  /// Replace a singular pooled covariance S by S + lambda I with
  /// lambda = 1e-8 * trace(S) / p instead of failing.
  bool ridge_fallback = false;
  /// Reciprocal condition estimate below which S counts as singular.
  double rcond_threshold = 1e-12;
};

struct T2Result {
  double t2 = 0.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t p = 0;
  double f_stat = 0.0;
  double df1 = 0.0;
  double df2 = 0.0;
  double p_value = 1.0;
  bool singular_fallback = false;
};

/// Pooled-covariance two-sample T^2 with an F(p, n1+n2-p-1) p-value.
/// Rows of `a` and `b` are observations of equal dimension.
inline T2Result hotelling_t2(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                             const T2Options& opt = {}) {
  if (a.cols() != b.cols() || a.cols() < 1) {
    throw DomainError("samples must share a positive dimension");
  }
  const auto n1 = static_cast<std::size_t>(a.rows());
  const auto n2 = static_cast<std::size_t>(b.rows());
  const auto p = static_cast<std::size_t>(a.cols());
  if (n1 < 2 || n2 < 2) throw InsufficientSampleError("each group needs at least 2 observations");
  if (n1 + n2 <= p + 1) {
    throw InsufficientSampleError("n1 + n2 - p - 1 must be positive (n1=" + std::to_string(n1) +
                                  ", n2=" + std::to_string(n2) + ", p=" + std::to_string(p) + ")");
  }

  const Eigen::VectorXd d = mean_vector(a) - mean_vector(b);
  const double dof = static_cast<double>(n1 + n2 - 2);
  Eigen::MatrixXd pooled = (static_cast<double>(n1 - 1) * covariance(a) +
                            static_cast<double>(n2 - 1) * covariance(b)) /
                           dof;

  T2Result r;
  r.n1 = n1;
  r.n2 = n2;
  r.p = p;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(pooled);
  // LDLT silently pseudo-inverts zero pivots, so rcond alone misses exact
  // singularity; the pivot ratio catches it.
  auto ill_conditioned = [&] {
    const auto pivots = ldlt.vectorD().cwiseAbs();
    return ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
           !(pivots.minCoeff() > opt.rcond_threshold * pivots.maxCoeff()) ||
           !(ldlt.rcond() > opt.rcond_threshold);
  };
  const bool singular = ill_conditioned();
  if (singular) {
    if (!opt.ridge_fallback) {
      throw SingularCovarianceError("pooled covariance is singular (rcond " +
                                    std::to_string(ldlt.rcond()) + ")");
    }
    double lambda = 1e-8 * pooled.trace() / static_cast<double>(p);
    // An all-zero S has no scale to borrow; fall back to an absolute ridge.
    if (!(lambda > 0.0)) lambda = 1e-8;
    pooled.diagonal().array() += lambda;
    ldlt.compute(pooled);
    r.singular_fallback = true;
    if (ill_conditioned()) {
      throw SingularCovarianceError("pooled covariance stays singular after ridge fallback");
    }
  }

  const double scale = static_cast<double>(n1 * n2) / static_cast<double>(n1 + n2);
  r.t2 = std::max(0.0, scale * d.dot(ldlt.solve(d)));
  r.df1 = static_cast<double>(p);
  r.df2 = static_cast<double>(n1 + n2 - p - 1);
  r.f_stat = r.t2 * r.df2 / (dof * r.df1);
  r.p_value = f_upper_tail(r.f_stat, r.df1, r.df2);
  return r;
}

inline T2Result hotelling_t2(const SampleGroup& g1, const SampleGroup& g2, const T2Options& opt = {}) {
  return hotelling_t2(g1.matrix(), g2.matrix(), opt);
}

// ---------------------------------------------------------------------------
// Transforms and pairwise matrices
// ---------------------------------------------------------------------------

enum class Transform { none, h, loglog };

inline std::string to_string(Transform t) {
  switch (t) {
    case Transform::none: return "none";
    case Transform::h: return "h";
    case Transform::loglog: return "loglog";
  }
  return "?";
}

inline Transform parse_transform(const std::string& s) {
  if (s == "none") return Transform::none;
  if (s == "h") return Transform::h;
  if (s == "loglog") return Transform::loglog;
  throw DomainError("unknown transform '" + s + "' (expected none, h or loglog)");
}

/// Applies `t` to one observation in unit scale. For `h` and `loglog` the
/// observation is first clamped into (eps, 1 - eps).
inline Eigen::Vector3d apply_transform(const Eigen::Vector3d& x, Transform t,
                                       double eps = kDefaultClampEps) {
  if (t == Transform::none) return x;
  const auto c = UnitRgb::clamped(x[0], x[1], x[2], eps);
  return t == Transform::h ? h_map(c).vec() : loglog_map(c).vec();
}

inline SampleGroup apply_transform(const SampleGroup& g, Transform t, double eps = kDefaultClampEps) {
  std::vector<Eigen::Vector3d> obs;
  obs.reserve(g.size());
  for (const auto& o : g.observations()) obs.push_back(apply_transform(o, t, eps));
  return {g.label(), std::move(obs)};
}

struct PairwiseFailure {
  std::size_t i = 0;
  std::size_t j = 0;
  std::string message;
};

struct PairwiseMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd t2;
  Eigen::MatrixXd p_values;
  /// Cells computed with the ridge fallback.
  std::vector<std::pair<std::size_t, std::size_t>> ridge_cells;
  /// Cells that could not be computed; their entries are NaN.
  std::vector<PairwiseFailure> failures;
};

/// Symmetric T^2 and p-value matrices over all pairs of `groups`, after
/// transforming every observation. Failed cells are NaN and listed in
/// `failures`; the diagonal is 0 (T^2) and 1 (p).
inline PairwiseMatrix pairwise_t2(std::span<const SampleGroup> groups, Transform transform,
                                  const T2Options& opt = {}, double eps = kDefaultClampEps) {
  if (groups.size() < 2) throw InsufficientSampleError("pairwise testing needs at least 2 groups");
  const auto k = static_cast<Eigen::Index>(groups.size());

  PairwiseMatrix out;
  std::vector<Eigen::MatrixXd> data;
  for (const auto& g : groups) {
    out.labels.push_back(g.label());
    data.push_back(apply_transform(g, transform, eps).matrix());
  }
  out.t2 = Eigen::MatrixXd::Zero(k, k);
  out.p_values = Eigen::MatrixXd::Ones(k, k);

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      double t2 = nan;
      double pv = nan;
      try {
        const auto r = hotelling_t2(data[i], data[j], opt);
        t2 = r.t2;
        pv = r.p_value;
        if (r.singular_fallback) out.ridge_cells.emplace_back(i, j);
      } catch (const std::exception& e) {
        out.failures.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), e.what()});
      }
      out.t2(i, j) = out.t2(j, i) = t2;
      out.p_values(i, j) = out.p_values(j, i) = pv;
    }
  }
  return out;
}

/// Header `group,<labels>`, then one row per group. NaN cells print as `nan`.
inline void write_matrix_csv(std::ostream& os, const std::vector<std::string>& labels,
                             const Eigen::MatrixXd& m) {
  os << "group";
  for (const auto& l : labels) os << ',' << l;
  os << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::isnan(m(i, j))) {
        os << ",nan";
      } else {
        std::snprintf(buf, sizeof buf, "%.10g", m(i, j));
        os << ',' << buf;
      }
    }
    os << '\n';
  }
}

}  // namespace pcolor
