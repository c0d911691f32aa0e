#pragma once

// Reference computations used by the tests. None of these call into the
// library code paths they check.

#include <Eigen/Core>
#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace pcolor::testing {

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline double max_rel_err(const Eigen::Vector3d& got, const Eigen::Vector3d& want) {
  double e = 0.0;
  for (int i = 0; i < 3; ++i) e = std::max(e, rel_err(got[i], want[i]));
  return e;
}

/// Piecewise-linear interpolation over sorted nodes; 0 outside.
inline double lerp_table(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x < xs.front() || x > xs.back()) return 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (x <= xs[i + 1]) {
      const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
      return ys[i] * (1 - t) + ys[i + 1] * t;
    }
  }
  return ys.back();
}

/// Midpoint Riemann sum of f over [a, b] at the given step.
template <class F>
double riemann(F&& f, double a, double b, double step = 0.1) {
  const auto n = static_cast<long>(std::llround((b - a) / step));
  const double h = (b - a) / static_cast<double>(n);
  double s = 0.0;
  for (long j = 0; j < n; ++j) s += f(a + (static_cast<double>(j) + 0.5) * h);
  return s * h;
}

/// F(d1, d2) density.
inline double f_density(double x, double d1, double d2) {
  if (x <= 0.0) return 0.0;
  const double log_b = std::lgamma(d1 / 2) + std::lgamma(d2 / 2) - std::lgamma((d1 + d2) / 2);
  const double log_p = 0.5 * d1 * std::log(d1 / d2) + (d1 / 2 - 1) * std::log(x) -
                       0.5 * (d1 + d2) * std::log1p(d1 * x / d2) - log_b;
  return std::exp(log_p);
}

/// 1 - int_0^f density, composite Simpson in u = sqrt(x). The substitution
/// turns the x^(d1/2 - 1) factor into u^(d1 - 1), bounded for d1 >= 1.
inline double f_upper_tail_quadrature(double f, double d1, double d2, int intervals = 200000) {
  if (f <= 0.0) return 1.0;
  const double log_b = std::lgamma(d1 / 2) + std::lgamma(d2 / 2) - std::lgamma((d1 + d2) / 2);
  auto g = [&](double u) {
    const double power = u == 0.0 ? (d1 == 1.0 ? 0.0 : -INFINITY) : (d1 - 1.0) * std::log(u);
    return std::exp(std::log(2.0) + 0.5 * d1 * std::log(d1 / d2) + power -
                    0.5 * (d1 + d2) * std::log1p(d1 * u * u / d2) - log_b);
  };
  const double top = std::sqrt(f);
  const double h = top / intervals;
  double s = g(0.0) + g(top);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * g(i * h);
  return 1.0 - s * h / 3.0;
}

/// Two-sample pooled t statistic for scalar data.
inline double pooled_t(const std::vector<double>& a, const std::vector<double>& b) {
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / v.size();
  };
  const double ma = mean(a), mb = mean(b);
  double ss = 0;
  for (double x : a) ss += (x - ma) * (x - ma);
  for (double x : b) ss += (x - mb) * (x - mb);
  const double sp2 = ss / (a.size() + b.size() - 2);
  return (ma - mb) / std::sqrt(sp2 * (1.0 / a.size() + 1.0 / b.size()));
}

/// Definition-level unbiased covariance: 1/(2n(n-1)) sum_{i,j} (x_i - x_j)(x_i - x_j)^T.
inline Eigen::Matrix3d pairwise_covariance(const std::vector<Eigen::Vector3d>& xs) {
  Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
  const double n = static_cast<double>(xs.size());
  for (const auto& a : xs) {
    for (const auto& b : xs) {
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) s(r, c) += (a[r] - b[r]) * (a[c] - b[c]);
      }
    }
  }
  return s / (2.0 * n * (n - 1.0));
}

/// Component of `v` orthogonal (under weights w) to every column of `basis`.
inline Eigen::VectorXd weighted_orthogonal_part(const Eigen::VectorXd& v, const Eigen::MatrixXd& basis,
                                                const Eigen::VectorXd& w) {
  const Eigen::MatrixXd wb = w.asDiagonal() * basis;  // columns: weighted sensitivities
  // Project v onto the orthogonal complement of span(wb) in the plain inner product.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(wb);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(wb.rows(), wb.cols());
  return v - q * (q.transpose() * v);
}

inline std::vector<Eigen::Vector3d> normal_cloud(std::mt19937_64& rng, const Eigen::Vector3d& mean,
                                                 const Eigen::Vector3d& sd, std::size_t n) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<Eigen::Vector3d> out;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector3d x;
    for (int c = 0; c < 3; ++c) x[c] = mean[c] + sd[c] * z(rng);
    out.push_back(x);
  }
  return out;
}

/// Asymptotic Kolmogorov p-value for the one-sample KS statistic against U(0,1).
inline double ks_uniform_pvalue(std::vector<double> p) {
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d = std::max({d, (i + 1) / n - p[i], p[i] - i / n});
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  if (lambda < 0.2) return 1.0;  // series has not converged; the tail mass is ~1 here
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    q += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  }
  return std::clamp(q, 0.0, 1.0);
}

/// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pcolor_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace pcolor::testing
