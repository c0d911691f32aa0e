#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcolor/detail/csv.hpp"
#include "pcolor/error.hpp"

namespace pcolor {

/// A sampled nonnegative function of wavelength (nm), linear between samples.
class SpectralDistribution {
 public:
  SpectralDistribution(std::vector<double> wavelengths, std::vector<double> values)
      : wavelengths_(std::move(wavelengths)), values_(std::move(values)) {
    if (wavelengths_.size() != values_.size()) {
      throw DomainError("wavelength and value lists differ in length");
    }
    if (wavelengths_.size() < 2) {
      throw DomainError("a spectral distribution needs at least two samples");
    }
    for (std::size_t i = 0; i < wavelengths_.size(); ++i) {
      if (!std::isfinite(wavelengths_[i]) || !std::isfinite(values_[i])) {
        throw DomainError("non-finite spectral sample");
      }
      if (values_[i] < 0.0) {
        throw DomainError("spectral values must be nonnegative");
      }
      if (i > 0 && !(wavelengths_[i] > wavelengths_[i - 1])) {
        throw DomainError("wavelengths must be strictly increasing");
      }
    }
  }

  /// Samples `f` on a uniform grid of `count` points spanning [lo, hi].
  template <class F>
  static SpectralDistribution sample(F&& f, double lo, double hi, std::size_t count) {
    std::vector<double> w(count), v(count);
    for (std::size_t i = 0; i < count; ++i) {
      w[i] = i + 1 == count ? hi : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
      v[i] = f(w[i]);
    }
    return {std::move(w), std::move(v)};
  }

  std::span<const double> wavelengths() const { return wavelengths_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double lower() const { return wavelengths_.front(); }
  double upper() const { return wavelengths_.back(); }

  /// Linear interpolation; zero outside the sampled range.
  double operator()(double lambda) const {
    if (lambda < lower() || lambda > upper()) return 0.0;
    const auto it = std::upper_bound(wavelengths_.begin(), wavelengths_.end(), lambda);
    if (it == wavelengths_.end()) return values_.back();
    const auto hi = static_cast<std::size_t>(it - wavelengths_.begin());
    const auto lo = hi - 1;
    const double t = (lambda - wavelengths_[lo]) / (wavelengths_[hi] - wavelengths_[lo]);
    return values_[lo] + t * (values_[hi] - values_[lo]);
  }

  SpectralDistribution scaled(double factor) const {
    if (!(factor >= 0.0)) throw DomainError("scale factor must be nonnegative");
    auto v = values_;
    for (auto& x : v) x *= factor;
    return {wavelengths_, std::move(v)};
  }

 private:
  std::vector<double> wavelengths_;
  std::vector<double> values_;
};

/// Three spectral channels on one shared wavelength grid. `Tag` keeps
/// color matching functions and cone sensitivities from being mixed up.
template <class Tag>
class SpectralChannels {
 public:
  SpectralChannels(SpectralDistribution c0, SpectralDistribution c1, SpectralDistribution c2)
      : channels_{std::move(c0), std::move(c1), std::move(c2)} {
    const auto grid = channels_[0].wavelengths();
    for (int i = 1; i < 3; ++i) {
      const auto other = channels_[i].wavelengths();
      if (!std::equal(grid.begin(), grid.end(), other.begin(), other.end())) {
        throw DomainError("all three channels must share one wavelength grid");
      }
    }
  }

  const SpectralDistribution& operator[](int i) const { return channels_.at(i); }
  std::span<const double> wavelengths() const { return channels_[0].wavelengths(); }
  double lower() const { return channels_[0].lower(); }
  double upper() const { return channels_[0].upper(); }

 private:
  std::array<SpectralDistribution, 3> channels_;
};

struct CmfTag {};
struct ConeTag {};

/// CIE x-bar, y-bar, z-bar.
using ColorMatchingFunctions = SpectralChannels<CmfTag>;
/// Cone sensitivities S1, S2, S3.
using ConeSensitivities = SpectralChannels<ConeTag>;

namespace quadrature {

/// Integration nodes: the basis grid clipped to the overlap with `spd`,
/// with the overlap endpoints inserted when they fall between grid points.
inline std::vector<double> overlap_grid(std::span<const double> basis,
                                        const SpectralDistribution& spd) {
  const double lo = std::max(basis.front(), spd.lower());
  const double hi = std::min(basis.back(), spd.upper());
  if (!(hi > lo)) {
    throw DomainError("spectral distribution and basis do not overlap in wavelength");
  }
  std::vector<double> nodes;
  nodes.reserve(basis.size() + 2);
  nodes.push_back(lo);
  for (double w : basis) {
    if (w > lo && w < hi) nodes.push_back(w);
  }
  nodes.push_back(hi);
  return nodes;
}

/// Trapezoid weights for the given nodes: sum_j w_j f(x_j) approximates the
/// integral of f over [x_0, x_n].
inline std::vector<double> trapezoid_weights(std::span<const double> nodes) {
  std::vector<double> w(nodes.size(), 0.0);
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    const double h = nodes[j + 1] - nodes[j];
    w[j] += 0.5 * h;
    w[j + 1] += 0.5 * h;
  }
  return w;
}

/// k * integral of spd(l) * channel_i(l) dl for each of the three channels.
template <class Tag>
std::array<double, 3> integrate(const SpectralDistribution& spd,
                                const SpectralChannels<Tag>& basis, double k = 1.0) {
  const auto nodes = overlap_grid(basis.wavelengths(), spd);
  const auto weights = trapezoid_weights(nodes);
  std::array<double, 3> out{};
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double phi = spd(nodes[j]);
    for (int i = 0; i < 3; ++i) out[i] += weights[j] * phi * basis[i](nodes[j]);
  }
  for (auto& x : out) x *= k;
  return out;
}

}  // namespace quadrature

namespace detail {

inline SpectralDistribution column(const CsvTable& t, std::size_t col) {
  std::vector<double> w, v;
  w.reserve(t.rows.size());
  v.reserve(t.rows.size());
  for (const auto& [line, fields] : t.rows) {
    w.push_back(parse_double(fields[0], line));
    v.push_back(parse_double(fields[col], line));
  }
  try {
    return {std::move(w), std::move(v)};
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid spectral table: ") + e.what());
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

}  // namespace detail

/// Parses `wavelength_nm,xbar,ybar,zbar`.
inline ColorMatchingFunctions read_cmf_csv(std::istream& in) {
  const auto table = detail::read_csv(in, {"wavelength_nm", "xbar", "ybar", "zbar"});
  return {detail::column(table, 1), detail::column(table, 2), detail::column(table, 3)};
}

inline ColorMatchingFunctions load_cmf_csv(const std::string& path) {
  auto in = detail::open_input(path);
  return read_cmf_csv(in);
}

/// Parses `wavelength_nm,value`.
inline SpectralDistribution read_spd_csv(std::istream& in) {
  const auto table = detail::read_csv(in, {"wavelength_nm", "value"});
  return detail::column(table, 1);
}

inline SpectralDistribution load_spd_csv(const std::string& path) {
  auto in = detail::open_input(path);
  return read_spd_csv(in);
}

}  // namespace pcolor
