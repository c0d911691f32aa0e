#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "pcolor/colorimetry.hpp"
#include "pcolor/detail/csv.hpp"
#include "pcolor/error.hpp"
#include "pcolor/image_io.hpp"
#include "pcolor/mvstat.hpp"
#include "pcolor/triples.hpp"

namespace pcolor {

struct IngestOptions {
  double eps = kDefaultClampEps;
  /// Average gamma-decoded (linear-light) values instead of encoded ones.
  bool linearize = false;
  /// Side fraction of the centered crop that is averaged; 1 = whole image.
  double roi_fraction = 1.0;

  void validate() const {
    if (!(eps > 0.0 && eps < 0.5)) throw DomainError("clamp epsilon must lie in (0, 0.5)");
    if (!(roi_fraction > 0.0 && roi_fraction <= 1.0)) {
      throw DomainError("ROI fraction must lie in (0, 1]");
    }
  }
};

struct ImageSummary {
  std::string source;
  Eigen::Vector3d mean_rgb_255 = Eigen::Vector3d::Zero();
  UnitRgb mean_rgb_unit{0.5, 0.5, 0.5};
  std::uint64_t pixel_count = 0;
};

/// Builds a summary from 0..255 channel means, deriving the clamped unit triple.
inline ImageSummary make_summary(std::string source, const Eigen::Vector3d& mean_255,
                                 std::uint64_t pixel_count, double eps = kDefaultClampEps) {
  if (pixel_count < 1) throw DomainError("pixel count must be positive");
  if (!mean_255.allFinite() || (mean_255.array() < 0.0).any() || (mean_255.array() > 255.0).any()) {
    throw DomainError("channel means must lie in [0, 255]");
  }
  const Eigen::Vector3d unit = mean_255 / 255.0;
  return {std::move(source), mean_255, UnitRgb::clamped(unit[0], unit[1], unit[2], eps), pixel_count};
}

/// Central crop covering `fraction` of each side (at least one pixel).
inline std::array<std::size_t, 4> roi_bounds(std::size_t width, std::size_t height, double fraction) {
  auto side = [&](std::size_t n) {
    const auto kept = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction)));
    const auto k = std::min(kept, n);
    return std::array<std::size_t, 2>{(n - k) / 2, (n - k) / 2 + k};
  };
  const auto [c0, c1] = side(width);
  const auto [r0, r1] = side(height);
  return {r0, r1, c0, c1};
}

/// Per-channel mean over the region of interest. Encoded values are summed
/// as exact integers before one division, so the result does not depend on
/// pixel order; 16-bit samples are brought to 0..255 by dividing by 257.
inline ImageSummary summarize_image(const RgbImage& img, const IngestOptions& opt = {},
                                    std::string source = {}) {
  opt.validate();
  if (img.pixel_count() == 0) throw DomainError("cannot summarize an empty image");
  if (img.samples.size() != img.pixel_count() * 3) throw DomainError("image sample buffer has wrong size");
  if (img.max_value != 255 && img.max_value != 65535) throw DomainError("unsupported sample depth");

  const auto [r0, r1, c0, c1] = roi_bounds(img.width, img.height, opt.roi_fraction);
  const std::uint64_t n = static_cast<std::uint64_t>(r1 - r0) * (c1 - c0);
  const double to_255 = img.max_value == 255 ? 1.0 : 1.0 / 257.0;

  Eigen::Vector3d mean;
  if (!opt.linearize) {
    std::array<std::uint64_t, 3> sums{};
    for (std::size_t y = r0; y < r1; ++y) {
      for (std::size_t x = c0; x < c1; ++x) {
        for (int c = 0; c < 3; ++c) sums[c] += img.at(y, x, c);
      }
    }
    for (int c = 0; c < 3; ++c) mean[c] = static_cast<double>(sums[c]) / static_cast<double>(n) * to_255;
  } else {
    std::vector<double> lut(img.max_value + 1);
    for (std::size_t v = 0; v < lut.size(); ++v) {
      lut[v] = gamma_decode(static_cast<double>(v) / img.max_value);
    }
    std::array<long double, 3> sums{};
    for (std::size_t y = r0; y < r1; ++y) {
      for (std::size_t x = c0; x < c1; ++x) {
        for (int c = 0; c < 3; ++c) sums[c] += lut[img.at(y, x, c)];
      }
    }
    for (int c = 0; c < 3; ++c) {
      mean[c] = std::clamp(255.0 * static_cast<double>(sums[c] / n), 0.0, 255.0);
    }
  }
  return make_summary(std::move(source), mean, n, opt.eps);
}

/// All summarized images of one group, in deterministic file order.
struct ImageGroup {
  std::string label;
  std::vector<ImageSummary> images;

  /// Observations in unit scale (the clamped triples).
  SampleGroup to_sample_group() const {
    std::vector<Eigen::Vector3d> obs;
    obs.reserve(images.size());
    for (const auto& s : images) obs.push_back(s.mean_rgb_unit.vec());
    return {label, std::move(obs)};
  }

  Eigen::Vector3d mean_255() const {
    Eigen::Vector3d m = Eigen::Vector3d::Zero();
    for (const auto& s : images) m += s.mean_rgb_255;
    return m / static_cast<double>(images.size());
  }

  /// Unbiased per-channel variance of the image means, 0..255 scale.
  Eigen::Vector3d variance_255() const {
    if (images.size() < 2) return Eigen::Vector3d::Zero();
    const Eigen::Vector3d m = mean_255();
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    for (const auto& s : images) v += (s.mean_rgb_255 - m).cwiseAbs2();
    return v / static_cast<double>(images.size() - 1);
  }
};

inline std::vector<SampleGroup> to_sample_groups(const std::vector<ImageGroup>& groups) {
  std::vector<SampleGroup> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(g.to_sample_group());
  return out;
}

struct IngestReport {
  std::vector<ImageGroup> groups;
  /// One line per skipped file or rejected group.
  std::vector<std::string> diagnostics;
};

/// One group per immediate subdirectory of `root` (label = directory name),
/// visited in lexicographic order, files likewise. Undecodable files are
/// reported and skipped; groups left with fewer than two images are rejected.
inline IngestReport ingest_directory(const std::filesystem::path& root, const IngestOptions& opt = {}) {
  namespace fs = std::filesystem;
  opt.validate();
  if (!fs::is_directory(root)) throw DomainError("'" + root.string() + "' is not a directory");

  std::vector<fs::path> subdirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) subdirs.push_back(e.path());
  }
  std::sort(subdirs.begin(), subdirs.end());

  IngestReport report;
  for (const auto& dir : subdirs) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());

    ImageGroup group{dir.filename().string(), {}};
    for (const auto& f : files) {
      try {
        group.images.push_back(summarize_image(load_image(f.string()), opt, f.filename().string()));
      } catch (const std::exception& e) {
        report.diagnostics.push_back("skipped " + f.string() + ": " + e.what());
      }
    }
    if (group.images.size() < 2) {
      report.diagnostics.push_back("rejected group '" + group.label + "': " +
                                   std::to_string(group.images.size()) +
                                   " decodable image(s), need at least 2");
      continue;
    }
    report.groups.push_back(std::move(group));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Summaries CSV: group,file,n_pixels,r_mean,g_mean,b_mean
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& summaries_header() {
  static const std::vector<std::string> h{"group", "file", "n_pixels", "r_mean", "g_mean", "b_mean"};
  return h;
}

inline void write_summaries(std::ostream& os, const std::vector<ImageGroup>& groups) {
  auto plain = [](const std::string& field) {
    if (field.find_first_of(",\n\r") != std::string::npos) {
      throw DomainError("label or file name '" + field + "' contains a CSV separator");
    }
    return field;
  };
  os << "group,file,n_pixels,r_mean,g_mean,b_mean\n";
  char buf[160];
  for (const auto& g : groups) {
    plain(g.label);
    for (const auto& s : g.images) {
      plain(s.source);
      std::snprintf(buf, sizeof buf, ",%llu,%.17g,%.17g,%.17g\n",
                    static_cast<unsigned long long>(s.pixel_count), s.mean_rgb_255[0],
                    s.mean_rgb_255[1], s.mean_rgb_255[2]);
      os << g.label << ',' << s.source << buf;
    }
  }
}

/// Groups appear in order of first occurrence. Throws ParseError (with the
/// line number) on malformed rows or out-of-range values.
inline std::vector<ImageGroup> read_summaries(std::istream& in, double eps = kDefaultClampEps) {
  const auto table = detail::read_csv(in, summaries_header());
  std::vector<ImageGroup> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& [line, f] : table.rows) {
    if (f[0].empty()) throw ParseError("empty group label", line);
    const auto n = detail::parse_integer(f[2], line);
    if (n < 1) throw ParseError("n_pixels must be positive", line);
    const Eigen::Vector3d mean(detail::parse_double(f[3], line), detail::parse_double(f[4], line),
                               detail::parse_double(f[5], line));
    ImageSummary s;
    try {
      s = make_summary(f[1], mean, static_cast<std::uint64_t>(n), eps);
    } catch (const DomainError& e) {
      throw ParseError(e.what(), line);
    }
    auto [it, inserted] = index.try_emplace(f[0], groups.size());
    if (inserted) groups.push_back({f[0], {}});
    groups[it->second].images.push_back(std::move(s));
  }
  return groups;
}

}  // namespace pcolor
