#pragma once

// Command-line front end. `run` is the whole program; tools/pcolor.cpp only
// forwards argv to it.
//
// Exit codes: 0 success, 1 domain or data error, 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pcolor/colorimetry.hpp"
#include "pcolor/error.hpp"
#include "pcolor/ingest.hpp"
#include "pcolor/mvstat.hpp"
#include "pcolor/perceptual_space.hpp"

namespace pcolor::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable naming the default CMF table for `convert`.
inline constexpr const char* kCmfEnv = "PCOLOR_CMF";

inline constexpr std::uint64_t kDefaultSeed = 20211019;

struct RunConfig {
  double eps = kDefaultClampEps;
  Normalization normalization = Normalization::unit;
  Transform transform = Transform::loglog;
  bool singular_fallback = false;
  double roi_fraction = 1.0;
  std::string summaries_out;
  std::string stats_out;
  std::string t2_out;
  std::string p_out;

  void validate() const {
    if (!(eps > 0.0 && eps < 0.5)) throw DomainError("--eps must lie in (0, 0.5)");
    if (!(roi_fraction > 0.0 && roi_fraction <= 1.0)) throw DomainError("--roi must lie in (0, 1]");
  }
};

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline std::string fmt3(const Eigen::Vector3d& v) {
  return fmt(v[0]) + " " + fmt(v[1]) + " " + fmt(v[2]);
}

inline std::vector<ImageGroup> load_summaries(const std::string& path, double eps) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open summaries file '" + path + "'");
  return read_summaries(in, eps);
}

template <class F>
void write_file(const std::string& path, F&& body) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot write '" + path + "'");
  body(os);
  if (!os) throw ParseError("failed writing '" + path + "'");
}

inline const SampleGroup& find_group(const std::vector<SampleGroup>& groups, const std::string& label) {
  for (const auto& g : groups) {
    if (g.label() == label) return g;
  }
  throw DomainError("no group labeled '" + label + "'");
}

inline void add_transform_option(CLI::App& app, std::string& target) {
  app.add_option("--transform", target, "Observation transform before testing")
      ->check(CLI::IsMember({"none", "h", "loglog"}))
      ->capture_default_str();
}

// ---------------------------------------------------------------------------

inline int convert(const std::string& direction, const std::vector<double>& values,
                   const std::string& spd_path, std::string cmf_path, const std::string& normalize,
                   const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (direction == "spectral2xyz") {
    if (spd_path.empty()) throw CLI::ValidationError("--spd", "required for spectral2xyz");
    if (cmf_path.empty()) {
      const char* env = std::getenv(kCmfEnv);
      if (env == nullptr || *env == '\0') {
        throw CLI::ValidationError("--cmf", std::string("required (or set ") + kCmfEnv + ")");
      }
      cmf_path = env;
    }
    const auto spd = load_spd_csv(spd_path);
    const auto cmf = load_cmf_csv(cmf_path);
    const auto mode = normalize == "Y100" ? Normalization::y100 : Normalization::unit;
    out << fmt3(integrate_tristimulus(spd, cmf, mode).vec()) << '\n';
    return kExitOk;
  }
  if (values.size() != 3) throw CLI::ValidationError("values", "expected exactly three numbers");
  if (direction == "xyz2srgb") {
    const auto res = xyz_to_srgb(Tristimulus(values[0], values[1], values[2]), cfg.eps);
    out << fmt3(res.rgb.vec()) << '\n';
    if (res.clamped) err << "warning: color clamped into the sRGB gamut\n";
    return kExitOk;
  }
  // srgb2xyz: encoded values in [0,1], pulled inside the open cube.
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("sRGB components must lie in [0,1]");
  }
  out << fmt3(srgb_to_xyz(UnitRgb::clamped(values[0], values[1], values[2], cfg.eps)).vec()) << '\n';
  return kExitOk;
}

inline int ingest(const std::string& root, bool linearize, const RunConfig& cfg, std::ostream& out,
                  std::ostream& err) {
  IngestOptions opt{cfg.eps, linearize, cfg.roi_fraction};
  const auto report = ingest_directory(root, opt);
  for (const auto& d : report.diagnostics) err << "warning: " << d << '\n';
  if (report.groups.empty()) {
    err << "error: no group with at least two decodable images under '" << root << "'\n";
    return kExitData;
  }
  for (const auto& g : report.groups) {
    out << "group " << g.label << '\n'
        << "  n        " << g.images.size() << '\n'
        << "  mean     " << fmt3(g.mean_255()) << '\n'
        << "  variance " << fmt3(g.variance_255()) << '\n';
  }
  if (!cfg.summaries_out.empty()) {
    write_file(cfg.summaries_out, [&](std::ostream& os) { write_summaries(os, report.groups); });
  }
  if (!cfg.stats_out.empty()) {
    write_file(cfg.stats_out, [&](std::ostream& os) {
      os << "group,n,r_mean,g_mean,b_mean,r_var,g_var,b_var\n";
      for (const auto& g : report.groups) {
        const auto m = g.mean_255();
        const auto v = g.variance_255();
        os << g.label << ',' << g.images.size();
        for (int c = 0; c < 3; ++c) os << ',' << fmt(m[c]);
        for (int c = 0; c < 3; ++c) os << ',' << fmt(v[c]);
        os << '\n';
      }
    });
  }
  return kExitOk;
}

inline int transform(const std::vector<double>& values, const std::string& summaries,
                     const RunConfig& cfg, std::ostream& out) {
  if (!summaries.empty()) {
    const auto groups = load_summaries(summaries, cfg.eps);
    out << "group,file,c1,c2,c3\n";
    for (const auto& g : groups) {
      for (const auto& s : g.images) {
        const auto t = apply_transform(s.mean_rgb_unit.vec(), cfg.transform, cfg.eps);
        out << g.label << ',' << s.source << ',' << fmt(t[0]) << ',' << fmt(t[1]) << ',' << fmt(t[2])
            << '\n';
      }
    }
    return kExitOk;
  }
  if (values.size() != 3) throw CLI::ValidationError("values", "expected three numbers or --summaries");
  const UnitRgb c(values[0], values[1], values[2]);
  out << fmt3(apply_transform(c.vec(), cfg.transform, cfg.eps)) << '\n';
  return kExitOk;
}

inline int test(const std::string& summaries, const std::string& a, const std::string& b,
                const RunConfig& cfg, std::ostream& out) {
  const auto groups = to_sample_groups(load_summaries(summaries, cfg.eps));
  const auto ga = apply_transform(find_group(groups, a), cfg.transform, cfg.eps);
  const auto gb = apply_transform(find_group(groups, b), cfg.transform, cfg.eps);
  const auto r = hotelling_t2(ga, gb, T2Options{cfg.singular_fallback});
  out << "groups        " << a << " vs " << b << '\n'
      << "transform     " << to_string(cfg.transform) << '\n'
      << "n1 n2 p       " << r.n1 << ' ' << r.n2 << ' ' << r.p << '\n'
      << "T2            " << fmt(r.t2) << '\n'
      << "F             " << fmt(r.f_stat) << " on (" << fmt(r.df1) << ", " << fmt(r.df2) << ") df\n"
      << "p-value       " << fmt(r.p_value) << '\n'
      << "ridge         " << (r.singular_fallback ? "yes" : "no") << '\n';
  return kExitOk;
}

inline int pairwise(const std::string& summaries, const RunConfig& cfg, std::ostream& out,
                    std::ostream& err) {
  const auto groups = to_sample_groups(load_summaries(summaries, cfg.eps));
  const auto m = pairwise_t2(groups, cfg.transform, T2Options{cfg.singular_fallback}, cfg.eps);
  if (cfg.t2_out.empty()) {
    write_matrix_csv(out, m.labels, m.t2);
  } else {
    write_file(cfg.t2_out, [&](std::ostream& os) { write_matrix_csv(os, m.labels, m.t2); });
  }
  if (!cfg.p_out.empty()) {
    write_file(cfg.p_out, [&](std::ostream& os) { write_matrix_csv(os, m.labels, m.p_values); });
  }
  for (const auto& f : m.failures) {
    err << "warning: cell (" << m.labels[f.i] << ", " << m.labels[f.j] << "): " << f.message << '\n';
  }
  for (const auto& [i, j] : m.ridge_cells) {
    err << "warning: cell (" << m.labels[i] << ", " << m.labels[j] << ") used the ridge fallback\n";
  }
  const auto warnings = m.failures.size() + m.ridge_cells.size();
  if (warnings > 0) err << warnings << " warning(s)\n";
  return kExitOk;
}

inline PositiveTriple parse_triple(const std::string& s) {
  const auto fields = pcolor::detail::split_fields(s);
  if (fields.size() != 3) throw DomainError("triple '" + s + "' must have three comma-separated values");
  return {pcolor::detail::parse_double(fields[0], 0), pcolor::detail::parse_double(fields[1], 0),
          pcolor::detail::parse_double(fields[2], 0)};
}

inline int axioms(std::uint64_t seed, std::size_t samples, const std::vector<std::string>& extra,
                  std::ostream& out) {
  std::vector<PositiveTriple> sample;
  for (const auto& s : extra) sample.push_back(parse_triple(s));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_coord(std::log(1e-3), std::log(1e3));
  std::uniform_real_distribution<double> scalar(0.0, 10.0);
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = std::exp(log_coord(rng));
    const double y = std::exp(log_coord(rng));
    const double z = std::exp(log_coord(rng));
    sample.emplace_back(x, y, z);
  }
  std::vector<double> scalars;
  for (int i = 0; i < 16; ++i) {
    double a = 0.0;
    while (!(a > 0.0)) a = scalar(rng);
    scalars.push_back(a);
  }
  scalars.push_back(10.0);

  const auto report = check_axioms(sample, scalars);
  out << "seed " << seed << ", " << sample.size() << " triples, " << scalars.size() << " scalars\n";
  for (const auto& v : report.verdicts) {
    out << "axiom " << v.axiom << " (" << v.name << "): " << (v.passed ? "PASS" : "FAIL") << " ["
        << v.checks << " checks]\n";
    if (v.counterexample) out << "  counterexample: " << *v.counterexample << '\n';
  }
  return report.all_passed() ? kExitOk : kExitData;
}

}  // namespace detail

/// Runs the command line `args` (without the program name).
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Colorimetry, perceived-color group model and Hotelling T^2 testing", "pcolor"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string transform_name = "loglog";
  std::string normalize = "unit";

  auto* convert = app.add_subcommand("convert", "Spectral -> XYZ, XYZ -> sRGB or sRGB -> XYZ");
  std::string direction;
  std::vector<double> values;
  std::string spd_path;
  std::string cmf_path;
  convert->add_option("--direction", direction, "spectral2xyz, xyz2srgb or srgb2xyz")
      ->required()
      ->check(CLI::IsMember({"spectral2xyz", "xyz2srgb", "srgb2xyz"}));
  convert->add_option("values", values, "Input triple");
  convert->add_option("--spd", spd_path, "SPD CSV (wavelength_nm,value)");
  convert->add_option("--cmf", cmf_path, std::string("CMF CSV; defaults to $") + kCmfEnv);
  convert->add_option("--normalize", normalize, "unit (k = 1) or Y100")
      ->check(CLI::IsMember({"unit", "Y100"}))
      ->capture_default_str();
  convert->add_option("--eps", cfg.eps, "Open-interval clamp epsilon")->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "Summarize one image group per subdirectory");
  std::string root;
  bool linearize = false;
  ingest->add_option("root", root, "Directory with one subdirectory per group")->required();
  ingest->add_option("--out", cfg.summaries_out, "Summaries CSV to write");
  ingest->add_option("--stats-out", cfg.stats_out, "Per-group mean/variance CSV to write");
  ingest->add_flag("--linearize", linearize, "Average gamma-decoded values");
  ingest->add_option("--roi", cfg.roi_fraction, "Central crop fraction in (0,1]")->capture_default_str();
  ingest->add_option("--eps", cfg.eps, "Open-interval clamp epsilon")->capture_default_str();

  auto* transform = app.add_subcommand("transform", "Apply h or log(-log) to a triple or a summaries CSV");
  std::vector<double> tvalues;
  std::string tsummaries;
  transform->add_option("values", tvalues, "Unit RGB triple in (0,1)");
  transform->add_option("--summaries", tsummaries, "Summaries CSV");
  detail::add_transform_option(*transform, transform_name);
  transform->add_option("--eps", cfg.eps, "Open-interval clamp epsilon")->capture_default_str();

  auto* test = app.add_subcommand("test", "Hotelling T^2 between two groups of a summaries CSV");
  std::string summaries;
  std::string group_a;
  std::string group_b;
  test->add_option("--summaries", summaries, "Summaries CSV")->required();
  test->add_option("--group-a", group_a, "First group label")->required();
  test->add_option("--group-b", group_b, "Second group label")->required();
  detail::add_transform_option(*test, transform_name);
  test->add_flag("--ridge", cfg.singular_fallback, "Ridge fallback for singular covariance");
  test->add_option("--eps", cfg.eps, "Open-interval clamp epsilon")->capture_default_str();

  auto* pairwise = app.add_subcommand("pairwise", "Pairwise T^2 and p-value matrices");
  pairwise->add_option("--summaries", summaries, "Summaries CSV")->required();
  detail::add_transform_option(*pairwise, transform_name);
  pairwise->add_option("--t2-out", cfg.t2_out, "T^2 matrix CSV (stdout if omitted)");
  pairwise->add_option("--p-out", cfg.p_out, "p-value matrix CSV");
  pairwise->add_flag("--ridge", cfg.singular_fallback, "Ridge fallback for singular covariance");
  pairwise->add_option("--eps", cfg.eps, "Open-interval clamp epsilon")->capture_default_str();

  auto* axioms = app.add_subcommand("axioms", "Check the cone-model axioms on random samples");
  std::uint64_t seed = kDefaultSeed;
  std::size_t samples = 200;
  std::vector<std::string> triples;
  axioms->add_option("--seed", seed, "RNG seed")->capture_default_str();
  axioms->add_option("--samples", samples, "Random triples to draw")->capture_default_str();
  axioms->add_option("--triple", triples, "Extra triple x,y,z (repeatable)");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    cfg.transform = parse_transform(transform_name);
    cfg.normalization = normalize == "Y100" ? Normalization::y100 : Normalization::unit;
    cfg.validate();
    if (*convert) {
      return detail::convert(direction, values, spd_path, cmf_path, normalize, cfg, out, err);
    }
    if (*ingest) return detail::ingest(root, linearize, cfg, out, err);
    if (*transform) return detail::transform(tvalues, tsummaries, cfg, out);
    if (*test) return detail::test(summaries, group_a, group_b, cfg, out);
    if (*pairwise) return detail::pairwise(summaries, cfg, out, err);
    if (*axioms) return detail::axioms(seed, samples, triples, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace pcolor::cli
