#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "pcolor/colorimetry.hpp"
#include "support.hpp"

using namespace pcolor;
using pcolor::testing::rel_err;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ColorMatchingFunctions constant_cmf(double lo, double hi, std::size_t n = 2) {
  auto one = [](double) { return 1.0; };
  return {SpectralDistribution::sample(one, lo, hi, n), SpectralDistribution::sample(one, lo, hi, n),
          SpectralDistribution::sample(one, lo, hi, n)};
}

ColorMatchingFunctions cie1931() { return load_cmf_csv(PCOLOR_CMF_CSV); }

double ramp(double l) { return 0.5 + (l - 360.0) / 470.0; }

}  // namespace

TEST_CASE("constant spectrum against constant CMF integrates to the interval length") {
  const auto spd = SpectralDistribution::sample([](double) { return 1.0; }, 400, 700, 61);
  const auto t = integrate_tristimulus(spd, constant_cmf(400, 700));
  CHECK_THAT(t.y(), WithinRel(300.0, 1e-14));
  CHECK_THAT(t.x(), WithinRel(300.0, 1e-14));
}

TEST_CASE("trapezoid is exact for a linear integrand") {
  const SpectralDistribution spd({0.0, 1.0}, {0.0, 1.0});
  const auto t = integrate_tristimulus(spd, constant_cmf(0, 1));
  CHECK_THAT(t.x(), WithinRel(0.5, 1e-15));
}

TEST_CASE("trapezoid is exact when the product is piecewise linear on the grid") {
  // Piecewise-linear SPD sharing the CMF grid; constant CMF -> linear product per cell.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> val(0.1, 5.0);
  std::vector<double> w, v;
  for (int i = 0; i <= 30; ++i) {
    w.push_back(400.0 + 10.0 * i);
    v.push_back(val(rng));
  }
  const SpectralDistribution spd(w, v);
  const auto t = integrate_tristimulus(spd, constant_cmf(400, 700, 31));
  const double oracle = pcolor::testing::riemann([&](double l) { return pcolor::testing::lerp_table(w, v, l); },
                                                 400, 700, 0.5);
  CHECK(rel_err(t.y(), oracle) < 1e-12);
}

TEST_CASE("tristimulus of a ramp against CIE 1931 matches the brute-force reference") {
  const auto cmf = cie1931();
  const auto spd = SpectralDistribution::sample(ramp, 360, 830, 95);
  const auto t = integrate_tristimulus(spd, cmf, Normalization::y100);
  CHECK_THAT(t.y(), WithinRel(100.0, 1e-12));
  // Frozen from tests/oracles/tristimulus_oracle.py (0.1 nm midpoint sum).
  CHECK(rel_err(t.x(), 102.664933826) < 1e-3);
  CHECK(rel_err(t.z(), 75.6382479537) < 1e-3);

  // Same oracle evaluated in-process.
  std::vector<double> lam(cmf.wavelengths().begin(), cmf.wavelengths().end());
  std::array<double, 3> ref{};
  for (int c = 0; c < 3; ++c) {
    std::vector<double> col(cmf[c].values().begin(), cmf[c].values().end());
    ref[c] = pcolor::testing::riemann([&](double l) { return ramp(l) * pcolor::testing::lerp_table(lam, col, l); },
                                      360, 830, 0.1);
  }
  const double k = 100.0 / ref[1];
  CHECK(rel_err(t.x(), k * ref[0]) < 1e-3);
  CHECK(rel_err(t.z(), k * ref[2]) < 1e-3);
}

TEST_CASE("integration is homogeneous and additive in the spectrum") {
  const auto cmf = cie1931();
  const auto a = SpectralDistribution::sample(ramp, 380, 780, 81);
  const auto b = SpectralDistribution::sample([](double l) { return 1.0 + std::sin(l / 37.0); }, 380, 780, 81);
  std::vector<double> sum(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) sum[i] = a.values()[i] + b.values()[i];
  const SpectralDistribution ab({a.wavelengths().begin(), a.wavelengths().end()}, sum);

  const auto ta = integrate_tristimulus(a, cmf).vec();
  const auto tb = integrate_tristimulus(b, cmf).vec();
  CHECK(pcolor::testing::max_rel_err(integrate_tristimulus(a.scaled(3.7), cmf).vec(), 3.7 * ta) < 1e-12);
  CHECK(pcolor::testing::max_rel_err(integrate_tristimulus(ab, cmf).vec(), ta + tb) < 1e-12);
}

TEST_CASE("integration only covers the wavelength overlap") {
  const auto spd = SpectralDistribution::sample([](double) { return 1.0; }, 450, 650, 5);
  const auto t = integrate_tristimulus(spd, constant_cmf(400, 700, 31));
  CHECK_THAT(t.y(), WithinRel(200.0, 1e-13));
}

TEST_CASE("integration errors") {
  const auto cmf = constant_cmf(400, 700);
  SECTION("disjoint ranges") {
    const auto spd = SpectralDistribution::sample([](double) { return 1.0; }, 100, 200, 3);
    CHECK_THROWS_AS(integrate_tristimulus(spd, cmf), DomainError);
  }
  SECTION("zero spectrum") {
    const auto spd = SpectralDistribution::sample([](double) { return 0.0; }, 400, 700, 3);
    CHECK_THROWS_AS(integrate_tristimulus(spd, cmf), DomainError);
    CHECK_THROWS_AS(integrate_tristimulus(spd, cmf, Normalization::y100), DomainError);
  }
  SECTION("bad k") {
    const auto spd = SpectralDistribution::sample([](double) { return 1.0; }, 400, 700, 3);
    CHECK_THROWS_AS(integrate_tristimulus(spd, cmf, -1.0), DomainError);
  }
}

TEST_CASE("spectral distribution invariants") {
  CHECK_THROWS_AS(SpectralDistribution({400.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(SpectralDistribution({400.0, 500.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(SpectralDistribution({500.0, 400.0}, {1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(SpectralDistribution({400.0, 400.0}, {1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(SpectralDistribution({400.0, 500.0}, {1.0, -0.1}), DomainError);
  const auto a = SpectralDistribution::sample([](double) { return 1.0; }, 400, 700, 3);
  const auto b = SpectralDistribution::sample([](double) { return 1.0; }, 400, 700, 4);
  CHECK_THROWS_AS(ColorMatchingFunctions(a, a, b), DomainError);
}

TEST_CASE("CMF CSV parsing") {
  SECTION("bundled table") {
    const auto cmf = cie1931();
    CHECK(cmf.lower() == 360.0);
    CHECK(cmf.upper() == 830.0);
    CHECK(cmf.wavelengths().size() == 95);
    CHECK(cmf[1](555.0) == 1.0);
  }
  SECTION("wrong header") {
    std::istringstream in("lambda,x,y,z\n400,1,1,1\n");
    CHECK_THROWS_AS(read_cmf_csv(in), ParseError);
  }
  SECTION("bad number reports its line") {
    std::istringstream in("wavelength_nm,xbar,ybar,zbar\n400,1,1,1\n\n410,1,oops,1\n");
    try {
      read_cmf_csv(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
    }
  }
  SECTION("non-monotone wavelengths") {
    std::istringstream in("wavelength_nm,xbar,ybar,zbar\n410,1,1,1\n400,1,1,1\n");
    CHECK_THROWS_AS(read_cmf_csv(in), ParseError);
  }
}

TEST_CASE("XYZ to linear RGB uses the sRGB matrix") {
  const auto c = xyz_to_linear_rgb({1.0, 1.0, 1.0});
  CHECK_THAT(c.r, WithinAbs(1.2048, 1e-12));
  CHECK_THAT(c.g, WithinAbs(0.9484, 1e-12));
  CHECK_THAT(c.b, WithinAbs(0.9087, 1e-12));
  CHECK(xyz_to_rgb_matrix() * Eigen::Vector3d::Zero() == Eigen::Vector3d::Zero());
  CHECK(xyz_to_rgb_matrix()(0, 0) == 3.2406);
  CHECK(xyz_to_rgb_matrix()(2, 2) == 1.0570);
}

TEST_CASE("the inverse matrix is an exact inverse") {
  const Eigen::Matrix3d prod = xyz_to_rgb_matrix() * rgb_to_xyz_matrix();
  CHECK((prod - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::Matrix3d prod2 = rgb_to_xyz_matrix() * xyz_to_rgb_matrix();
  CHECK((prod2 - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("XYZ <-> linear RGB round trips and is linear") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(0.01, 2.0);
  for (int i = 0; i < 200; ++i) {
    const Tristimulus x(pos(rng), pos(rng), pos(rng));
    const Tristimulus y(pos(rng), pos(rng), pos(rng));
    const double a = pos(rng), b = pos(rng);
    const auto back = linear_rgb_to_xyz(xyz_to_linear_rgb(x));
    CHECK(pcolor::testing::max_rel_err(back.vec(), x.vec()) < 1e-10);

    const Eigen::Vector3d lhs = xyz_to_linear_rgb(Tristimulus(a * x.vec() + b * y.vec())).vec();
    const Eigen::Vector3d rhs = a * xyz_to_linear_rgb(x).vec() + b * xyz_to_linear_rgb(y).vec();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + rhs.cwiseAbs().maxCoeff()));
  }
  const LinearRgb m123 = LinearRgb::from(xyz_to_rgb_matrix() * Eigen::Vector3d(1, 2, 3));
  CHECK(pcolor::testing::max_rel_err(linear_rgb_to_xyz(m123).vec(), {1, 2, 3}) < 1e-12);
  CHECK(pcolor::testing::max_rel_err(linear_rgb_to_xyz({1.2048, 0.9484, 0.9087}).vec(), {1, 1, 1}) < 1e-12);
}

TEST_CASE("linear RGB outside the XYZ octant is rejected") {
  CHECK_THROWS_AS(linear_rgb_to_xyz({-1.0, 0.1, 0.1}), DomainError);
  CHECK_THROWS_AS(linear_rgb_to_xyz({0.0, 0.0, 0.0}), DomainError);
}

TEST_CASE("gamma encode values") {
  CHECK(gamma_encode(0.0) == 0.0);
  CHECK(gamma_encode(1.0) == 1.0);
  CHECK_THAT(gamma_encode(kGammaKnot), WithinAbs(0.0404500, 1e-7));
  CHECK_THAT(gamma_encode(0.2), WithinAbs(0.4845, 1e-4));
  CHECK_THAT(gamma_encode(0.2), WithinRel(0.48452920448170694, 1e-14));
  CHECK_THROWS_AS(gamma_encode(-1e-9), DomainError);
  CHECK_THROWS_AS(gamma_encode(1.0 + 1e-9), DomainError);
}

TEST_CASE("gamma branches nearly agree at the knot") {
  const double linear_branch = 323.0 * kGammaKnot / 25.0;
  const double power_branch = (211.0 * std::pow(kGammaKnot, 5.0 / 12.0) - 11.0) / 200.0;
  CHECK(std::abs(linear_branch - power_branch) <= 1e-4);
  CHECK(kGammaDecodeKnot == linear_branch);
}

TEST_CASE("gamma decode values") {
  CHECK(gamma_decode(0.0) == 0.0);
  CHECK(gamma_decode(1.0) == 1.0);
  CHECK_THAT(gamma_decode(gamma_encode(0.5)), WithinAbs(0.5, 1e-12));
  CHECK_THROWS_AS(gamma_decode(1.5), DomainError);
}

TEST_CASE("gamma round trips and increases on a 10^4 grid") {
  constexpr int n = 10000;
  double prev = -1.0;
  for (int i = 0; i <= n; ++i) {
    const double u = static_cast<double>(i) / n;
    const double v = gamma_encode(u);
    CHECK(v > prev);
    prev = v;
    CHECK(std::abs(gamma_decode(v) - u) <= 1e-12);
    CHECK(std::abs(gamma_encode(gamma_decode(u)) - u) <= 1e-12);
  }
}

TEST_CASE("XYZ <-> sRGB round trip inside the gamut") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lin(0.02, 0.98);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Vector3d rgb(lin(rng), lin(rng), lin(rng));
    const Tristimulus xyz(rgb_to_xyz_matrix() * rgb);
    const auto enc = xyz_to_srgb(xyz);
    CHECK_FALSE(enc.clamped);
    CHECK(pcolor::testing::max_rel_err(srgb_to_xyz(enc.rgb).vec(), xyz.vec()) <= 1e-9);
  }
}

TEST_CASE("mid-gray encodes to about 0.4845") {
  const Tristimulus gray(rgb_to_xyz_matrix() * Eigen::Vector3d::Constant(0.2));
  const auto enc = xyz_to_srgb(gray);
  for (int i = 0; i < 3; ++i) CHECK_THAT(enc.rgb[i], WithinAbs(0.4845, 1e-4));
}

TEST_CASE("out-of-gamut XYZ is clamped and flagged") {
  const auto sat = xyz_to_srgb({0.1, 0.9, 0.1});  // negative red and blue
  CHECK(sat.clamped);
  CHECK(sat.rgb.u() == kDefaultClampEps);
  const auto bright = xyz_to_srgb({5.0, 5.0, 5.0});
  CHECK(bright.clamped);
  CHECK(bright.rgb.v() == 1.0 - kDefaultClampEps);
}
