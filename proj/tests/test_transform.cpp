#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spatspec/fft.hpp"
#include "spatspec/nudft.hpp"
#include "spatspec/special.hpp"
#include "spatspec/transform.hpp"

using namespace spatspec;

namespace {

cdouble naive_lattice(const LatticeTransform& t, const Vec2& k) {
  cdouble s = 0.0;
  for (int i1 = 0; i1 < t.n[1]; ++i1)
    for (int i0 = 0; i0 < t.n[0]; ++i0) {
      const double x0 = t.origin[0] + i0 * t.spacing[0];
      const double x1 = t.origin[1] + i1 * t.spacing[1];
      const double ph = x0 * k[0] + (t.dim == 2 ? x1 * k[1] : 0.0);
      s += t.weights[static_cast<std::size_t>(i1) * t.n[0] + i0] * std::polar(1.0, -kTwoPi * ph);
    }
  double sinc_factor = 1.0;
  for (int j = 0; j < t.dim; ++j) {
    const double x = kPi * t.spacing[j] * k[j];
    const double sc = x == 0.0 ? 1.0 : std::sin(x) / x;
    sinc_factor *= std::pow(sc, t.sinc_power);
  }
  return s * sinc_factor * t.scale / t.divisor;
}

LatticeTransform random_lattice(int dim, int sinc_power, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  LatticeTransform t;
  t.dim = dim;
  t.origin = {0.25, dim == 2 ? -1.5 : 0.0};
  t.spacing = {0.5, dim == 2 ? 0.75 : 1.0};
  t.n = {13, dim == 2 ? 9 : 1};
  t.weights.resize(static_cast<std::size_t>(t.n[0]) * t.n[1]);
  for (double& w : t.weights) w = n01(rng);
  t.scale = 0.375;
  t.divisor = 2.0;
  t.sinc_power = sinc_power;
  return t;
}

}  // namespace

TEST(Fft, MatchesNaiveDft) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  const int n0 = 6, n1 = 5;
  std::vector<cdouble> x(n0 * n1);
  for (auto& v : x) v = {n01(rng), n01(rng)};
  auto y = x;
  fft_inplace(y, n0, n1, -1);
  for (int k1 = 0; k1 < n1; ++k1)
    for (int k0 = 0; k0 < n0; ++k0) {
      cdouble s = 0.0;
      for (int a1 = 0; a1 < n1; ++a1)
        for (int a0 = 0; a0 < n0; ++a0)
          s += x[a1 * n0 + a0] * std::polar(1.0, -kTwoPi * (double(k0 * a0) / n0 + double(k1 * a1) / n1));
      EXPECT_LT(std::abs(y[k1 * n0 + k0] - s), 1e-12);
    }
  fft_inplace(y, n0, n1, +1);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LT(std::abs(y[i] / double(n0 * n1) - x[i]), 1e-13);
}

TEST(Fft, GoodSizes) {
  EXPECT_EQ(good_fft_size(1), 1);
  EXPECT_EQ(good_fft_size(11), 12);
  EXPECT_EQ(good_fft_size(97), 98);
  EXPECT_EQ(good_fft_size(1025), 1029);
}

TEST(LatticeTransform, DirectMatchesNaive) {
  std::mt19937_64 rng(5);
  for (int dim : {1, 2})
    for (int p : {0, 1, 2}) {
      const auto t = random_lattice(dim, p, rng);
      for (Vec2 k : {Vec2{0, 0}, Vec2{0.13, -0.41}, Vec2{-2.7, 0.9}, Vec2{0.4, 0}}) {
        if (dim == 1) k[1] = 0.0;
        EXPECT_LT(std::abs(t.at(k) - naive_lattice(t, k)), 1e-12) << dim << " " << p;
      }
    }
}

TEST(LatticeTransform, GridPathsMatchDirect) {
  std::mt19937_64 rng(7);
  for (int dim : {1, 2})
    for (int p : {0, 2}) {
      const auto t = random_lattice(dim, p, rng);
      // 1/(step*spacing) integral selects the FFT path; an odd step forces the separable one.
      for (Vec2 step : {Vec2{0.25, 1.0 / 6.0}, Vec2{0.0137, 0.0291}}) {
        const auto g = WavenumberGrid::regular(dim, step, {7, dim == 2 ? 5 : 0});
        const auto fast = t.on(g);
        const auto direct = t.at_points(g.points());
        ASSERT_EQ(fast.size(), g.size());
        for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LT(std::abs(fast[i] - direct[i]), 1e-11);
      }
    }
}

TEST(LatticeTransform, Commensurate) {
  EXPECT_EQ(LatticeTransform::commensurate(0.25, 0.5), 8);
  EXPECT_EQ(LatticeTransform::commensurate(0.0137, 0.5), 0);
}

TEST(Nudft, DirectMatchesNaive) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  std::vector<Vec2> x(40);
  std::vector<double> c(40);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = {u(rng), u(rng)};
    c[i] = u(rng) / 50.0;
  }
  const std::vector<Vec2> ks{{0, 0}, {0.1, -0.03}, {-0.21, 0.17}};
  const auto s = nudft_direct(x, c, ks, 2);
  for (std::size_t k = 0; k < ks.size(); ++k) {
    cdouble ref = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      ref += c[i] * std::polar(1.0, -kTwoPi * (x[i][0] * ks[k][0] + x[i][1] * ks[k][1]));
    EXPECT_LT(std::abs(s[k] - ref), 1e-12);
  }
}

TEST(Nudft, GriddingMatchesDirect) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ux(0.0, 200.0), uy(0.0, 100.0);
  for (int dim : {1, 2}) {
    std::vector<Vec2> x(300);
    std::vector<double> c(300);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = {ux(rng), dim == 2 ? uy(rng) : 0.0};
      c[i] = 1.0 + 0.1 * std::cos(static_cast<double>(i));
    }
    const auto g = WavenumberGrid::regular(dim, {0.004, 0.005}, {40, dim == 2 ? 30 : 0});
    const auto direct = nudft_direct(x, c, g.points(), dim);
    const auto grid = nudft_gridding(x, c, g);
    double scale = 0.0, err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      scale = std::max(scale, std::abs(direct[i]));
      err = std::max(err, std::abs(direct[i] - grid[i]));
    }
    EXPECT_LT(err / scale, 1e-9) << "dim " << dim;
  }
}

TEST(Nudft, ManyMatchesSingle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  std::vector<Vec2> x(70);
  for (auto& p : x) p = {u(rng), u(rng)};
  std::vector<std::vector<double>> cs(3, std::vector<double>(x.size()));
  for (auto& c : cs)
    for (double& v : c) v = u(rng);
  const auto g = WavenumberGrid::regular(2, {0.02, 0.03}, {9, 6});
  for (auto method : {NudftMethod::Direct, NudftMethod::Gridding}) {
    NudftOptions opt;
    opt.method = method;
    const auto many = nudft_many(x, cs, g, opt);
    for (std::size_t j = 0; j < cs.size(); ++j) {
      const auto ref = nudft_direct(x, cs[j], g.points(), 2);
      for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LT(std::abs(many[j][i] - ref[i]), 1e-8);
    }
  }
}

TEST(Special, BallKernelLimits) {
  EXPECT_NEAR(ball_kernel(0.0, 0.05, 1), 0.1, 1e-15);
  EXPECT_NEAR(ball_kernel(0.0, 0.05, 2), kPi * 0.05 * 0.05, 1e-15);
  EXPECT_NEAR(ball_kernel(1e-9, 0.05, 2), kPi * 0.05 * 0.05, 1e-12);
  EXPECT_NEAR(ball_kernel(3.0, 0.05, 1), std::sin(kTwoPi * 0.15) / (kPi * 3.0), 1e-15);
}

TEST(Special, BesselValues) {
  EXPECT_NEAR(bessel_j0(2.404825557695773), 0.0, 1e-14);
  EXPECT_NEAR(bessel_j1(1.0), 0.44005058574493355, 1e-15);
  // K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}
  for (double x : {0.1, 1.0, 7.5}) EXPECT_NEAR(bessel_k(0.5, x), std::sqrt(kPi / (2 * x)) * std::exp(-x), 1e-13);
  EXPECT_NEAR(sinc(0.0), 1.0, 0.0);
}
