#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "spatspec/geometry.hpp"

using namespace spatspec;

namespace {

// Members of {i g_a} ∩ {j g_b} with |psi| <= radius, by direct search.
std::vector<double> brute_intersection(double ga, double gb, double radius) {
  std::vector<double> out;
  const long na = static_cast<long>(std::floor(radius / ga + 1e-12));
  const long nb = static_cast<long>(std::floor(radius / gb + 1e-12));
  for (long i = -na; i <= na; ++i)
    for (long j = -nb; j <= nb; ++j)
      if (std::abs(i * ga - j * gb) <= 1e-9 * std::max(1.0, std::abs(i * ga))) {
        out.push_back(i * ga);
        break;
      }
  return out;
}

}  // namespace

TEST(Geometry, RectangleAreaAndCells) {
  Region r = Region::rectangle(Box{2, {0, 0}, {20, 10}}, Vec2{0.5, 0.25});
  EXPECT_EQ(r.shape()[0], 40);
  EXPECT_EQ(r.shape()[1], 40);
  EXPECT_DOUBLE_EQ(r.area(), 200.0);
  EXPECT_TRUE(r.contains({19.9, 9.9}));
  EXPECT_TRUE(r.contains({20.0, 5.0}));  // closed at the upper edge
  EXPECT_FALSE(r.contains({20.01, 5.0}));
  EXPECT_FALSE(r.contains({-0.1, 5.0}));
}

TEST(Geometry, DefaultDeltaIsMinSideOver256) {
  const Vec2 d = Region::default_delta(Box{2, {0, 0}, {512, 256}});
  EXPECT_DOUBLE_EQ(d[0], 1.0);
  EXPECT_DOUBLE_EQ(d[1], 1.0);
}

TEST(Geometry, MaskedRegionExcludesCells) {
  std::vector<std::uint8_t> mask(16, 1);
  mask[5] = 0;  // cell (1, 1)
  Region r(Box{2, {0, 0}, {4, 4}}, Vec2{1, 1}, mask);
  EXPECT_EQ(r.included_cells(), 15u);
  EXPECT_DOUBLE_EQ(r.area(), 15.0);
  EXPECT_FALSE(r.contains({1.5, 1.5}));
  EXPECT_TRUE(r.contains({2.5, 1.5}));
  Region full = Region::rectangle(Box{2, {0, 0}, {4, 4}}, Vec2{1, 1});
  EXPECT_NE(r.hash(), full.hash());
  EXPECT_EQ(full.hash(), Region::rectangle(Box{2, {0, 0}, {4, 4}}, Vec2{1, 1}).hash());
}

TEST(Geometry, GridNodesInsideMask) {
  std::vector<std::uint8_t> mask(16, 1);
  mask[0] = 0;
  Region r(Box{2, {0, 0}, {4, 4}}, Vec2{1, 1}, mask);
  const GridNodes g = grid_nodes(SamplingScheme::grid(2, {1, 1}, {0.5, 0.5}), r);
  EXPECT_EQ(g.n[0], 4);
  EXPECT_EQ(g.n[1], 4);
  EXPECT_EQ(g.count, 15u);
  EXPECT_FALSE(g.inside[0]);
  EXPECT_THROW(grid_nodes(SamplingScheme::continuous(2), r), ConfigError);
  EXPECT_THROW(grid_nodes(SamplingScheme::grid(2, {10, 10}, {5, 5}), r), ConfigError);
}

TEST(Geometry, NyquistBoxVolume) {
  for (Vec2 d : {Vec2{1, 1}, Vec2{5, 5}, Vec2{10, 15}, Vec2{0.3, 7}}) {
    const Box b = nyquist_box(SamplingScheme::grid(2, d));
    EXPECT_NEAR(b.volume(), 1.0 / (d[0] * d[1]), 1e-12 / (d[0] * d[1]));
  }
  EXPECT_THROW(nyquist_box(SamplingScheme::continuous(2)), ConfigError);
}

TEST(Geometry, AliasPhaseGroupProperty) {
  const auto s = SamplingScheme::grid(2, {10, 15}, {0.3, 3});
  const auto pts = alias_set(s, 0.35);
  const AliasStructure a = AliasStructure::of(s);
  ASSERT_GT(pts.size(), 20u);
  for (const auto& p : pts)
    for (const auto& q : pts) {
      const Vec2 sum{p.psi[0] + q.psi[0], p.psi[1] + q.psi[1]};
      EXPECT_LT(std::abs(a.phase(sum) - p.phase * q.phase), 1e-12);
    }
}

TEST(Geometry, AliasSetPhaseIsExpOfOffset) {
  const auto s = SamplingScheme::grid(2, {5, 5}, {2.5, 1.0});
  for (const auto& p : alias_set(s, 0.5)) {
    const cdouble w = std::polar(1.0, -kTwoPi * (2.5 * p.psi[0] + 1.0 * p.psi[1]));
    EXPECT_LT(std::abs(p.phase - w), 1e-12);
  }
  const auto c = alias_set(SamplingScheme::continuous(2), 10.0);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].psi[0], 0.0);
}

TEST(Geometry, AliasIntersectionMatchesBruteForce) {
  for (int num = 1; num <= 12; ++num)
    for (int den = 1; den <= 12; ++den) {
      const double ratio = static_cast<double>(num) / den;
      const auto a = SamplingScheme::grid(1, {1.0, 1.0});
      const auto b = SamplingScheme::grid(1, {ratio, 1.0});
      const AliasLattice l = alias_intersection(a, b);
      const double radius = 40.0;
      const auto brute = brute_intersection(1.0, 1.0 / ratio, radius);
      const auto pts = l.points({radius, 0.0});
      ASSERT_EQ(pts.size(), brute.size()) << num << "/" << den;
      for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_NEAR(pts[i][0], brute[i], 1e-9);
    }
}

TEST(Geometry, AliasIntersectionTwoDimensional) {
  const auto a = SamplingScheme::grid(2, {5, 5});
  const auto b = SamplingScheme::grid(2, {10, 15});
  const AliasLattice l = alias_intersection(a, b);
  EXPECT_NEAR(l.generator[0], 0.2, 1e-15);
  EXPECT_NEAR(l.generator[1], 0.2, 1e-15);
  const AliasLattice c = alias_intersection(SamplingScheme::grid(2, {1, 1}), SamplingScheme::grid(2, {2, 3}));
  EXPECT_NEAR(c.generator[0], 1.0, 1e-15);
  EXPECT_NEAR(c.generator[1], 1.0, 1e-15);
}

TEST(Geometry, IrrationalRatioGivesTrivialLattice) {
  const AliasLattice l =
      alias_intersection(SamplingScheme::grid(1, {1.0, 1.0}), SamplingScheme::grid(1, {std::sqrt(2.0), 1.0}));
  EXPECT_TRUE(l.trivial());
  EXPECT_TRUE(alias_intersection(SamplingScheme::grid(2, {1, 1}), SamplingScheme::continuous(2)).trivial());
}

TEST(Geometry, RationalApproximation) {
  auto r = rational_approximation(1.5);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->first, 3);
  EXPECT_EQ(r->second, 2);
  r = rational_approximation(7.0 / 11.0);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->first, 7);
  EXPECT_EQ(r->second, 11);
  EXPECT_FALSE(rational_approximation(std::sqrt(2.0)));
  EXPECT_FALSE(rational_approximation(kPi));
}

TEST(Geometry, RegularGridNegation) {
  const auto g = WavenumberGrid::regular(2, {0.01, 0.02}, {3, 2});
  EXPECT_EQ(g.size(), 35u);
  EXPECT_TRUE(g.symmetric());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& k = g[i];
    const auto& m = g[g.negated(i)];
    EXPECT_DOUBLE_EQ(k[0], -m[0]);
    EXPECT_DOUBLE_EQ(k[1], -m[1]);
  }
}

TEST(Geometry, PointGridSymmetryDetection) {
  const auto s = WavenumberGrid::from_points(2, {{0.1, 0.2}, {0, 0}, {-0.1, -0.2}});
  EXPECT_TRUE(s.symmetric());
  EXPECT_EQ(s.negated(0), 2u);
  const auto a = WavenumberGrid::from_points(2, {{0.1, 0.2}, {0.3, 0}});
  EXPECT_FALSE(a.symmetric());
  EXPECT_THROW(a.negated(0), ConfigError);
}

TEST(Geometry, FourierGridStopsAtKmax) {
  const auto g = WavenumberGrid::fourier(Box{2, {0, 0}, {200, 100}}, 2.0, {0.1, 0.1});
  EXPECT_DOUBLE_EQ(g.step()[0], 1.0 / 400.0);
  EXPECT_DOUBLE_EQ(g.step()[1], 1.0 / 200.0);
  EXPECT_EQ(g.half()[0], 40);
  EXPECT_EQ(g.half()[1], 20);
}
