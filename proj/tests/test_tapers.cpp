#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "spatspec/special.hpp"
#include "spatspec/tapers.hpp"

using namespace spatspec;

namespace {

Region small_rect() { return Region::rectangle(Box{2, {0, 0}, {20, 10}}, Vec2{1, 1}); }

Region holed() {
  std::vector<std::uint8_t> mask(24 * 16, 1);
  for (int i1 = 0; i1 < 16; ++i1)
    for (int i0 = 0; i0 < 24; ++i0)
      if ((i0 >= 14 && i1 >= 9) || std::hypot(i0 + 0.5 - 7, i1 + 0.5 - 8) < 3) mask[i1 * 24 + i0] = 0;
  return Region(Box{2, {0, 0}, {24, 16}}, Vec2{1, 1}, mask);
}

TaperOptions opts(double b, int count = 0, double threshold = 0.99) {
  TaperOptions o;
  o.bandwidth = b;
  o.count = count;
  o.threshold = threshold;
  return o;
}

// Untruncated multilinear interpolant through the cell centres, integrated
// with two-point Gauss rules on each interval between centres (exact for
// the piecewise bi-quadratic product).
double interpolated_inner(const TaperFamily& f, int a, int b) {
  const auto& r = f.region;
  const auto shape = r.shape();
  const Vec2 d = r.delta_ref();
  auto val = [&](const std::vector<double>& h, int i0, int i1) {
    if (i0 < 0 || i1 < 0 || i0 >= shape[0] || i1 >= shape[1]) return 0.0;
    return h[r.index(i0, i1)];
  };
  auto interp = [&](const std::vector<double>& h, int c0, int c1, double t0, double t1) {
    return (1 - t0) * (1 - t1) * val(h, c0, c1) + t0 * (1 - t1) * val(h, c0 + 1, c1) +
           (1 - t0) * t1 * val(h, c0, c1 + 1) + t0 * t1 * val(h, c0 + 1, c1 + 1);
  };
  const double g[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  double s = 0.0;
  for (int c1 = -1; c1 < shape[1]; ++c1)
    for (int c0 = -1; c0 < shape[0]; ++c0)
      for (double t0 : g)
        for (double t1 : g)
          s += 0.25 * interp(f.values[a], c0, c1, t0, t1) * interp(f.values[b], c0, c1, t0, t1);
  return s * d[0] * d[1] * f.norm_scale * f.norm_scale;
}

}  // namespace

TEST(Tapers, DenseEigenResiduals) {
  const Region r = small_rect();
  const TaperFamily f = compute_tapers(r, opts(0.15));
  ASSERT_GE(f.count(), 3);
  const Eigen::MatrixXd a = concentration_matrix(r, 0.15);
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < r.lattice_size(); ++i)
    if (r.mask()[i]) cells.push_back(i);
  for (int m = 0; m < f.count(); ++m) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(cells.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) v[static_cast<Eigen::Index>(c)] = f.values[m][cells[c]];
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    EXPECT_LT((a * v - f.concentrations[m] * v).norm(), 1e-10);
    EXPECT_GE(f.concentrations[m], 0.99);
    if (m > 0) {
      EXPECT_LE(f.concentrations[m], f.concentrations[m - 1]);
    }
  }
}

TEST(Tapers, ConcentrationMatrixEntries) {
  const Region r = Region::rectangle(Box{2, {0, 0}, {4, 3}}, Vec2{1, 1});
  const Eigen::MatrixXd a = concentration_matrix(r, 0.2);
  ASSERT_EQ(a.rows(), 12);
  // Cells 0 and 5 are (0,0) and (1,1).
  EXPECT_NEAR(a(0, 0), kPi * 0.04, 1e-14);
  EXPECT_NEAR(a(0, 5), ball_kernel(std::sqrt(2.0), 0.2, 2), 1e-14);
  EXPECT_NEAR(a(5, 0), a(0, 5), 0.0);
}

TEST(Tapers, OperatorMatchesDenseMatrix) {
  const Region r = holed();
  const Eigen::MatrixXd a = concentration_matrix(r, 0.12);
  const ConcentrationOperator op(r, 0.12);
  ASSERT_EQ(static_cast<Eigen::Index>(op.size()), a.rows());
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(a.rows(), -1.0, 2.0).array().sin();
  Eigen::VectorXd y;
  op.apply(x, y);
  EXPECT_LT((y - a * x).norm(), 1e-11 * (a * x).norm());
}

TEST(Tapers, LanczosAgreesWithDense) {
  const Region r = holed();
  TaperOptions dense = opts(0.2, 4, 0.9);
  TaperOptions sparse = dense;
  sparse.dense_limit = 0;
  const TaperFamily a = compute_tapers(r, dense);
  const TaperFamily b = compute_tapers(r, sparse);
  ASSERT_EQ(a.count(), 4);
  ASSERT_EQ(b.count(), 4);
  for (int m = 0; m < 4; ++m) EXPECT_NEAR(a.concentrations[m], b.concentrations[m], 1e-9);
  // The leading eigenvalue is simple here; its vector agrees up to sign (fixed).
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values[0].size(); ++i) dot += a.values[0][i] * b.values[0][i];
  EXPECT_NEAR(dot, 1.0, 1e-8);
}

TEST(Tapers, ZeroOutsideMask) {
  const Region r = holed();
  const TaperFamily f = compute_tapers(r, opts(0.15));
  for (const auto& v : f.values)
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!r.mask()[i]) {
        EXPECT_EQ(v[i], 0.0);
      }
}

TEST(Tapers, GramAndInterpolationDrift) {
  const TaperFamily f = compute_tapers(holed(), opts(0.15));
  const int M = f.count();
  ASSERT_GE(M, 2);
  const auto lg = f.lattice_gram();
  const auto ig = f.interpolated_gram();
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      const std::size_t i = static_cast<std::size_t>(a) * M + b;
      EXPECT_NEAR(lg[i], a == b ? 1.0 : 0.0, 1e-10);
      EXPECT_NEAR(ig[i], interpolated_inner(f, a, b), 1e-12);
      EXPECT_LE(std::abs(ig[i] - lg[i]), f.interpolation_drift_bound(a, b));
    }
}

TEST(Tapers, ContinuousTransformAtZero) {
  const TaperFamily f = compute_tapers(small_rect(), opts(0.15));
  // H(0) is the integral of the interpolant: cell volume times norm_scale times sum of values.
  double s = 0.0;
  for (double v : f.values[0]) s += v;
  EXPECT_NEAR(std::abs(f.continuous_transform(0).at({0, 0})), s * f.norm_scale, 1e-12);
}

TEST(Tapers, ConcentrationOfTransferFunction) {
  const TaperFamily f = compute_tapers(small_rect(), opts(0.15));
  const auto g = WavenumberGrid::regular(2, {0.15 / 16, 0.15 / 16}, {64, 64});
  const auto tf = transfer_function(f, 0, SamplingScheme::continuous(2), g);
  const double c = concentration(tf, 0.15, f.interpolated_gram()[0]);
  EXPECT_GT(c, 0.98);
  EXPECT_LE(c, 1.0 + 1e-6);
  const auto coarse = WavenumberGrid::regular(2, {0.05, 0.05}, {10, 10});
  EXPECT_THROW(concentration(transfer_function(f, 0, SamplingScheme::continuous(2), coarse), 0.15), ConfigError);
}

TEST(Tapers, SampledTaperUsesInterpolant) {
  const TaperFamily f = compute_tapers(small_rect(), opts(0.15));
  // Nodes at cell centres reproduce the lattice values.
  const SampledTaper st = sample_taper(f, 1, SamplingScheme::grid(2, {1, 1}, {0.5, 0.5}));
  for (int i1 = 0; i1 < st.nodes.n[1]; ++i1)
    for (int i0 = 0; i0 < st.nodes.n[0]; ++i0) {
      const Vec2 u = st.nodes.node(i0, i1);
      const auto c = f.region.cell_of(u);
      ASSERT_TRUE(c);
      EXPECT_NEAR(st.weights[st.nodes.index(i0, i1)],
                  f.norm_scale * f.values[1][f.region.index((*c)[0], (*c)[1])], 1e-14);
    }
  const SampledTaper coarse = sample_taper(f, 0, SamplingScheme::grid(2, {2.5, 2.5}, {1.25, 0.0}));
  EXPECT_DOUBLE_EQ(coarse.scale, 6.25);
  EXPECT_NEAR(coarse.weights[coarse.nodes.index(1, 2)], f.interpolated_value(0, coarse.nodes.node(1, 2)), 0.0);
  EXPECT_THROW(sample_taper(f, 0, SamplingScheme::continuous(2)), ConfigError);
}

TEST(Tapers, CountModeAndErrors) {
  const Region r = small_rect();
  EXPECT_EQ(compute_tapers(r, opts(0.15, 2)).count(), 2);
  EXPECT_THROW(compute_tapers(r, opts(0.0)), ConfigError);
  EXPECT_THROW(compute_tapers(r, opts(0.15, 200)), ConfigError);
  // A bandwidth this small concentrates nothing at 0.99.
  EXPECT_THROW(compute_tapers(r, opts(0.01)), ConfigError);
}

TEST(Tapers, OneDimensional) {
  const Region r = Region::rectangle(Box{1, {0, 0}, {100, 1}}, Vec2{0.5, 1});
  const TaperFamily f = compute_tapers(r, opts(0.04));
  // Shannon number 2 b L = 8; a handful reach 0.99.
  EXPECT_GE(f.count(), 4);
  EXPECT_LE(f.count(), 8);
  const auto lg = f.lattice_gram();
  for (int a = 0; a < f.count(); ++a) EXPECT_NEAR(lg[a * f.count() + a], 1.0, 1e-12);
}

TEST(Tapers, SaveLoadRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "spatspec_test_tapers";
  std::filesystem::remove_all(dir);
  const Region r = holed();
  const TaperFamily f = compute_tapers(r, opts(0.15));
  save_tapers(f, dir);
  const TaperFamily g = load_tapers(dir, r);
  ASSERT_EQ(g.count(), f.count());
  EXPECT_EQ(g.bandwidth, f.bandwidth);
  EXPECT_EQ(g.norm_scale, f.norm_scale);
  for (int m = 0; m < f.count(); ++m) {
    EXPECT_EQ(g.concentrations[m], f.concentrations[m]);
    EXPECT_EQ(g.values[m], f.values[m]);
  }
  EXPECT_THROW(load_tapers(dir, small_rect()), ConfigError);
  std::filesystem::remove_all(dir);
}
