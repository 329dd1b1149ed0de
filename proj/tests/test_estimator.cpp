#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spatspec/estimator.hpp"
#include "spatspec/models.hpp"

using namespace spatspec;

namespace {

Region rect() { return Region::rectangle(Box{2, {0, 0}, {60, 40}}, Vec2{1, 1}); }

const TaperFamily& family() {
  static const TaperFamily f = [] {
    TaperOptions o;
    o.bandwidth = 0.1;
    return compute_tapers(rect(), o);
  }();
  return f;
}

PointPattern random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 60.0), uy(0.0, 40.0), um(0.5, 2.0);
  PointPattern p;
  for (std::size_t i = 0; i < n; ++i) {
    p.locations.push_back({ux(rng), uy(rng)});
    p.marks.push_back(um(rng));
  }
  return p;
}

GriddedField random_field(const SamplingScheme& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  GriddedField f = constant_field(s, rect(), 0.0);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (f.nodes.inside[i]) f.values[i] = 2.0 + n01(rng);
  return f;
}

Process proc(std::string label, std::variant<PointPattern, GriddedField> d) {
  Process p;
  p.label = std::move(label);
  p.data = std::move(d);
  return p;
}

const SamplingScheme kGrid = SamplingScheme::grid(2, {2, 2}, {1, 1});

}  // namespace

TEST(Fourier, PointDftMatchesNaive) {
  const auto& f = family();
  const PointPattern p = random_points(50, 1);
  const double lam = intensity_estimate(p, f.region);
  double msum = 0.0;
  for (double m : p.marks) msum += m;
  EXPECT_NEAR(lam, msum / 2400.0, 1e-15);
  const auto g = WavenumberGrid::from_points(2, {{0, 0}, {0.05, -0.02}, {0.21, 0.3}});
  const TaperedDFT j = tapered_dft_points(p, f, 2, g, lam);
  const auto H = f.continuous_transform(2);
  for (std::size_t k = 0; k < g.size(); ++k) {
    cdouble s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      s += f.interpolated_value(2, p.locations[i]) * p.marks[i] *
           std::polar(1.0, -kTwoPi * (p.locations[i][0] * g[k][0] + p.locations[i][1] * g[k][1]));
    s -= lam * H.at(g[k]);
    EXPECT_LT(std::abs(j.J[k] - s), 1e-12);
  }
}

TEST(Fourier, PointOutsideRegionRejected) {
  PointPattern p = random_points(5, 2);
  p.locations.push_back({70.0, 1.0});
  EXPECT_THROW(intensity_estimate(p, rect()), ConfigError);
}

TEST(Fourier, FieldDftMatchesNaive) {
  const auto& f = family();
  const GriddedField y = random_field(kGrid, 3);
  const double lam = intensity_estimate(y);
  const SampledTaper st = sample_taper(f, 1, kGrid);
  const auto g = WavenumberGrid::regular(2, {0.03, 0.04}, {3, 2});
  const TaperedDFT j = tapered_dft_field(y, st, 1, g, lam);
  for (std::size_t k = 0; k < g.size(); ++k) {
    cdouble s = 0.0;
    for (int i1 = 0; i1 < y.nodes.n[1]; ++i1)
      for (int i0 = 0; i0 < y.nodes.n[0]; ++i0) {
        const std::size_t i = y.nodes.index(i0, i1);
        const Vec2 u = y.nodes.node(i0, i1);
        s += st.weights[i] * (y.values[i] - lam) * std::polar(1.0, -kTwoPi * (u[0] * g[k][0] + u[1] * g[k][1]));
      }
    EXPECT_LT(std::abs(j.J[k] - 4.0 * s), 1e-11);
  }
}

TEST(Fourier, FieldLinearityAndMeanShift) {
  const auto& f = family();
  const GriddedField a = random_field(kGrid, 4), b = random_field(kGrid, 5);
  GriddedField c = a, shifted = a;
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    c.values[i] = 2.0 * a.values[i] - 0.5 * b.values[i];
    if (shifted.nodes.inside[i]) shifted.values[i] += 7.0;
  }
  const SampledTaper st = sample_taper(f, 0, kGrid);
  const auto g = WavenumberGrid::regular(2, {0.02, 0.02}, {4, 4});
  const auto ja = tapered_dft_field(a, st, 0, g, 0.0), jb = tapered_dft_field(b, st, 0, g, 0.0);
  const auto jc = tapered_dft_field(c, st, 0, g, 0.0);
  const auto j0 = tapered_dft_field(a, st, 0, g, intensity_estimate(a));
  const auto j1 = tapered_dft_field(shifted, st, 0, g, intensity_estimate(shifted));
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_LT(std::abs(jc.J[k] - (2.0 * ja.J[k] - 0.5 * jb.J[k])), 1e-11);
    // A constant offset is absorbed by the mean estimate.
    EXPECT_LT(std::abs(j1.J[k] - j0.J[k]), 1e-10);
  }
}

TEST(Fourier, MeanTransformsAtZero) {
  EXPECT_NEAR(std::abs(point_mean_transform(rect()).at({0, 0}) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(field_mean_transform(grid_nodes(kGrid, rect())).at({0, 0}) - 1.0), 0.0, 1e-14);
}

TEST(Estimator, PeriodogramRequiresMatchingTapers) {
  const auto& f = family();
  const PointPattern p = random_points(30, 6);
  const auto g = WavenumberGrid::regular(2, {0.05, 0.05}, {2, 2});
  const auto j0 = tapered_dft_points(p, f, 0, g, 0.0), j1 = tapered_dft_points(p, f, 1, g, 0.0);
  EXPECT_THROW(periodogram(j0, j1), ConfigError);
  const auto i = periodogram(j0, j1, true);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_LT(std::abs(i[k] - j0.J[k] * std::conj(j1.J[k])), 1e-15);
}

TEST(Estimator, MultitaperMatchesManualAverage) {
  const auto& f = family();
  std::vector<Process> ps{proc("pts", random_points(80, 7)), proc("fld", random_field(kGrid, 8))};
  const auto g = WavenumberGrid::regular(2, {0.02, 0.03}, {5, 4});
  const auto est = multitaper_estimate(ps, f, g);
  ASSERT_EQ(est.M, f.count());
  ASSERT_EQ(est.P, 2);
  EXPECT_EQ(est.region_hash, f.region.hash());
  const double lp = intensity_estimate(std::get<PointPattern>(ps[0].data), f.region);
  const double lf = intensity_estimate(std::get<GriddedField>(ps[1].data));
  std::vector<cdouble> ref(g.size() * 4, 0.0);
  for (int m = 0; m < f.count(); ++m) {
    const auto a = tapered_dft_points(std::get<PointPattern>(ps[0].data), f, m, g, lp);
    const auto b = tapered_dft_field(std::get<GriddedField>(ps[1].data), sample_taper(f, m, kGrid), m, g, lf);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const cdouble v[2] = {a.J[k], b.J[k]};
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) ref[k * 4 + p * 2 + q] += v[p] * std::conj(v[q]) / double(f.count());
    }
  }
  for (std::size_t k = 0; k < g.size(); ++k)
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) {
        const cdouble e = est.at(k, p, q);
        EXPECT_LT(std::abs(e - ref[k * 4 + p * 2 + q]), 1e-10 * (1.0 + std::abs(e)));
        EXPECT_EQ(e, std::conj(est.at(k, q, p)));
      }
}

TEST(Estimator, CoherenceOfIdenticalProcessesIsOne) {
  const auto& f = family();
  const PointPattern p = random_points(60, 9);
  const auto g = WavenumberGrid::regular(2, {0.02, 0.02}, {3, 3});
  const auto est = multitaper_estimate({proc("a", p), proc("b", p)}, f, g);
  const auto coh = coherence_and_delay(est);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_NEAR(coh.r[coh.index(k, 0, 1)], 1.0, 1e-12);
    EXPECT_NEAR(coh.theta[coh.index(k, 0, 1)], 0.0, 1e-9);
  }
}

TEST(Estimator, CoherenceRangeAndInvalidEntries) {
  const auto& f = family();
  const auto g = WavenumberGrid::regular(2, {0.02, 0.02}, {3, 3});
  // A constant field has a zero tapered transform once its mean is removed.
  std::vector<Process> ps{proc("a", random_points(60, 10)), proc("b", random_field(kGrid, 11)),
                          proc("c", constant_field(kGrid, rect(), 3.0))};
  const auto coh = coherence_and_delay(multitaper_estimate(ps, f, g));
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double r = coh.r[coh.index(k, 0, 1)];
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
    const double th = coh.theta[coh.index(k, 0, 1)];
    EXPECT_GT(th, -kPi);
    EXPECT_LE(th, kPi);
    EXPECT_TRUE(std::isnan(coh.r[coh.index(k, 0, 2)]));
    EXPECT_FALSE(coh.valid[coh.index(k, 1, 2)]);
  }
}

TEST(Estimator, MixedTaperOffsetsNeedOptIn) {
  const auto& f = family();
  const auto g = WavenumberGrid::regular(2, {0.02, 0.02}, {1, 1});
  Process a = proc("a", random_points(40, 12)), b = proc("b", random_points(40, 13));
  b.taper_offset = 1;
  EXPECT_THROW(multitaper_estimate({a, b}, f, g), ConfigError);
  EstimateOptions opt;
  opt.allow_mixed_tapers = true;
  const auto est = multitaper_estimate({a, b}, f, g, opt);
  // The cross term pairs taper m of a with taper m+1 of b.
  const double la = intensity_estimate(std::get<PointPattern>(a.data), f.region);
  const double lb = intensity_estimate(std::get<PointPattern>(b.data), f.region);
  cdouble ref = 0.0;
  for (int m = 0; m < f.count(); ++m) {
    const auto ja = tapered_dft_points(std::get<PointPattern>(a.data), f, m, g, la);
    const auto jb = tapered_dft_points(std::get<PointPattern>(b.data), f, (m + 1) % f.count(), g, lb);
    ref += ja.J[4] * std::conj(jb.J[4]);
  }
  ref /= double(f.count());
  EXPECT_LT(std::abs(est.at(4, 0, 1) - ref), 1e-12);
}

TEST(Estimator, PoissonEstimateIsFlat) {
  const Region r = Region::rectangle(Box{2, {0, 0}, {200, 100}}, Vec2{1, 1});
  TaperOptions o;
  o.bandwidth = 0.05;
  const TaperFamily f = compute_tapers(r, o);
  const auto g = WavenumberGrid::regular(2, {0.02, 0.02}, {10, 10});
  double sum = 0.0;
  int n = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto est = multitaper_estimate({proc("p", simulate_poisson(r, 0.02, s))}, f, g);
    for (std::size_t k = 0; k < g.size(); ++k)
      if (norm(g[k], 2) >= 0.1) {
        sum += est.at(k, 0, 0).real();
        ++n;
      }
  }
  EXPECT_NEAR(sum / n / 0.02, 1.0, 0.05);
}

TEST(Oracles, SampledTransferIsPeriodic) {
  const auto& f = family();
  const auto s = SamplingScheme::grid(2, {4, 5}, {1, 2});
  const TaperTransfer t = taper_transfer(f, 0, s);
  for (const auto& a : alias_set(s, 0.6))
    for (Vec2 k : {Vec2{0.013, -0.07}, Vec2{0.1, 0.02}}) {
      const Vec2 kp{k[0] + a.psi[0], k[1] + a.psi[1]};
      // H(k + psi) = w(psi) H(k)
      EXPECT_LT(std::abs(t.transform.at(kp) - a.phase * t.transform.at(k)), 1e-12 * std::abs(t.transform.at({0, 0})));
    }
}

TEST(Oracles, AliasedSpectrumMatchesBruteForce) {
  const MaternSpec m{1.0, 20.0, 2.5};
  const Spectrum f{[m](const Vec2& k) { return cdouble(matern_sdf(norm(k, 2), m, 2)); }, true, {}};
  const auto p = SamplingScheme::grid(2, {5, 5}, {0, 0}), q = SamplingScheme::grid(2, {10, 15}, {0, 3});
  const AliasStructure ap = AliasStructure::of(p), aq = AliasStructure::of(q);
  for (Vec2 k : {Vec2{0.01, 0.02}, Vec2{-0.03, 0.04}}) {
    cdouble brute = 0.0;
    for (const auto& a : alias_set(p, 20.0)) {
      // Keep psi only if it is also in the lattice of q.
      const double z0 = a.psi[0] * 10.0, z1 = a.psi[1] * 15.0;
      if (std::abs(z0 - std::round(z0)) > 1e-9 || std::abs(z1 - std::round(z1)) > 1e-9) continue;
      brute += f.f({k[0] - a.psi[0], k[1] - a.psi[1]}) * a.phase * std::conj(aq.phase(a.psi));
    }
    const cdouble v = aliased_spectrum(f, ap, aq, k, 20.0);
    EXPECT_LT(std::abs(v - brute), 1e-10 * std::abs(brute));
  }
}

TEST(Oracles, WhiteNoiseExpectedPeriodogram) {
  // Flat sigma^2 Delta on the Nyquist box: E I = sigma^2 Delta^2 sum h^2 at every k.
  const auto& f = family();
  const auto s = SamplingScheme::grid(2, {2, 2}, {1, 1});
  const double sigma2 = 1.7, dbar = 4.0;
  const Spectrum sp{[&](const Vec2&) { return cdouble(sigma2 * dbar); }, true, nyquist_box(s)};
  const SampledTaper st = sample_taper(f, 1, s);
  double h2 = 0.0;
  for (double w : st.weights) h2 += w * w;
  QuadratureOptions q;
  q.bandwidth = f.bandwidth;
  const TaperTransfer t = taper_transfer(f, 1, s);
  for (Vec2 k : {Vec2{0, 0}, Vec2{0.1, -0.2}, Vec2{0.24, 0.24}}) {
    const auto r = expected_periodogram(sp, t, t, k, q);
    EXPECT_NEAR(r.value.real(), sigma2 * dbar * dbar * h2, 1e-5 * sigma2 * dbar * dbar * h2);
    EXPECT_NEAR(r.value.imag(), 0.0, 1e-8);
  }
}

TEST(Oracles, ExpectedPeriodogramApproachesAliasedSpectrum) {
  // A spectrum that is smooth on the scale of b: E I -> (Delta sum h^2) * aliased f.
  const auto& f = family();
  const auto s = SamplingScheme::grid(2, {2, 2}, {1, 1});
  const MaternSpec m{1.0, 1.5, 2.5};
  const Spectrum sp{[m](const Vec2& k) { return cdouble(matern_sdf(norm(k, 2), m, 2)); }, true, {}};
  const SampledTaper st = sample_taper(f, 0, s);
  double h2 = 0.0;
  for (double w : st.weights) h2 += w * w;
  QuadratureOptions q;
  q.bandwidth = f.bandwidth;
  const TaperTransfer t = taper_transfer(f, 0, s);
  for (Vec2 k : {Vec2{0.05, 0.0}, Vec2{0.15, 0.1}}) {
    const double e = expected_periodogram(sp, t, t, k, q).value.real();
    const double a = aliased_spectrum(sp, t.alias, t.alias, k, 20.0, 1e-4).real() * 4.0 * h2;
    EXPECT_NEAR(e / a, 1.0, 0.03) << k[0] << "," << k[1];
  }
}

TEST(Oracles, UnknownMeanWhiteNoise) {
  const auto& f = family();
  const auto s = SamplingScheme::grid(2, {2, 2}, {1, 1});
  const Spectrum sp{[](const Vec2&) { return cdouble(4.0); }, true, nyquist_box(s)};
  const TaperTransfer h = taper_transfer(f, 0, s), g = mean_transfer(f.region, s);
  QuadratureOptions q;
  q.bandwidth = f.bandwidth;
  const auto t = unknown_mean_bias(sp, h, h, g, g, {0.2, 0.1}, 3.0, 3.0, q);
  EXPECT_EQ(t.mean_bias, cdouble(0.0));
  EXPECT_LT(std::abs(t.correction()), 1e-6 * std::abs(t.oracle));
}
