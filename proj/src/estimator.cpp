#include "spatspec/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spatspec/parallel.hpp"

namespace spatspec {

SamplingScheme Process::scheme(int dim) const {
  if (is_points()) return SamplingScheme::continuous(dim);
  return std::get<GriddedField>(data).scheme();
}

namespace {

int taper_count(const TaperFamily& family, const EstimateOptions& opt) {
  if (family.count() == 0) throw ConfigError("no tapers selected");
  if (opt.tapers < 0 || opt.tapers > family.count())
    throw ConfigError("requested more tapers than the family holds");
  return opt.tapers > 0 ? opt.tapers : family.count();
}

}  // namespace

std::vector<std::vector<TaperedDFT>> tapered_dfts(const std::vector<Process>& processes,
                                                  const TaperFamily& family,
                                                  const WavenumberGrid& kgrid,
                                                  const EstimateOptions& opt) {
  if (processes.empty()) throw ConfigError("no processes");
  if (kgrid.dim() != family.dim()) throw ConfigError("wavenumber grid and region dimensions differ");
  const int M = taper_count(family, opt);
  const int total = family.count();
  std::vector<std::vector<TaperedDFT>> out(processes.size());
  for (std::size_t p = 0; p < processes.size(); ++p) {
    const Process& proc = processes[p];
    if (proc.taper_offset != 0 && !opt.allow_mixed_tapers)
      throw ConfigError("process '" + proc.label + "' uses a taper offset; mixed tapers are disabled");
    double lambda;
    if (proc.is_points()) {
      const auto& pat = std::get<PointPattern>(proc.data);
      if (pat.dim != family.dim()) throw ConfigError("point pattern dimension differs from region");
      lambda = proc.lambda.value_or(intensity_estimate(pat, family.region));
    } else {
      lambda = proc.lambda.value_or(intensity_estimate(std::get<GriddedField>(proc.data)));
    }
    out[p].resize(static_cast<std::size_t>(M));
    auto index_of = [&](int m) { return ((m + proc.taper_offset) % total + total) % total; };
    if (proc.is_points()) {
      const auto& pat = std::get<PointPattern>(proc.data);
      std::vector<std::vector<double>> coef(static_cast<std::size_t>(M), std::vector<double>(pat.size()));
      parallel_for(static_cast<std::size_t>(M), [&](std::size_t m) {
        for (std::size_t i = 0; i < pat.size(); ++i)
          coef[m][i] = family.interpolated_value(index_of(static_cast<int>(m)), pat.locations[i]) * pat.mark(i);
      });
      auto sums = nudft_many(pat.locations, coef, kgrid, opt.nudft);
      parallel_for(static_cast<std::size_t>(M), [&](std::size_t m) {
        const int mi = index_of(static_cast<int>(m));
        TaperedDFT j{kgrid, std::move(sums[m]), mi, static_cast<int>(p), lambda};
        if (lambda != 0.0) {
          const auto h = family.continuous_transform(mi).on(kgrid);
          for (std::size_t i = 0; i < j.J.size(); ++i) j.J[i] -= lambda * h[i];
        }
        out[p][m] = std::move(j);
      });
    } else {
      const auto& field = std::get<GriddedField>(proc.data);
      parallel_for(static_cast<std::size_t>(M), [&](std::size_t m) {
        const int mi = index_of(static_cast<int>(m));
        TaperedDFT j = tapered_dft_field(field, sample_taper(family, mi, field.scheme()), mi, kgrid, lambda);
        j.process_index = static_cast<int>(p);
        out[p][m] = std::move(j);
      });
    }
  }
  return out;
}

std::vector<cdouble> periodogram(const TaperedDFT& jp, const TaperedDFT& jq, bool allow_mixed) {
  if (jp.taper_index != jq.taper_index && !allow_mixed)
    throw ConfigError("periodogram of transforms with different tapers (" +
                      std::to_string(jp.taper_index) + " vs " + std::to_string(jq.taper_index) + ")");
  if (jp.J.size() != jq.J.size()) throw ConfigError("periodogram of transforms on different grids");
  std::vector<cdouble> out(jp.J.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = jp.J[i] * std::conj(jq.J[i]);
  return out;
}

SpectralEstimate estimate_from_dfts(const std::vector<std::vector<TaperedDFT>>& dfts,
                                    const TaperFamily& family, bool allow_mixed) {
  if (dfts.empty() || dfts[0].empty()) throw ConfigError("no tapers selected");
  const int P = static_cast<int>(dfts.size());
  const int M = static_cast<int>(dfts[0].size());
  for (const auto& row : dfts)
    if (static_cast<int>(row.size()) != M) throw ConfigError("processes use different taper counts");
  if (!allow_mixed)
    for (int m = 0; m < M; ++m)
      for (int p = 1; p < P; ++p)
        if (dfts[p][m].taper_index != dfts[0][m].taper_index)
          throw ConfigError("processes use different base tapers; enable mixed tapers to allow this");
  SpectralEstimate est;
  est.kgrid = dfts[0][0].grid;
  est.P = P;
  est.M = M;
  est.bandwidth = family.bandwidth;
  est.region_hash = family.region.hash();
  const std::size_t K = est.kgrid.size();
  est.fhat.assign(K * P * P, 0.0);
  parallel_for(K, [&](std::size_t k) {
    cdouble* f = &est.fhat[k * P * P];
    for (int m = 0; m < M; ++m)
      for (int p = 0; p < P; ++p) {
        const cdouble jp = dfts[p][m].J[k];
        f[p * P + p] += std::norm(jp);
        for (int q = p + 1; q < P; ++q) f[p * P + q] += jp * std::conj(dfts[q][m].J[k]);
      }
    for (int p = 0; p < P; ++p) {
      f[p * P + p] = f[p * P + p].real() / M;
      for (int q = p + 1; q < P; ++q) {
        f[p * P + q] /= static_cast<double>(M);
        f[q * P + p] = std::conj(f[p * P + q]);
      }
    }
  });
  return est;
}

SpectralEstimate multitaper_estimate(const std::vector<Process>& processes, const TaperFamily& family,
                                     const WavenumberGrid& kgrid, const EstimateOptions& opt) {
  auto dfts = tapered_dfts(processes, family, kgrid, opt);
  SpectralEstimate est = estimate_from_dfts(dfts, family, opt.allow_mixed_tapers);
  for (const auto& p : processes) est.labels.push_back(p.label);
  return est;
}

CoherenceField coherence_and_delay(const SpectralEstimate& est, std::optional<double> floor) {
  if (floor && *floor < 0.0) throw ConfigError("coherence floor must be non-negative");
  const int P = est.P;
  const std::size_t K = est.kgrid.size();
  double fl;
  if (floor) {
    fl = *floor;
  } else {
    double mx = 0.0;
    for (std::size_t k = 0; k < K; ++k)
      for (int p = 0; p < P; ++p) mx = std::max(mx, est.at(k, p, p).real());
    fl = 1e-12 * mx;
  }
  CoherenceField c;
  c.kgrid = est.kgrid;
  c.P = P;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  c.r.assign(K * P * P, nan);
  c.theta.assign(K * P * P, nan);
  c.valid.assign(K * P * P, 0);
  for (std::size_t k = 0; k < K; ++k)
    for (int p = 0; p < P; ++p)
      for (int q = 0; q < P; ++q) {
        const double fp = est.at(k, p, p).real(), fq = est.at(k, q, q).real();
        if (std::min(fp, fq) <= fl) continue;
        const std::size_t i = c.index(k, p, q);
        if (p == q) {
          c.r[i] = 1.0;
          c.theta[i] = 0.0;
        } else {
          const cdouble z = est.at(k, p, q);
          double r = std::abs(z) / std::sqrt(fp * fq);
          if (r > 1.0 && r < 1.0 + 1e-12) r = 1.0;  // rounding only
          double th = std::arg(z);
          if (th <= -kPi) th = kPi;
          c.r[i] = r;
          c.theta[i] = th;
        }
        c.valid[i] = 1;
      }
  return c;
}

TaperTransfer taper_transfer(const TaperFamily& family, int m, const SamplingScheme& scheme) {
  if (!scheme.is_grid()) return {family.continuous_transform(m), AliasStructure::of(scheme)};
  return {sample_taper(family, m, scheme).transform(), AliasStructure::of(scheme)};
}

TaperTransfer mean_transfer(const Region& region, const SamplingScheme& scheme) {
  if (!scheme.is_grid()) return {point_mean_transform(region), AliasStructure::of(scheme)};
  return {field_mean_transform(grid_nodes(scheme, region)), AliasStructure::of(scheme)};
}

namespace {

// Lattice index vectors z (nontrivial dimensions only) with max |z_j| == s.
std::vector<std::array<long, 2>> shell(const AliasLattice& l, long s) {
  std::vector<std::array<long, 2>> out;
  const bool d0 = l.generator[0] > 0.0, d1 = l.dim == 2 && l.generator[1] > 0.0;
  const long r0 = d0 ? s : 0, r1 = d1 ? s : 0;
  for (long z1 = -r1; z1 <= r1; ++z1)
    for (long z0 = -r0; z0 <= r0; ++z0)
      if (std::max(std::abs(z0), std::abs(z1)) == s) out.push_back({z0, z1});
  return out;
}

bool box_overlap(const Box& b, const Vec2& lo, const Vec2& hi, int dim) {
  for (int j = 0; j < dim; ++j)
    if (hi[j] < b.lo[j] || lo[j] > b.hi[j]) return false;
  return true;
}

struct Level {
  cdouble value;
  double scale;  // sum |X Y| |f| h^d
};

Level quadrature_level(const Spectrum& f, const TaperTransfer& x, const Vec2& a, const TaperTransfer& y,
                       const Vec2& c, const AliasLattice& lat, const Vec2& half,
                       const std::array<int, 2>& npts, double tol, int max_shells) {
  const int dim = lat.dim;
  std::array<std::vector<double>, 2> kap, kap_y;
  Vec2 h{1.0, 1.0};
  for (int j = 0; j < 2; ++j) {
    if (j >= dim) {
      kap[j] = {0.0};
      kap_y[j] = {0.0};
      continue;
    }
    h[j] = 2.0 * half[j] / npts[j];
    for (int i = 0; i < npts[j]; ++i) {
      const double v = -half[j] + (i + 0.5) * h[j];
      kap[j].push_back(v);
      kap_y[j].push_back(v + c[j] - a[j]);
    }
  }
  const auto xv = x.transform.on_grid(kap[0], kap[1]);
  const auto yv = y.transform.on_grid(kap_y[0], kap_y[1]);
  const double cell = dim == 2 ? h[0] * h[1] : h[0];
  std::vector<cdouble> prod(xv.size());
  double prod_abs = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) {
    prod[i] = xv[i] * std::conj(yv[i]) * cell;
    prod_abs += std::abs(prod[i]);
  }
  const std::size_t n0 = kap[0].size();

  cdouble total = 0.0;
  double scale = 0.0;
  const bool trivial = lat.trivial();
  for (long s = 0;; ++s) {
    if (s > max_shells) throw NumericalError("alias sum did not converge within the shell limit");
    cdouble shell_sum = 0.0;
    double shell_scale = 0.0;
    bool any = false;
    for (const auto& z : shell(lat, s)) {
      const Vec2 psi{z[0] * lat.generator[0], z[1] * lat.generator[1]};
      if (f.support) {
        Vec2 lo{a[0] - psi[0] - half[0], a[1] - psi[1] - half[1]};
        Vec2 hi{a[0] - psi[0] + half[0], a[1] - psi[1] + half[1]};
        if (!box_overlap(*f.support, lo, hi, dim)) continue;
      }
      any = true;
      // w^x(psi) conj(w^y(psi)).
      const cdouble phase = x.alias.phase(psi) * std::conj(y.alias.phase(psi));
      cdouble acc = 0.0;
      double acc_abs = 0.0;
      for (std::size_t i1 = 0; i1 < kap[1].size(); ++i1)
        for (std::size_t i0 = 0; i0 < n0; ++i0) {
          const std::size_t i = i1 * n0 + i0;
          const Vec2 kp{a[0] - kap[0][i0] - psi[0], dim == 2 ? a[1] - kap[1][i1] - psi[1] : 0.0};
          if (f.support && !f.support->contains(kp)) continue;
          const cdouble fv = f.f(kp);
          acc += prod[i] * fv;
          acc_abs += std::abs(prod[i]) * std::abs(fv);
        }
      shell_sum += phase * acc;
      shell_scale += acc_abs;
    }
    total += shell_sum;
    scale += shell_scale;
    if (trivial) break;
    if (f.support && !any && s > 0) break;
    if (!f.support && s > 0 && shell_scale <= 1e-3 * tol * scale) break;
  }
  (void)prod_abs;
  return {total, scale};
}

}  // namespace

QuadratureResult convolve_transfer(const Spectrum& f, const TaperTransfer& x, const Vec2& a,
                                   const TaperTransfer& y, const Vec2& c, bool full_cell,
                                   const QuadratureOptions& opt) {
  const double b = opt.bandwidth;
  if (!(b > 0.0)) throw ConfigError("quadrature needs a positive bandwidth");
  const AliasLattice lat = alias_intersection(x.alias.lattice, y.alias.lattice);
  if (!f.decays && !f.support && !lat.trivial())
    throw ConfigError("spectrum does not decay; the alias sum is undefined");
  const int dim = lat.dim;
  Vec2 half{0.0, 0.0};
  std::array<int, 2> npts{1, 1};
  for (int j = 0; j < dim; ++j) {
    const double ext = std::max(x.transform.n[j] * x.transform.spacing[j],
                                y.transform.n[j] * y.transform.spacing[j]);
    const double h = std::min(b / 8.0, 1.0 / (2.0 * ext));
    const double g = lat.generator[j];
    if (g > 0.0)
      half[j] = full_cell ? 0.5 * g : std::min(4.0 * b, 0.5 * g);
    else
      half[j] = 4.0 * b + (full_cell ? std::abs(c[j] - a[j]) : 0.0);
    npts[j] = std::max(1, static_cast<int>(std::ceil(2.0 * half[j] / h)));
  }
  // Halve the spacing until two successive levels agree.
  Level coarse = quadrature_level(f, x, a, y, c, lat, half, npts, opt.tol, opt.max_shells);
  QuadratureResult r;
  for (;;) {
    npts = {2 * npts[0], dim == 2 ? 2 * npts[1] : 1};
    const Level fine = quadrature_level(f, x, a, y, c, lat, half, npts, opt.tol, opt.max_shells);
    r = {fine.value, std::abs(fine.value - coarse.value)};
    const double allowed = opt.tol * std::max(fine.scale, 1e-300);
    if (r.error <= allowed) break;
    if (static_cast<double>(npts[0]) * npts[1] * 4.0 > opt.max_points) {
      std::ostringstream msg;
      msg << "quadrature error estimate " << r.error << " exceeds tolerance " << allowed
          << " at the point limit";
      throw NumericalError(msg.str());
    }
    coarse = fine;
  }
  return r;
}

QuadratureResult expected_periodogram(const Spectrum& f, const TaperTransfer& hp,
                                      const TaperTransfer& hq, const Vec2& k,
                                      const QuadratureOptions& opt) {
  return convolve_transfer(f, hp, k, hq, k, false, opt);
}

cdouble aliased_spectrum(const Spectrum& f, const AliasStructure& p, const AliasStructure& q,
                         const Vec2& k, double radius, double tol) {
  const AliasLattice lat = alias_intersection(p.lattice, q.lattice);
  if (lat.trivial()) return f.f(k);
  if (!f.decays && !f.support) throw ConfigError("spectrum does not decay; the alias sum is undefined");
  long smax = 0;
  for (int j = 0; j < lat.dim; ++j)
    if (lat.generator[j] > 0.0)
      smax = std::max(smax, static_cast<long>(std::floor(radius / lat.generator[j] + 1e-12)));
  cdouble total = 0.0, last = 0.0;
  for (long s = 0; s <= smax; ++s) {
    cdouble sh = 0.0;
    for (const auto& z : shell(lat, s)) {
      const Vec2 psi{z[0] * lat.generator[0], z[1] * lat.generator[1]};
      if (sup_norm(psi, lat.dim) > radius * (1 + 1e-12)) continue;
      const Vec2 kp{k[0] - psi[0], lat.dim == 2 ? k[1] - psi[1] : 0.0};
      if (f.support && !f.support->contains(kp)) continue;
      sh += f.f(kp) * p.phase(psi) * std::conj(q.phase(psi));
    }
    total += sh;
    last = sh;
  }
  if (smax > 0 && std::abs(last) > tol * std::abs(total))
    throw NumericalError("alias radius too small: outer shell exceeds tolerance");
  if (smax == 0 && f.decays && !f.support)
    throw NumericalError("alias radius too small to assess the tail");
  return total;
}

UnknownMeanTerms unknown_mean_bias(const Spectrum& f, const TaperTransfer& hp, const TaperTransfer& hq,
                                   const TaperTransfer& gp, const TaperTransfer& gq, const Vec2& k,
                                   double lambda_p, double lambda_q, const QuadratureOptions& opt) {
  const Vec2 zero{0.0, 0.0};
  UnknownMeanTerms t;
  const cdouble hpk = hp.transform.at(k), hqk = hq.transform.at(k);
  const double gp0 = gp.transform.at(zero).real() - 1.0;
  const double gq0 = gq.transform.at(zero).real() - 1.0;
  const auto oracle = convolve_transfer(f, hp, k, hq, k, false, opt);
  const auto gg = convolve_transfer(f, gp, zero, gq, zero, true, opt);
  const auto hg = convolve_transfer(f, hp, k, gq, zero, true, opt);
  const auto gh = convolve_transfer(f, gp, zero, hq, k, true, opt);
  t.oracle = oracle.value;
  t.mean_bias = hpk * std::conj(hqk) * (gp0 * gq0 * lambda_p * lambda_q);
  t.gg = hpk * std::conj(hqk) * gg.value;
  t.hg = -std::conj(hqk) * hg.value;
  t.gh = -hpk * gh.value;
  t.error = std::max({oracle.error, gg.error, hg.error, gh.error});
  return t;
}

}  // namespace spatspec
