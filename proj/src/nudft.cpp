#include "spatspec/nudft.hpp"

#include <algorithm>
#include <cmath>
#include <Eigen/Dense>

#include "spatspec/fft.hpp"
#include "spatspec/parallel.hpp"

namespace spatspec {

namespace {

inline cdouble unit_phase(double t) {
  t -= std::nearbyint(t);
  return std::polar(1.0, -kTwoPi * t);
}

struct AxisPlan {
  double center = 0.0;
  double step = 0.0;  // refined step
  int half = 0;       // refined half-width
  int refine = 1;     // output keeps every `refine`-th mode
  int modes = 1;      // 2 * half + 1
  int fine = 1;       // oversampled grid size
  double tau = 1.0;
};

AxisPlan plan_axis(const std::vector<Vec2>& x, int j, double step, int half, int width) {
  AxisPlan p;
  if (half == 0 || x.empty()) return p;
  double lo = x[0][j], hi = x[0][j];
  for (const auto& u : x) {
    lo = std::min(lo, u[j]);
    hi = std::max(hi, u[j]);
  }
  p.center = 0.5 * (lo + hi);
  // Scaled coordinates 2 pi step (x - center) must stay inside (-pi, pi).
  const double span = (hi - lo) * step;
  p.refine = span < 0.999 ? 1 : static_cast<int>(std::floor(span / 0.999)) + 1;
  p.step = step / p.refine;
  p.half = half * p.refine;
  p.modes = 2 * p.half + 1;
  p.fine = good_fft_size(std::max(2 * p.modes, 2 * width + 2));
  const double r = static_cast<double>(p.fine) / p.modes;
  p.tau = kPi * width / (static_cast<double>(p.modes) * p.modes * r * (r - 0.5));
  return p;
}

// Gaussian weights exp(-(t - xi_m)^2 / (4 tau)) for the 2*width grid points
// around t; returns the first grid index (unwrapped).
long spread_weights(double t, const AxisPlan& p, int width, double* w) {
  const double h = kTwoPi / p.fine;
  const long m0 = static_cast<long>(std::floor(t / h));
  const long first = m0 - width + 1;
  for (int l = 0; l < 2 * width; ++l) {
    const double d = t - (first + l) * h;
    w[l] = std::exp(-d * d / (4.0 * p.tau));
  }
  return first;
}

}  // namespace

std::vector<cdouble> nudft_direct(const std::vector<Vec2>& x, const std::vector<double>& c,
                                  const std::vector<Vec2>& ks, int dim) {
  std::vector<cdouble> out(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) {
    const Vec2& k = ks[i];
    cdouble s = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
      double t = x[n][0] * k[0];
      if (dim == 2) t += x[n][1] * k[1];
      s += c[n] * unit_phase(t);
    }
    out[i] = s;
  });
  return out;
}

std::vector<cdouble> nudft_gridding(const std::vector<Vec2>& x, const std::vector<double>& c,
                                    const WavenumberGrid& grid, int width) {
  if (!grid.regular()) return nudft_direct(x, c, grid.points(), grid.dim());
  const int dim = grid.dim();
  if (x.empty()) return std::vector<cdouble>(grid.size(), 0.0);
  std::array<AxisPlan, 2> ax;
  for (int j = 0; j < dim; ++j) ax[j] = plan_axis(x, j, grid.step()[j], grid.half()[j], width);

  const int f0 = ax[0].fine, f1 = dim == 2 ? ax[1].fine : 1;
  std::vector<cdouble> buf(static_cast<std::size_t>(f0) * f1, 0.0);
  std::vector<double> w0(2 * width, 1.0), w1(2 * width, 1.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    long first0 = 0, first1 = 0;
    int len0 = 1, len1 = 1;
    if (ax[0].half > 0) {
      double t = kTwoPi * ax[0].step * (x[n][0] - ax[0].center);
      first0 = spread_weights(t, ax[0], width, w0.data());
      len0 = 2 * width;
    }
    if (dim == 2 && ax[1].half > 0) {
      double t = kTwoPi * ax[1].step * (x[n][1] - ax[1].center);
      first1 = spread_weights(t, ax[1], width, w1.data());
      len1 = 2 * width;
    }
    for (int l1 = 0; l1 < len1; ++l1) {
      const long m1 = (((first1 + l1) % f1) + f1) % f1;
      const double a = c[n] * (len1 > 1 ? w1[l1] : 1.0);
      for (int l0 = 0; l0 < len0; ++l0) {
        const long m0 = (((first0 + l0) % f0) + f0) % f0;
        buf[static_cast<std::size_t>(m1) * f0 + m0] += a * (len0 > 1 ? w0[l0] : 1.0);
      }
    }
  }
  fft_inplace(buf, f0, f1, -1);

  auto deconv = [&](const AxisPlan& p, int a) {
    if (p.half == 0) return 1.0;
    return std::sqrt(kPi / p.tau) * std::exp(static_cast<double>(a) * a * p.tau) / p.fine;
  };
  const auto half = grid.half();
  const auto counts = grid.counts();
  const Vec2 step = grid.step();
  std::vector<cdouble> out(grid.size());
  for (int b = -half[1]; b <= half[1]; ++b) {
    const int bb = b * ax[1].refine;
    const int i1 = dim == 2 ? ((bb % f1) + f1) % f1 : 0;
    const double d1 = dim == 2 ? deconv(ax[1], bb) : 1.0;
    for (int a = -half[0]; a <= half[0]; ++a) {
      const int aa = a * ax[0].refine;
      const int i0 = ((aa % f0) + f0) % f0;
      double t = ax[0].center * a * step[0];
      if (dim == 2) t += ax[1].center * b * step[1];
      const std::size_t idx =
          static_cast<std::size_t>(b + half[1]) * counts[0] + static_cast<std::size_t>(a + half[0]);
      out[idx] = buf[static_cast<std::size_t>(i1) * f0 + i0] * (deconv(ax[0], aa) * d1) * unit_phase(t);
    }
  }
  return out;
}

std::vector<cdouble> nudft(const std::vector<Vec2>& x, const std::vector<double>& c,
                           const WavenumberGrid& grid, const NudftOptions& opt) {
  bool fast = false;
  switch (opt.method) {
    case NudftMethod::Direct: fast = false; break;
    case NudftMethod::Gridding: fast = true; break;
    case NudftMethod::Auto:
      fast = static_cast<double>(x.size()) * static_cast<double>(grid.size()) > opt.direct_limit;
      break;
  }
  if (fast && grid.regular()) return nudft_gridding(x, c, grid, opt.spread_width);
  return nudft_direct(x, c, grid.points(), grid.dim());
}

std::vector<std::vector<cdouble>> nudft_many(const std::vector<Vec2>& x,
                                             const std::vector<std::vector<double>>& c,
                                             const WavenumberGrid& grid, const NudftOptions& opt) {
  const double pairs = static_cast<double>(x.size()) * static_cast<double>(grid.size());
  const bool fast = grid.regular() && (opt.method == NudftMethod::Gridding ||
                                       (opt.method == NudftMethod::Auto && pairs > opt.direct_limit));
  std::vector<std::vector<cdouble>> out(c.size());
  if (fast) {
    for (std::size_t m = 0; m < c.size(); ++m) out[m] = nudft_gridding(x, c[m], grid, opt.spread_width);
    return out;
  }
  using CMat = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index N = static_cast<Eigen::Index>(x.size());
  const Eigen::Index M = static_cast<Eigen::Index>(c.size());
  CMat coef(N, M);
  for (Eigen::Index m = 0; m < M; ++m) {
    if (c[m].size() != x.size()) throw ConfigError("coefficient and point counts differ");
    for (Eigen::Index n = 0; n < N; ++n) coef(n, m) = c[m][n];
  }
  const int dim = grid.dim();
  const std::size_t K = grid.size();
  const std::size_t chunk = 64;
  const std::size_t nchunks = (K + chunk - 1) / chunk;
  for (auto& o : out) o.resize(K);
  parallel_for(nchunks, [&](std::size_t b) {
    const std::size_t k0 = b * chunk, k1 = std::min(K, k0 + chunk);
    const Eigen::Index nk = static_cast<Eigen::Index>(k1 - k0);
    CMat phase(nk, N);
    for (Eigen::Index n = 0; n < N; ++n)
      for (Eigen::Index i = 0; i < nk; ++i) {
        const Vec2& k = grid[k0 + static_cast<std::size_t>(i)];
        double t = x[n][0] * k[0];
        if (dim == 2) t += x[n][1] * k[1];
        phase(i, n) = unit_phase(t);
      }
    const CMat j = phase * coef;
    for (Eigen::Index m = 0; m < M; ++m)
      for (Eigen::Index i = 0; i < nk; ++i) out[m][k0 + static_cast<std::size_t>(i)] = j(i, m);
  });
  return out;
}

}  // namespace spatspec
