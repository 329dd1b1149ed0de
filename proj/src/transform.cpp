#include "spatspec/transform.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "spatspec/fft.hpp"
#include "spatspec/parallel.hpp"
#include "spatspec/special.hpp"

namespace spatspec {

namespace {

// exp(-2 pi i t) with t reduced to [-1/2, 1/2] first.
inline cdouble unit_phase(double t) {
  t -= std::nearbyint(t);
  return std::polar(1.0, -kTwoPi * t);
}

double sinc_factor(double d, double k, int power) {
  if (power == 0) return 1.0;
  const double s = sinc(kPi * d * k);
  return power == 1 ? s : s * s;
}

// Row a holds exp(-2 pi i (origin + i spacing) k_a) for i in [0, n).
Eigen::MatrixXcd axis_phases(const std::vector<double>& ks, double origin, double spacing, int n) {
  Eigen::MatrixXcd e(static_cast<Eigen::Index>(ks.size()), n);
  for (std::size_t a = 0; a < ks.size(); ++a) {
    const double k = ks[a];
    const cdouble base = unit_phase(origin * k);
    for (int i = 0; i < n; ++i) e(static_cast<Eigen::Index>(a), i) = base * unit_phase(i * spacing * k);
  }
  return e;
}

}  // namespace

std::vector<double> axis_values(double step, int half) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(2 * half + 1));
  for (int i = -half; i <= half; ++i) v.push_back(i * step);
  return v;
}

cdouble LatticeTransform::at(const Vec2& k) const {
  cdouble sum = 0.0;
  const int n1 = dim == 2 ? n[1] : 1;
  for (int i1 = 0; i1 < n1; ++i1) {
    cdouble row = 0.0;
    for (int i0 = 0; i0 < n[0]; ++i0) {
      const double w = weights[static_cast<std::size_t>(i1) * n[0] + i0];
      if (w != 0.0) row += w * unit_phase(i0 * spacing[0] * k[0]);
    }
    if (dim == 2) row *= unit_phase(i1 * spacing[1] * k[1]);
    sum += row;
  }
  double t = origin[0] * k[0];
  double f = sinc_factor(spacing[0], k[0], sinc_power);
  if (dim == 2) {
    t += origin[1] * k[1];
    f *= sinc_factor(spacing[1], k[1], sinc_power);
  }
  return sum * unit_phase(t) * (scale * f) / divisor;
}

std::vector<cdouble> LatticeTransform::at_points(const std::vector<Vec2>& ks) const {
  std::vector<cdouble> out(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) { out[i] = at(ks[i]); });
  return out;
}

std::vector<cdouble> LatticeTransform::on_grid(const std::vector<double>& k0s,
                                               const std::vector<double>& k1s) const {
  const int n1 = dim == 2 ? n[1] : 1;
  const std::vector<double> zero{0.0};
  const std::vector<double>& k1 = dim == 2 ? k1s : zero;
  Eigen::Map<const Eigen::MatrixXd> w(weights.data(), n[0], n1);
  Eigen::MatrixXcd e0 = axis_phases(k0s, origin[0], spacing[0], n[0]);
  Eigen::MatrixXcd e1 = axis_phases(k1, dim == 2 ? origin[1] : 0.0, dim == 2 ? spacing[1] : 0.0, n1);
  Eigen::MatrixXcd partial = e0 * w.cast<cdouble>();          // K0 x n1
  Eigen::MatrixXcd full = partial * e1.transpose();          // K0 x K1
  std::vector<cdouble> out(static_cast<std::size_t>(k0s.size() * k1.size()));
  for (std::size_t b = 0; b < k1.size(); ++b) {
    const double f1 = dim == 2 ? sinc_factor(spacing[1], k1[b], sinc_power) : 1.0;
    for (std::size_t a = 0; a < k0s.size(); ++a) {
      const double f = f1 * sinc_factor(spacing[0], k0s[a], sinc_power);
      out[b * k0s.size() + a] = full(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) *
                                (scale * f) / divisor;
    }
  }
  return out;
}

long LatticeTransform::commensurate(double step, double spacing) {
  if (!(step > 0.0)) return 0;
  const double p = 1.0 / (step * spacing);
  const double r = std::nearbyint(p);
  if (r >= 1.0 && std::abs(p - r) <= 1e-9 * p) return static_cast<long>(r);
  return 0;
}

std::vector<cdouble> LatticeTransform::on(const WavenumberGrid& grid) const {
  if (!grid.regular()) return at_points(grid.points());
  const auto half = grid.half();
  const Vec2 step = grid.step();
  // FFT path: k_a = a * step with step * spacing = 1/P, so the phase of
  // lattice index i is exp(-2 pi i a i / P) and indices fold modulo P.
  std::array<long, 2> period{1, 1};
  bool use_fft = true;
  for (int j = 0; j < dim; ++j) {
    const long p = half[j] == 0 ? 1 : commensurate(step[j], spacing[j]);
    const long span = std::max<long>(n[j], 2L * half[j] + 1);
    if (p == 0 || p > 8 * span) use_fft = false;
    period[j] = p;
  }
  if (!use_fft) return on_grid(axis_values(step[0], half[0]), axis_values(step[1], half[1]));

  const int p0 = static_cast<int>(period[0]);
  const int p1 = dim == 2 ? static_cast<int>(period[1]) : 1;
  std::vector<cdouble> buf(static_cast<std::size_t>(p0) * p1, 0.0);
  const int n1 = dim == 2 ? n[1] : 1;
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i0 = 0; i0 < n[0]; ++i0)
      buf[static_cast<std::size_t>(i1 % p1) * p0 + (i0 % p0)] +=
          weights[static_cast<std::size_t>(i1) * n[0] + i0];
  fft_inplace(buf, p0, p1, -1);
  const auto counts = grid.counts();
  std::vector<cdouble> out(grid.size());
  for (int b = -half[1]; b <= half[1]; ++b) {
    const int ib = ((b % p1) + p1) % p1;
    const double k1 = b * step[1];
    for (int a = -half[0]; a <= half[0]; ++a) {
      const int ia = ((a % p0) + p0) % p0;
      const double k0 = a * step[0];
      double t = origin[0] * k0;
      double f = sinc_factor(spacing[0], k0, sinc_power);
      if (dim == 2) {
        t += origin[1] * k1;
        f *= sinc_factor(spacing[1], k1, sinc_power);
      }
      const std::size_t idx =
          static_cast<std::size_t>(b + half[1]) * counts[0] + static_cast<std::size_t>(a + half[0]);
      out[idx] = buf[static_cast<std::size_t>(ib) * p0 + ia] * unit_phase(t) * (scale * f) / divisor;
    }
  }
  return out;
}

}  // namespace spatspec
