#pragma once

/// @file transform.hpp
/// Fourier transform of a weighted comb on a rectangular lattice,
///
///   T(k) = (scale / divisor) * sum_i w_i exp(-2 pi i x_i . k) * prod_j sinc(pi d_j k_j)^p,
///
/// with x_i = origin + i o spacing. p = 0 is the sampled (Dirac comb) case,
/// p = 1 the transform of piecewise-constant cells and p = 2 that of the
/// multilinear interpolant through the lattice values.

#include <array>
#include <vector>

#include "spatspec/geometry.hpp"

namespace spatspec {

struct LatticeTransform {
  int dim = 2;
  Vec2 origin{0.0, 0.0};
  Vec2 spacing{1.0, 1.0};
  std::array<int, 2> n{1, 1};
  std::vector<double> weights;  ///< index i1 * n0 + i0
  double scale = 1.0;
  double divisor = 1.0;
  int sinc_power = 0;

  /// Direct evaluation at one wavenumber.
  cdouble at(const Vec2& k) const;

  /// Evaluation on the rectilinear grid k0s x k1s, output index b * |k0s| + a.
  /// In 1D `k1s` is ignored.
  std::vector<cdouble> on_grid(const std::vector<double>& k0s,
                               const std::vector<double>& k1s) const;

  /// Evaluation on a WavenumberGrid: separable (or FFT when the grid step is
  /// commensurate with the lattice) for regular grids, direct otherwise.
  std::vector<cdouble> on(const WavenumberGrid& grid) const;

  /// Direct evaluation (parallel over wavenumbers).
  std::vector<cdouble> at_points(const std::vector<Vec2>& ks) const;

  /// Ratio P = 1/(step * spacing) if integral; 0 otherwise.
  static long commensurate(double step, double spacing);
};

/// Axis coordinates i * step for i in [-half, half].
std::vector<double> axis_values(double step, int half);

}  // namespace spatspec
