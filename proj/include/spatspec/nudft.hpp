#pragma once

/// @file nudft.hpp
/// Nonuniform discrete Fourier sums S(k) = sum_n c_n exp(-2 pi i x_n . k).

#include <vector>

#include "spatspec/geometry.hpp"

namespace spatspec {

enum class NudftMethod { Auto, Direct, Gridding };

struct NudftOptions {
  NudftMethod method = NudftMethod::Auto;
  /// Auto switches to gridding above this many point-wavenumber pairs.
  double direct_limit = 1e7;
  /// Half-width (grid cells) of the Gaussian spreading kernel.
  int spread_width = 12;
};

/// S(k) on the points of `grid` (any grid; gridding needs a regular one and
/// silently falls back to direct summation otherwise).
std::vector<cdouble> nudft(const std::vector<Vec2>& x, const std::vector<double>& c,
                           const WavenumberGrid& grid, const NudftOptions& opt = {});

/// The same sums for several coefficient vectors over one point set
/// (one output per vector). The direct path shares the phase table.
std::vector<std::vector<cdouble>> nudft_many(const std::vector<Vec2>& x,
                                             const std::vector<std::vector<double>>& c,
                                             const WavenumberGrid& grid, const NudftOptions& opt = {});

/// Direct O(N K) summation, parallel over wavenumbers.
std::vector<cdouble> nudft_direct(const std::vector<Vec2>& x, const std::vector<double>& c,
                                  const std::vector<Vec2>& ks, int dim);

/// Gaussian-gridding type-1 transform on a regular grid with oversampling 2.
std::vector<cdouble> nudft_gridding(const std::vector<Vec2>& x, const std::vector<double>& c,
                                    const WavenumberGrid& grid, int spread_width = 12);

}  // namespace spatspec
