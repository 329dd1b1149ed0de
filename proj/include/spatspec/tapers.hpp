#pragma once

/// @file tapers.hpp
/// Spectrally concentrated orthonormal tapers on a masked region, their
/// multilinear interpolation, sampling onto data grids and transfer functions.

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "spatspec/geometry.hpp"
#include "spatspec/transform.hpp"

namespace spatspec {

struct TaperOptions {
  double bandwidth = 0.0;
  /// Exact number of tapers; 0 selects every taper with concentration >= threshold.
  int count = 0;
  double threshold = 0.99;
  /// Cells up to which the dense eigensolver is used.
  int dense_limit = 4000;
};

/// Base tapers on the reference lattice of a region. Each column of `values`
/// is a unit-l2 eigenvector of the discretized concentration operator,
/// indexed like Region::mask(); the continuous taper is
/// norm_scale * (multilinear interpolation of the column).
struct TaperFamily {
  Region region;
  double bandwidth = 0.0;
  std::vector<double> concentrations;         ///< operator eigenvalues, non-increasing
  std::vector<std::vector<double>> values;    ///< values[m][cell]
  double norm_scale = 1.0;

  int count() const { return static_cast<int>(values.size()); }
  int dim() const { return region.dim(); }

  /// norm_scale * I[h_m](u); 0 outside the bounding box.
  double interpolated_value(int m, const Vec2& u) const;

  /// Continuous transfer function of the interpolated taper (lattice DFT
  /// times prod_j sinc^2(pi delta_j k_j)).
  LatticeTransform continuous_transform(int m) const;

  /// Exact Gram matrix <I[h_m], I[h_m']> of the interpolated tapers.
  std::vector<double> interpolated_gram() const;
  /// Lattice Gram matrix sum_cells h_m h_m' (row-major M x M).
  std::vector<double> lattice_gram() const;
  /// Bound on |<I[h_m], I[h_m']> - <h_m, h_m'>| from neighbour differences.
  double interpolation_drift_bound(int m, int mp) const;
};

/// Builds the concentration operator on the masked cells and returns its
/// leading eigenvectors.
/// @throws ConfigError for an empty mask, a non-positive bandwidth, or when
///         no eigenvalue reaches the threshold (message lists the best one).
TaperFamily compute_tapers(const Region& region, const TaperOptions& opt);

/// Dense concentration matrix A_ij = delta_bar * kernel_b(s_i - s_j) over the
/// included cells (in mask order).
Eigen::MatrixXd concentration_matrix(const Region& region, double bandwidth);

/// Matrix-free y = A x using an FFT convolution on the padded lattice.
class ConcentrationOperator {
 public:
  ConcentrationOperator(const Region& region, double bandwidth);
  std::size_t size() const { return cells_.size(); }
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  const std::vector<std::size_t>& cells() const { return cells_; }

 private:
  std::array<int, 2> shape_{1, 1};
  double cell_volume_ = 1.0;
  std::vector<std::size_t> cells_;
  std::array<int, 2> pad_{1, 1};
  std::vector<cdouble> kernel_hat_;
};

/// A base taper restricted to the nodes of a grid scheme.
struct SampledTaper {
  GridNodes nodes;
  std::vector<double> weights;  ///< per node of the rectangle, 0 outside the region
  double scale = 1.0;           ///< prod_j Delta_j

  /// H^G(k) = scale * sum_u h(u) exp(-2 pi i u.k).
  LatticeTransform transform() const;
};

/// @throws ConfigError if the scheme is continuous or has no node in the region.
SampledTaper sample_taper(const TaperFamily& family, int m, const SamplingScheme& scheme);

struct TransferFunction {
  WavenumberGrid grid;
  std::vector<cdouble> values;
};

/// H_m on `kgrid` for the scheme (continuous or grid).
TransferFunction transfer_function(const TaperFamily& family, int m, const SamplingScheme& scheme,
                                   const WavenumberGrid& kgrid);

/// Quadrature of |H|^2 over the ball of radius b, divided by `energy`.
/// The grid must be regular, reach radius 3b and have step <= b/16.
double concentration(const TransferFunction& tf, double b, double energy = 1.0);

/// Directory layout: metadata.json plus taper_<m>.csv (rows iy, columns ix).
void save_tapers(const TaperFamily& family, const std::filesystem::path& dir);
/// @throws ConfigError when the stored region hash differs from `region`.
TaperFamily load_tapers(const std::filesystem::path& dir, const Region& region);

}  // namespace spatspec
