#pragma once

/// @file fourier.hpp
/// Mean-corrected tapered Fourier transforms of point patterns and gridded
/// fields.

#include <vector>

#include "spatspec/geometry.hpp"
#include "spatspec/nudft.hpp"
#include "spatspec/tapers.hpp"

namespace spatspec {

struct PointPattern {
  int dim = 2;
  std::vector<Vec2> locations;
  std::vector<double> marks;  ///< empty means every mark is 1

  std::size_t size() const { return locations.size(); }
  double mark(std::size_t i) const { return marks.empty() ? 1.0 : marks[i]; }
};

/// Values on the nodes of a grid scheme inside a region. Values are stored
/// over the node rectangle and are 0 at nodes outside the region.
struct GriddedField {
  GridNodes nodes;
  std::vector<double> values;

  const SamplingScheme& scheme() const { return nodes.scheme; }
};

/// Field with every inside node set to `value`.
GriddedField constant_field(const SamplingScheme& scheme, const Region& region, double value);

struct TaperedDFT {
  WavenumberGrid grid;
  std::vector<cdouble> J;
  int taper_index = 0;
  int process_index = 0;
  double lambda_hat = 0.0;
};

/// sum W(x) / area for points.
/// @throws ConfigError if a point lies outside the region mask.
double intensity_estimate(const PointPattern& pattern, const Region& region);
/// Node average for fields. @throws ConfigError if the node set is empty.
double intensity_estimate(const GriddedField& field);

/// J(k) = sum_x h_m(x) W(x) exp(-2 pi i x.k) - lambda_hat H_m(k). Passing
/// the precomputed H_m on `kgrid` avoids recomputing it.
TaperedDFT tapered_dft_points(const PointPattern& pattern, const TaperFamily& family, int m,
                              const WavenumberGrid& kgrid, double lambda_hat,
                              const std::vector<cdouble>* transfer = nullptr,
                              const NudftOptions& opt = {});

/// J(k) = scale sum_u h_m(u) (Y(u) - lambda_hat) exp(-2 pi i u.k).
/// @throws ConfigError when the taper and field schemes differ.
TaperedDFT tapered_dft_field(const GriddedField& field, const SampledTaper& taper, int m,
                             const WavenumberGrid& kgrid, double lambda_hat);

/// Transfer function G of the default intensity weights: the indicator of
/// the region over its area (points) or 1/N at the inside nodes (fields).
/// Both satisfy G(0) = 1 exactly.
LatticeTransform point_mean_transform(const Region& region);
LatticeTransform field_mean_transform(const GridNodes& nodes);

}  // namespace spatspec
