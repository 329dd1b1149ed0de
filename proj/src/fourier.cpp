#include "spatspec/fourier.hpp"

#include <cmath>

namespace spatspec {

GriddedField constant_field(const SamplingScheme& scheme, const Region& region, double value) {
  GriddedField f;
  f.nodes = grid_nodes(scheme, region);
  f.values.assign(f.nodes.size(), 0.0);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (f.nodes.inside[i]) f.values[i] = value;
  return f;
}

double intensity_estimate(const PointPattern& pattern, const Region& region) {
  if (!(region.area() > 0.0)) throw ConfigError("region has zero area");
  double s = 0.0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (!region.contains(pattern.locations[i])) throw ConfigError("point outside the region mask");
    s += pattern.mark(i);
  }
  return s / region.area();
}

double intensity_estimate(const GriddedField& field) {
  if (field.nodes.count == 0) throw ConfigError("field has no nodes inside the region");
  double s = 0.0;
  for (std::size_t i = 0; i < field.values.size(); ++i)
    if (field.nodes.inside[i]) s += field.values[i];
  return s / static_cast<double>(field.nodes.count);
}

TaperedDFT tapered_dft_points(const PointPattern& pattern, const TaperFamily& family, int m,
                              const WavenumberGrid& kgrid, double lambda_hat,
                              const std::vector<cdouble>* transfer, const NudftOptions& opt) {
  if (m < 0 || m >= family.count()) throw ConfigError("taper index out of range");
  if (lambda_hat < 0.0) throw ConfigError("lambda_hat must be non-negative");
  TaperedDFT out{kgrid, {}, m, 0, lambda_hat};
  std::vector<double> c(pattern.size());
  for (std::size_t i = 0; i < pattern.size(); ++i)
    c[i] = family.interpolated_value(m, pattern.locations[i]) * pattern.mark(i);
  out.J = nudft(pattern.locations, c, kgrid, opt);
  if (lambda_hat != 0.0) {
    std::vector<cdouble> local;
    if (!transfer) {
      local = family.continuous_transform(m).on(kgrid);
      transfer = &local;
    }
    if (transfer->size() != kgrid.size()) throw ConfigError("transfer function grid mismatch");
    for (std::size_t i = 0; i < out.J.size(); ++i) out.J[i] -= lambda_hat * (*transfer)[i];
  }
  return out;
}

TaperedDFT tapered_dft_field(const GriddedField& field, const SampledTaper& taper, int m,
                             const WavenumberGrid& kgrid, double lambda_hat) {
  if (!(field.nodes == taper.nodes)) throw ConfigError("taper and field sampling schemes differ");
  LatticeTransform t = taper.transform();
  for (std::size_t i = 0; i < t.weights.size(); ++i)
    t.weights[i] = field.nodes.inside[i] ? t.weights[i] * (field.values[i] - lambda_hat) : 0.0;
  return TaperedDFT{kgrid, t.on(kgrid), m, 0, lambda_hat};
}

LatticeTransform point_mean_transform(const Region& region) {
  LatticeTransform t;
  t.dim = region.dim();
  const Vec2 d = region.delta_ref();
  t.origin = {region.bbox().lo[0] + 0.5 * d[0], t.dim == 2 ? region.bbox().lo[1] + 0.5 * d[1] : 0.0};
  t.spacing = d;
  t.n = region.shape();
  t.weights.assign(region.mask().begin(), region.mask().end());
  t.scale = region.cell_volume();
  t.divisor = region.area();
  t.sinc_power = 1;
  return t;
}

LatticeTransform field_mean_transform(const GridNodes& nodes) {
  LatticeTransform t;
  t.dim = nodes.scheme.dim;
  t.origin = nodes.node(0, 0);
  t.spacing = nodes.scheme.delta;
  t.n = nodes.n;
  t.weights.assign(nodes.inside.begin(), nodes.inside.end());
  t.divisor = static_cast<double>(nodes.count);
  return t;
}

}  // namespace spatspec
