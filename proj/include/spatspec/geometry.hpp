#pragma once

/// @file geometry.hpp
/// Observation regions, sampling schemes, wavenumber grids and the alias
/// lattices introduced by grid sampling.
///
/// Coordinates are carried as `Vec2` for both d = 1 and d = 2. In one
/// dimension the second component is ignored everywhere (it is kept at zero
/// for points and wavenumbers).

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spatspec {

using Vec2 = std::array<double, 2>;
using cdouble = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Invalid user input or configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure could not deliver the requested accuracy (CLI exit
/// code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned box in R^d.
struct Box {
  int dim = 2;
  Vec2 lo{0.0, 0.0};
  Vec2 hi{0.0, 0.0};

  double side(int j) const { return hi[j] - lo[j]; }
  Vec2 center() const { return {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])}; }
  double volume() const;
  bool contains(const Vec2& u) const;
};

/// Observation window: a bounding box plus a boolean inclusion mask over a
/// reference lattice of cells with spacing `delta_ref`.
///
/// Cell (i0, i1) covers [lo + i*delta, lo + (i+1)*delta) and is stored at
/// index i1 * n0 + i0 (row-major with x varying fastest).
class Region {
 public:
  Region(Box bbox, Vec2 delta_ref, std::vector<std::uint8_t> mask);

  /// Fully included box. `delta_ref` defaults to (min side)/256.
  static Region rectangle(const Box& bbox, std::optional<Vec2> delta_ref = std::nullopt);
  static Vec2 default_delta(const Box& bbox);

  int dim() const { return bbox_.dim; }
  const Box& bbox() const { return bbox_; }
  const Vec2& delta_ref() const { return delta_; }
  const std::array<int, 2>& shape() const { return shape_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  std::size_t lattice_size() const { return mask_.size(); }
  std::size_t included_cells() const { return included_; }
  /// Volume of one reference cell, prod_j delta_ref_j.
  double cell_volume() const;
  /// l(R) = (count of included cells) * cell_volume().
  double area() const { return area_; }

  bool cell_included(int i0, int i1) const { return mask_[index(i0, i1)] != 0; }
  std::size_t index(int i0, int i1) const {
    return static_cast<std::size_t>(i1) * static_cast<std::size_t>(shape_[0]) +
           static_cast<std::size_t>(i0);
  }
  Vec2 cell_center(int i0, int i1) const;
  /// Cell containing u, or nullopt when u is outside the bounding box.
  std::optional<std::array<int, 2>> cell_of(const Vec2& u) const;
  bool contains(const Vec2& u) const;

  /// Stable content hash (hex) over bbox, delta_ref and mask.
  std::string hash() const;

 private:
  Box bbox_;
  Vec2 delta_;
  std::array<int, 2> shape_{1, 1};
  std::vector<std::uint8_t> mask_;
  std::size_t included_ = 0;
  double area_ = 0.0;
};

/// How a process is observed: continuously (point patterns) or on a regular
/// grid {z o Delta + s : z in Z^d} (random fields).
struct SamplingScheme {
  enum class Kind { Continuous, Grid };

  Kind kind = Kind::Continuous;
  int dim = 2;
  Vec2 delta{1.0, 1.0};
  Vec2 offset{0.0, 0.0};

  static SamplingScheme continuous(int dim);
  static SamplingScheme grid(int dim, Vec2 delta, Vec2 offset = {0.0, 0.0});

  bool is_grid() const { return kind == Kind::Grid; }
  /// prod_j Delta_j (1 for continuous sampling).
  double cell_volume() const;
  bool operator==(const SamplingScheme& other) const;
};

/// Nodes of a grid scheme that fall inside a region, stored on the
/// enclosing rectangle of node indices z in [z0, z0 + n).
struct GridNodes {
  SamplingScheme scheme;
  std::array<long, 2> z0{0, 0};
  std::array<int, 2> n{1, 1};
  std::vector<std::uint8_t> inside;
  std::size_t count = 0;

  std::size_t size() const { return inside.size(); }
  std::size_t index(int i0, int i1) const {
    return static_cast<std::size_t>(i1) * static_cast<std::size_t>(n[0]) +
           static_cast<std::size_t>(i0);
  }
  Vec2 node(int i0, int i1) const;
  bool operator==(const GridNodes& other) const;
};

/// Enumerates grid nodes inside the region mask.
/// @throws ConfigError for continuous schemes or when no node is inside.
GridNodes grid_nodes(const SamplingScheme& scheme, const Region& region);

/// Lattice {z o g : z in Z^d}; a zero generator component means that
/// dimension only contains 0.
struct AliasLattice {
  int dim = 2;
  Vec2 generator{0.0, 0.0};

  bool trivial() const;
  /// All lattice points with |psi_j| <= radius_j.
  std::vector<Vec2> points(const Vec2& radius) const;
  /// Lattice index vector of psi (rounded), zero in trivial dimensions.
  std::array<long, 2> index_of(const Vec2& psi) const;
};

/// The alias set Psi and phase weight w(psi) = exp(-2 pi i s.psi) of a
/// sampling scheme. Continuous sampling gives Psi = {0}, w = 1.
struct AliasStructure {
  AliasLattice lattice;
  Vec2 offset{0.0, 0.0};

  static AliasStructure of(const SamplingScheme& scheme);
  cdouble phase(const Vec2& psi) const;
};

/// Nyquist box prod_j [-1/(2 Delta_j), 1/(2 Delta_j)].
/// @throws ConfigError for continuous sampling.
Box nyquist_box(const SamplingScheme& scheme);

struct AliasPoint {
  Vec2 psi;
  cdouble phase;
};

/// Lattice points of Psi with sup-norm <= radius together with w(psi).
std::vector<AliasPoint> alias_set(const SamplingScheme& scheme, double radius);

/// Intersection of the two alias lattices, dimension by dimension. Spacing
/// ratios are tested for rationality with a continued-fraction expansion
/// (relative tolerance 1e-9, denominators up to 1000); anything else is
/// treated as irrational and gives the trivial lattice in that dimension.
AliasLattice alias_intersection(const SamplingScheme& a, const SamplingScheme& b);
AliasLattice alias_intersection(const AliasLattice& a, const AliasLattice& b);

/// p/q with q <= max_den and |x - p/q| <= rel_tol*|x|, if one exists.
std::optional<std::pair<long, long>> rational_approximation(double x, double rel_tol = 1e-9,
                                                            long max_den = 1000);

/// Ordered list of wavenumbers. Grids built with `regular` are symmetric
/// and ordered so that the negation of point i is point size()-1-i.
class WavenumberGrid {
 public:
  /// k = (i0*step0, i1*step1), i_j in [-half_j, half_j], i0 fastest.
  static WavenumberGrid regular(int dim, Vec2 step, std::array<int, 2> half);
  /// Arbitrary points; `symmetric` is detected.
  static WavenumberGrid from_points(int dim, std::vector<Vec2> points);
  /// Fourier grid of the bounding box refined by `oversample`, limited to
  /// the wavenumber box [-kmax, kmax].
  static WavenumberGrid fourier(const Box& bbox, double oversample, const Vec2& kmax);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Vec2>& points() const { return points_; }
  const Vec2& operator[](std::size_t i) const { return points_[i]; }
  bool symmetric() const { return symmetric_; }
  bool regular() const { return regular_; }
  const Vec2& step() const { return step_; }
  const std::array<int, 2>& half() const { return half_; }
  std::array<int, 2> counts() const { return {2 * half_[0] + 1, 2 * half_[1] + 1}; }
  /// Index of -k_i (only for symmetric grids).
  std::size_t negated(std::size_t i) const;

 private:
  int dim_ = 2;
  std::vector<Vec2> points_;
  bool symmetric_ = false;
  bool regular_ = false;
  Vec2 step_{0.0, 0.0};
  std::array<int, 2> half_{0, 0};
  std::vector<std::size_t> negation_;
};

double norm(const Vec2& k, int dim);
double sup_norm(const Vec2& k, int dim);

}  // namespace spatspec
