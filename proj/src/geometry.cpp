#include "spatspec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

namespace spatspec {

namespace {

void check_dim(int dim) {
  if (dim != 1 && dim != 2) throw ConfigError("dimension must be 1 or 2");
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

double Box::volume() const {
  double v = side(0);
  if (dim == 2) v *= side(1);
  return v;
}

bool Box::contains(const Vec2& u) const {
  for (int j = 0; j < dim; ++j)
    if (u[j] < lo[j] || u[j] > hi[j]) return false;
  return true;
}

Region::Region(Box bbox, Vec2 delta_ref, std::vector<std::uint8_t> mask)
    : bbox_(bbox), delta_(delta_ref), mask_(std::move(mask)) {
  check_dim(bbox_.dim);
  if (bbox_.dim == 1) {
    bbox_.lo[1] = 0.0;
    bbox_.hi[1] = 1.0;
    delta_[1] = 1.0;
  }
  for (int j = 0; j < bbox_.dim; ++j) {
    if (!(bbox_.side(j) > 0.0)) throw ConfigError("region bounding box has non-positive side");
    if (!(delta_[j] > 0.0)) throw ConfigError("delta_ref must be positive");
    const double cells = bbox_.side(j) / delta_[j];
    shape_[j] = static_cast<int>(std::lround(cells));
    if (shape_[j] < 1 || std::abs(cells - shape_[j]) > 1.0)
      throw ConfigError("mask dimensions inconsistent with bbox and delta_ref");
  }
  if (bbox_.dim == 1) shape_[1] = 1;
  const std::size_t expected = static_cast<std::size_t>(shape_[0]) * shape_[1];
  if (mask_.size() != expected)
    throw ConfigError("mask has " + std::to_string(mask_.size()) + " cells, expected " +
                      std::to_string(expected));
  for (auto& m : mask_) m = m ? 1 : 0;
  included_ = static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));
  area_ = static_cast<double>(included_) * cell_volume();
}

Vec2 Region::default_delta(const Box& bbox) {
  double m = bbox.side(0);
  if (bbox.dim == 2) m = std::min(m, bbox.side(1));
  const double d = m / 256.0;
  return {d, bbox.dim == 2 ? d : 1.0};
}

Region Region::rectangle(const Box& bbox, std::optional<Vec2> delta_ref) {
  check_dim(bbox.dim);
  Vec2 d = delta_ref.value_or(default_delta(bbox));
  std::size_t n0 = static_cast<std::size_t>(std::lround(bbox.side(0) / d[0]));
  std::size_t n1 = bbox.dim == 2 ? static_cast<std::size_t>(std::lround(bbox.side(1) / d[1])) : 1;
  if (n0 == 0 || n1 == 0) throw ConfigError("delta_ref larger than the bounding box");
  return Region(bbox, d, std::vector<std::uint8_t>(n0 * n1, 1));
}

double Region::cell_volume() const {
  return bbox_.dim == 2 ? delta_[0] * delta_[1] : delta_[0];
}

Vec2 Region::cell_center(int i0, int i1) const {
  Vec2 c{bbox_.lo[0] + (i0 + 0.5) * delta_[0], 0.0};
  if (bbox_.dim == 2) c[1] = bbox_.lo[1] + (i1 + 0.5) * delta_[1];
  return c;
}

std::optional<std::array<int, 2>> Region::cell_of(const Vec2& u) const {
  std::array<int, 2> c{0, 0};
  for (int j = 0; j < bbox_.dim; ++j) {
    const double t = (u[j] - bbox_.lo[j]) / delta_[j];
    if (!(t >= 0.0) || t > shape_[j]) return std::nullopt;
    c[j] = std::min(static_cast<int>(std::floor(t)), shape_[j] - 1);
  }
  return c;
}

bool Region::contains(const Vec2& u) const {
  auto c = cell_of(u);
  return c && cell_included((*c)[0], (*c)[1]);
}

std::string Region::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const int dim = bbox_.dim;
  h = fnv1a(h, &dim, sizeof dim);
  h = fnv1a(h, bbox_.lo.data(), sizeof(double) * 2);
  h = fnv1a(h, bbox_.hi.data(), sizeof(double) * 2);
  h = fnv1a(h, delta_.data(), sizeof(double) * 2);
  h = fnv1a(h, shape_.data(), sizeof(int) * 2);
  h = fnv1a(h, mask_.data(), mask_.size());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SamplingScheme SamplingScheme::continuous(int dim) {
  check_dim(dim);
  SamplingScheme s;
  s.kind = Kind::Continuous;
  s.dim = dim;
  return s;
}

SamplingScheme SamplingScheme::grid(int dim, Vec2 delta, Vec2 offset) {
  check_dim(dim);
  SamplingScheme s;
  s.kind = Kind::Grid;
  s.dim = dim;
  s.delta = delta;
  s.offset = offset;
  if (dim == 1) {
    s.delta[1] = 1.0;
    s.offset[1] = 0.0;
  }
  for (int j = 0; j < dim; ++j)
    if (!(s.delta[j] > 0.0) || !std::isfinite(s.delta[j]))
      throw ConfigError("grid spacing must be positive");
  return s;
}

double SamplingScheme::cell_volume() const {
  if (!is_grid()) return 1.0;
  return dim == 2 ? delta[0] * delta[1] : delta[0];
}

bool SamplingScheme::operator==(const SamplingScheme& o) const {
  if (kind != o.kind || dim != o.dim) return false;
  if (!is_grid()) return true;
  for (int j = 0; j < dim; ++j)
    if (delta[j] != o.delta[j] || offset[j] != o.offset[j]) return false;
  return true;
}

Vec2 GridNodes::node(int i0, int i1) const {
  Vec2 u{(z0[0] + i0) * scheme.delta[0] + scheme.offset[0], 0.0};
  if (scheme.dim == 2) u[1] = (z0[1] + i1) * scheme.delta[1] + scheme.offset[1];
  return u;
}

bool GridNodes::operator==(const GridNodes& o) const {
  return scheme == o.scheme && z0 == o.z0 && n == o.n && inside == o.inside;
}

GridNodes grid_nodes(const SamplingScheme& scheme, const Region& region) {
  if (!scheme.is_grid()) throw ConfigError("grid nodes requested for a continuous scheme");
  if (scheme.dim != region.dim()) throw ConfigError("scheme and region dimensions differ");
  GridNodes g;
  g.scheme = scheme;
  const Box& bb = region.bbox();
  for (int j = 0; j < scheme.dim; ++j) {
    const double a = (bb.lo[j] - scheme.offset[j]) / scheme.delta[j];
    const double b = (bb.hi[j] - scheme.offset[j]) / scheme.delta[j];
    // Half-open box: nodes exactly on the upper edge are excluded.
    long lo = static_cast<long>(std::ceil(a - 1e-9));
    long hi = static_cast<long>(std::ceil(b - 1e-9)) - 1;
    if (hi < lo) throw ConfigError("grid has no nodes inside region");
    g.z0[j] = lo;
    g.n[j] = static_cast<int>(hi - lo + 1);
  }
  g.inside.assign(static_cast<std::size_t>(g.n[0]) * g.n[1], 0);
  for (int i1 = 0; i1 < g.n[1]; ++i1)
    for (int i0 = 0; i0 < g.n[0]; ++i0) {
      Vec2 u = g.node(i0, i1);
      auto c = region.cell_of(u);
      if (c && region.cell_included((*c)[0], (*c)[1])) {
        g.inside[g.index(i0, i1)] = 1;
        ++g.count;
      }
    }
  if (g.count == 0) throw ConfigError("grid has no nodes inside region");
  return g;
}

bool AliasLattice::trivial() const {
  for (int j = 0; j < dim; ++j)
    if (generator[j] != 0.0) return false;
  return true;
}

std::vector<Vec2> AliasLattice::points(const Vec2& radius) const {
  std::array<long, 2> n{0, 0};
  for (int j = 0; j < dim; ++j)
    if (generator[j] > 0.0) n[j] = static_cast<long>(std::floor(radius[j] / generator[j] + 1e-12));
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>((2 * n[0] + 1) * (2 * n[1] + 1)));
  for (long z1 = -n[1]; z1 <= n[1]; ++z1)
    for (long z0 = -n[0]; z0 <= n[0]; ++z0) out.push_back({z0 * generator[0], z1 * generator[1]});
  return out;
}

std::array<long, 2> AliasLattice::index_of(const Vec2& psi) const {
  std::array<long, 2> z{0, 0};
  for (int j = 0; j < dim; ++j)
    if (generator[j] > 0.0) z[j] = std::lround(psi[j] / generator[j]);
  return z;
}

AliasStructure AliasStructure::of(const SamplingScheme& scheme) {
  AliasStructure a;
  a.lattice.dim = scheme.dim;
  if (scheme.is_grid()) {
    for (int j = 0; j < scheme.dim; ++j) a.lattice.generator[j] = 1.0 / scheme.delta[j];
    a.offset = scheme.offset;
  }
  return a;
}

cdouble AliasStructure::phase(const Vec2& psi) const {
  if (lattice.trivial()) return {1.0, 0.0};
  // s.psi = sum_j s_j z_j / Delta_j; reduce each term modulo 1 for accuracy.
  const auto z = lattice.index_of(psi);
  double t = 0.0;
  for (int j = 0; j < lattice.dim; ++j) {
    if (lattice.generator[j] == 0.0) continue;
    const double c = offset[j] * lattice.generator[j];
    const double frac = c - std::floor(c);
    double tj = std::fmod(frac * static_cast<double>(z[j]), 1.0);
    t += tj;
  }
  return std::polar(1.0, -kTwoPi * t);
}

Box nyquist_box(const SamplingScheme& scheme) {
  if (!scheme.is_grid()) throw ConfigError("no Nyquist box for continuous sampling");
  Box b;
  b.dim = scheme.dim;
  for (int j = 0; j < scheme.dim; ++j) {
    b.lo[j] = -0.5 / scheme.delta[j];
    b.hi[j] = 0.5 / scheme.delta[j];
  }
  return b;
}

std::vector<AliasPoint> alias_set(const SamplingScheme& scheme, double radius) {
  if (radius < 0.0) throw ConfigError("alias radius must be non-negative");
  const AliasStructure a = AliasStructure::of(scheme);
  std::vector<AliasPoint> out;
  for (const Vec2& psi : a.lattice.points({radius, radius})) out.push_back({psi, a.phase(psi)});
  return out;
}

std::optional<std::pair<long, long>> rational_approximation(double x, double rel_tol,
                                                            long max_den) {
  if (!(x > 0.0) || !std::isfinite(x)) return std::nullopt;
  // Continued-fraction convergents h/k.
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a_d = std::floor(r);
    if (a_d > 1e12) break;
    const long a = static_cast<long>(a_d);
    const long h2 = a * h1 + h0;
    const long k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(x - static_cast<double>(h1) / k1) <= rel_tol * x) {
      const long g = std::gcd(h1, k1);
      return std::make_pair(h1 / g, k1 / g);
    }
    const double f = r - a_d;
    if (f <= 0.0) break;
    r = 1.0 / f;
  }
  return std::nullopt;
}

AliasLattice alias_intersection(const AliasLattice& a, const AliasLattice& b) {
  AliasLattice out;
  out.dim = a.dim;
  for (int j = 0; j < a.dim; ++j) {
    const double ga = a.generator[j], gb = b.generator[j];
    if (ga == 0.0 || gb == 0.0) continue;
    // ga/gb = p/q in lowest terms  =>  lattice intersection is generated by q*ga = p*gb.
    auto pq = rational_approximation(ga / gb);
    if (!pq) continue;
    out.generator[j] = static_cast<double>(pq->second) * ga;
  }
  return out;
}

AliasLattice alias_intersection(const SamplingScheme& a, const SamplingScheme& b) {
  if (a.dim != b.dim) throw ConfigError("schemes of different dimension");
  return alias_intersection(AliasStructure::of(a).lattice, AliasStructure::of(b).lattice);
}

WavenumberGrid WavenumberGrid::regular(int dim, Vec2 step, std::array<int, 2> half) {
  check_dim(dim);
  if (dim == 1) {
    half[1] = 0;
    step[1] = 0.0;
  }
  for (int j = 0; j < dim; ++j) {
    if (half[j] < 0) throw ConfigError("negative wavenumber grid extent");
    if (half[j] > 0 && !(step[j] > 0.0)) throw ConfigError("wavenumber step must be positive");
  }
  WavenumberGrid g;
  g.dim_ = dim;
  g.regular_ = true;
  g.symmetric_ = true;
  g.step_ = step;
  g.half_ = half;
  g.points_.reserve(static_cast<std::size_t>((2 * half[0] + 1) * (2 * half[1] + 1)));
  for (int i1 = -half[1]; i1 <= half[1]; ++i1)
    for (int i0 = -half[0]; i0 <= half[0]; ++i0) g.points_.push_back({i0 * step[0], i1 * step[1]});
  return g;
}

WavenumberGrid WavenumberGrid::from_points(int dim, std::vector<Vec2> points) {
  check_dim(dim);
  WavenumberGrid g;
  g.dim_ = dim;
  if (dim == 1)
    for (auto& p : points) p[1] = 0.0;
  g.points_ = std::move(points);
  std::map<std::pair<double, double>, std::size_t> where;
  for (std::size_t i = 0; i < g.points_.size(); ++i)
    where.emplace(std::make_pair(g.points_[i][0], g.points_[i][1]), i);
  g.negation_.resize(g.points_.size());
  g.symmetric_ = !g.points_.empty();
  for (std::size_t i = 0; i < g.points_.size(); ++i) {
    auto it = where.find({-g.points_[i][0] + 0.0, -g.points_[i][1] + 0.0});
    if (it == where.end()) {
      g.symmetric_ = false;
      break;
    }
    g.negation_[i] = it->second;
  }
  if (!g.symmetric_) g.negation_.clear();
  return g;
}

WavenumberGrid WavenumberGrid::fourier(const Box& bbox, double oversample, const Vec2& kmax) {
  if (!(oversample > 0.0)) throw ConfigError("oversample must be positive");
  Vec2 step{0.0, 0.0};
  std::array<int, 2> half{0, 0};
  for (int j = 0; j < bbox.dim; ++j) {
    step[j] = 1.0 / (oversample * bbox.side(j));
    half[j] = static_cast<int>(std::floor(kmax[j] / step[j] + 1e-9));
  }
  return regular(bbox.dim, step, half);
}

std::size_t WavenumberGrid::negated(std::size_t i) const {
  if (!symmetric_) throw ConfigError("wavenumber grid is not symmetric");
  if (regular_) return points_.size() - 1 - i;
  return negation_[i];
}

double norm(const Vec2& k, int dim) {
  return dim == 2 ? std::hypot(k[0], k[1]) : std::abs(k[0]);
}

double sup_norm(const Vec2& k, int dim) {
  return dim == 2 ? std::max(std::abs(k[0]), std::abs(k[1])) : std::abs(k[0]);
}

}  // namespace spatspec
