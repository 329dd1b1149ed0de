#include "spatspec/models.hpp"

#include <algorithm>
#include <cmath>
#include <Eigen/Eigenvalues>

#include "spatspec/fft.hpp"
#include "spatspec/special.hpp"

namespace spatspec {

void MaternSpec::validate() const {
  if (!(sigma > 0.0) || !(ell > 0.0) || !(nu > 0.0))
    throw ConfigError("Matérn parameters sigma, ell and nu must be positive");
}

double matern_cov(double r, const MaternSpec& s) {
  const double x = std::sqrt(2.0 * s.nu) * std::abs(r) / s.ell;
  const double var = s.sigma * s.sigma;
  if (x < 1e-10) return var;
  const double lognorm = (1.0 - s.nu) * std::log(2.0) - std::lgamma(s.nu);
  const double k = bessel_k(s.nu, x);
  if (k == 0.0) return 0.0;
  return var * std::exp(lognorm + s.nu * std::log(x)) * k;
}

double matern_sdf(double knorm, const MaternSpec& s, int dim) {
  const double d = dim;
  const double a = s.nu + 0.5 * d;
  const double logc = 2.0 * std::log(s.sigma) + d * std::log(2.0) + 0.5 * d * std::log(kPi) +
                      std::lgamma(a) + s.nu * std::log(2.0 * s.nu) - std::lgamma(s.nu) -
                      2.0 * s.nu * std::log(s.ell);
  const double base = 2.0 * s.nu / (s.ell * s.ell) + 4.0 * kPi * kPi * knorm * knorm;
  return std::exp(logc - a * std::log(base));
}

double matern_range(const MaternSpec& s, double tol) {
  const double target = tol * s.sigma * s.sigma;
  double hi = s.ell;
  while (matern_cov(hi, s) > target) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (matern_cov(mid, s) > target ? lo : hi) = mid;
  }
  return hi;
}

double radial_fourier_transform(const std::function<double(double)>& g, double knorm, int dim,
                                double step, double rmax) {
  if (!(step > 0.0) || !(rmax > 0.0)) throw ConfigError("radial transform needs positive step and range");
  long n = static_cast<long>(std::ceil(rmax / step));
  if (n % 2) ++n;
  const double h = rmax / n;
  auto term = [&](double r) {
    const double w = kTwoPi * knorm * r;
    return dim == 1 ? 2.0 * g(r) * std::cos(w) : kTwoPi * r * g(r) * bessel_j0(w);
  };
  double sum = term(0.0) + term(rmax);
  for (long i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * term(i * h);
  return sum * h / 3.0;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

GaussianFieldSampler::GaussianFieldSampler(const MaternSpec& spec, int dim, Vec2 delta,
                                           std::array<int, 2> n, int dense_limit)
    : dim_(dim), n_(n) {
  spec.validate();
  if (dim == 1) n_[1] = 1;
  if (n_[0] < 1 || n_[1] < 1) throw ConfigError("empty sampling rectangle");
  for (int pad = 0; pad < 5; ++pad) {
    std::array<int, 2> m{1, 1};
    for (int j = 0; j < 2; ++j)
      if (n_[j] > 1) m[j] = good_fft_size(std::max(2 * (n_[j] - 1) << pad, 2));
    if (static_cast<double>(m[0]) * m[1] > double(1 << 25)) break;
    std::vector<cdouble> c(static_cast<std::size_t>(m[0]) * m[1]);
    for (int i1 = 0; i1 < m[1]; ++i1)
      for (int i0 = 0; i0 < m[0]; ++i0) {
        const double u0 = std::min(i0, m[0] - i0) * delta[0];
        const double u1 = std::min(i1, m[1] - i1) * delta[1];
        c[static_cast<std::size_t>(i1) * m[0] + i0] = matern_cov(std::hypot(u0, u1), spec);
      }
    fft_inplace(c, m[0], m[1], -1);
    double mx = 0.0, mn = 0.0;
    for (const auto& v : c) {
      mx = std::max(mx, v.real());
      mn = std::min(mn, v.real());
    }
    if (mn >= -1e-8 * mx) {
      m_ = m;
      const double M = static_cast<double>(c.size());
      sqrt_eig_.resize(c.size());
      for (std::size_t i = 0; i < c.size(); ++i) sqrt_eig_[i] = std::sqrt(std::max(c[i].real(), 0.0) / M);
      return;
    }
  }
  const int N = n_[0] * n_[1];
  if (N > dense_limit)
    throw NumericalError("circulant embedding is not positive semi-definite and the grid is too large for a dense factorization");
  Eigen::MatrixXd C(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b <= a; ++b) {
      const double u0 = (a % n_[0] - b % n_[0]) * delta[0];
      const double u1 = (a / n_[0] - b / n_[0]) * delta[1];
      C(a, b) = C(b, a) = matern_cov(std::hypot(u0, u1), spec);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success) throw NumericalError("covariance eigendecomposition failed");
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  dense_ = es.eigenvectors() * d.asDiagonal();
}

std::pair<std::vector<double>, std::vector<double>> GaussianFieldSampler::sample_two(
    std::mt19937_64& rng) const {
  std::normal_distribution<double> normal;
  const std::size_t N = static_cast<std::size_t>(n_[0]) * n_[1];
  std::vector<double> a(N), b(N);
  if (!uses_embedding()) {
    Eigen::VectorXd z1(N), z2(N);
    for (std::size_t i = 0; i < N; ++i) z1[i] = normal(rng);
    for (std::size_t i = 0; i < N; ++i) z2[i] = normal(rng);
    Eigen::VectorXd x1 = dense_ * z1, x2 = dense_ * z2;
    for (std::size_t i = 0; i < N; ++i) {
      a[i] = x1[i];
      b[i] = x2[i];
    }
    return {a, b};
  }
  std::vector<cdouble> e(sqrt_eig_.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    e[i] = sqrt_eig_[i] * cdouble(re, im);
  }
  fft_inplace(e, m_[0], m_[1], -1);
  for (int i1 = 0; i1 < n_[1]; ++i1)
    for (int i0 = 0; i0 < n_[0]; ++i0) {
      const cdouble v = e[static_cast<std::size_t>(i1) * m_[0] + i0];
      a[static_cast<std::size_t>(i1) * n_[0] + i0] = v.real();
      b[static_cast<std::size_t>(i1) * n_[0] + i0] = v.imag();
    }
  return {a, b};
}

std::vector<double> GaussianFieldSampler::sample(std::mt19937_64& rng) const {
  return sample_two(rng).first;
}

namespace {

GriddedField field_on_nodes(const GridNodes& nodes, std::vector<double> values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!nodes.inside[i]) values[i] = 0.0;
  return {nodes, std::move(values)};
}

std::vector<Vec2> poisson_points(const Region& region, double lambda, std::mt19937_64& rng) {
  if (!(lambda > 0.0)) throw ConfigError("intensity must be positive");
  std::vector<std::array<int, 2>> cells;
  cells.reserve(region.included_cells());
  const auto& sh = region.shape();
  for (int i1 = 0; i1 < sh[1]; ++i1)
    for (int i0 = 0; i0 < sh[0]; ++i0)
      if (region.cell_included(i0, i1)) cells.push_back({i0, i1});
  std::poisson_distribution<long> count(lambda * region.area());
  std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const long n = count(rng);
  const Box& bb = region.bbox();
  const Vec2& d = region.delta_ref();
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const auto& c = cells[pick(rng)];
    Vec2 x{bb.lo[0] + (c[0] + unif(rng)) * d[0], 0.0};
    if (region.dim() == 2) x[1] = bb.lo[1] + (c[1] + unif(rng)) * d[1];
    out.push_back(x);
  }
  return out;
}

// Node index range [z0, z0 + n) along one axis with cells [u - d/2, u + d/2)
// meeting [lo, hi).
std::pair<long, int> covering_nodes(double lo, double hi, double d, double s) {
  const long a = static_cast<long>(std::ceil((lo - 0.5 * d - s) / d + 1e-9));
  const long b = static_cast<long>(std::floor((hi + 0.5 * d - s) / d - 1e-9));
  return {a, static_cast<int>(b - a + 1)};
}

}  // namespace

GriddedField simulate_gaussian_field(const MaternSpec& spec, const SamplingScheme& scheme,
                                     const Region& region, std::uint64_t seed) {
  const GridNodes nodes = grid_nodes(scheme, region);
  GaussianFieldSampler sampler(spec, region.dim(), scheme.delta, nodes.n);
  auto rng = make_rng(seed);
  return field_on_nodes(nodes, sampler.sample(rng));
}

PointPattern simulate_poisson(const Region& region, double lambda, std::uint64_t seed) {
  auto rng = make_rng(seed);
  return {region.dim(), poisson_points(region, lambda, rng), {}};
}

std::pair<PointPattern, PointPattern> simulate_shifted_pair(const Region& region, double lambda,
                                                            const Vec2& tau, std::uint64_t seed) {
  if (!(lambda > 0.0)) throw ConfigError("intensity must be positive");
  const int dim = region.dim();
  Box big = region.bbox();
  for (int j = 0; j < dim; ++j) {
    big.lo[j] -= std::abs(tau[j]);
    big.hi[j] += std::abs(tau[j]);
  }
  auto rng = make_rng(seed);
  std::poisson_distribution<long> count(lambda * big.volume());
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const long n = count(rng);
  PointPattern a{dim, {}, {}}, b{dim, {}, {}};
  for (long i = 0; i < n; ++i) {
    Vec2 x{big.lo[0] + unif(rng) * big.side(0), 0.0};
    if (dim == 2) x[1] = big.lo[1] + unif(rng) * big.side(1);
    const Vec2 y{x[0] + tau[0], dim == 2 ? x[1] + tau[1] : 0.0};
    if (region.contains(x)) a.locations.push_back(x);
    if (region.contains(y)) b.locations.push_back(y);
  }
  return {a, b};
}

PointPattern simulate_marked_poisson(const Region& region, double lambda, double mark_mean,
                                     double mark_sd, std::uint64_t seed) {
  if (mark_sd < 0.0) throw ConfigError("mark standard deviation must be non-negative");
  auto rng = make_rng(seed);
  PointPattern p{region.dim(), poisson_points(region, lambda, rng), {}};
  std::normal_distribution<double> normal(0.0, 1.0);
  p.marks.resize(p.size());
  for (auto& m : p.marks) m = mark_mean + mark_sd * normal(rng);
  return p;
}

double lgcp_mu_for_intensity(double lambda, const MaternSpec& spec) {
  return std::log(lambda) - 0.5 * spec.sigma * spec.sigma;
}

double LgcpModel::point_intensity() const {
  return std::exp(mean() + 0.5 * matern.sigma * matern.sigma);
}

LgcpResult simulate_lgcp(const Region& region, double mu, const MaternSpec& spec,
                         const SamplingScheme& data_scheme, int thin_factor, std::uint64_t seed) {
  if (thin_factor < 1) throw ConfigError("thinning factor must be at least 1");
  if (!data_scheme.is_grid()) throw ConfigError("LGCP data scheme must be a grid");
  const int dim = region.dim();
  const Box& bb = region.bbox();
  Vec2 d{data_scheme.delta[0] / thin_factor, dim == 2 ? data_scheme.delta[1] / thin_factor : 1.0};
  const Vec2& s = data_scheme.offset;
  std::array<long, 2> z0{0, 0};
  std::array<int, 2> n{1, 1};
  for (int j = 0; j < dim; ++j) std::tie(z0[j], n[j]) = covering_nodes(bb.lo[j], bb.hi[j], d[j], s[j]);

  GaussianFieldSampler sampler(spec, dim, d, n);
  auto rng = make_rng(seed);
  std::vector<double> y = sampler.sample(rng);
  for (auto& v : y) v += mu;

  LgcpResult out;
  out.points.dim = dim;
  const double cell = dim == 2 ? d[0] * d[1] : d[0];
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  for (int i1 = 0; i1 < n[1]; ++i1)
    for (int i0 = 0; i0 < n[0]; ++i0) {
      const std::size_t i = static_cast<std::size_t>(i1) * n[0] + i0;
      if (i0 + 1 < n[0]) out.max_log_variation = std::max(out.max_log_variation, std::abs(y[i + 1] - y[i]));
      if (i1 + 1 < n[1])
        out.max_log_variation = std::max(out.max_log_variation, std::abs(y[i + n[0]] - y[i]));
      std::poisson_distribution<long> count(std::exp(y[i]) * cell);
      const long c = count(rng);
      const Vec2 u{s[0] + (z0[0] + i0) * d[0], dim == 2 ? s[1] + (z0[1] + i1) * d[1] : 0.0};
      for (long m = 0; m < c; ++m) {
        Vec2 x{u[0] + unif(rng) * d[0], 0.0};
        if (dim == 2) x[1] = u[1] + unif(rng) * d[1];
        if (region.contains(x)) out.points.locations.push_back(x);
      }
    }

  const GridNodes nodes = grid_nodes(data_scheme, region);
  std::vector<double> vals(nodes.size(), 0.0);
  for (int i1 = 0; i1 < nodes.n[1]; ++i1)
    for (int i0 = 0; i0 < nodes.n[0]; ++i0) {
      const std::size_t i = nodes.index(i0, i1);
      if (!nodes.inside[i]) continue;
      const long t0 = (nodes.z0[0] + i0) * thin_factor - z0[0];
      const long t1 = dim == 2 ? (nodes.z0[1] + i1) * thin_factor - z0[1] : 0;
      if (t0 < 0 || t0 >= n[0] || t1 < 0 || t1 >= n[1]) throw NumericalError("data node outside thinning grid");
      vals[i] = y[static_cast<std::size_t>(t1) * n[0] + t0];
    }
  out.field = {nodes, std::move(vals)};
  return out;
}

SamplingScheme common_refinement(const SamplingScheme& a, const SamplingScheme& b) {
  if (!a.is_grid() || !b.is_grid()) throw ConfigError("common refinement needs two grid schemes");
  if (a.dim != b.dim) throw ConfigError("grid schemes differ in dimension");
  SamplingScheme out = SamplingScheme::grid(a.dim, {1.0, 1.0}, {0.0, 0.0});
  for (int j = 0; j < a.dim; ++j) {
    const auto r = rational_approximation(b.delta[j] / a.delta[j]);
    if (!r) throw ConfigError("grid spacings are incommensurate");
    double d = a.delta[j] / r->second;
    double off = (b.offset[j] - a.offset[j]) / d;
    off -= std::floor(off);
    if (off > 1e-9 && off < 1.0 - 1e-9) {
      const auto o = rational_approximation(off);
      if (!o) throw ConfigError("grid offsets are incommensurate");
      d /= o->second;
    }
    out.delta[j] = d;
    out.offset[j] = a.offset[j];
  }
  return out;
}

std::pair<GriddedField, GriddedField> simulate_colocation(const Region& region,
                                                          const MaternSpec& spec,
                                                          const std::array<double, 2>& alpha,
                                                          const std::array<SamplingScheme, 2>& grids,
                                                          std::uint64_t seed) {
  const int dim = region.dim();
  const SamplingScheme fine = common_refinement(grids[0], grids[1]);
  const std::array<GridNodes, 2> nodes{grid_nodes(grids[0], region), grid_nodes(grids[1], region)};
  auto fine_index = [&](const Vec2& u, int j) {
    return std::lround((u[j] - fine.offset[j]) / fine.delta[j]);
  };
  std::array<long, 2> lo{0, 0}, hi{0, 0};
  for (int j = 0; j < dim; ++j) {
    lo[j] = std::numeric_limits<long>::max();
    hi[j] = std::numeric_limits<long>::min();
  }
  for (const auto& nd : nodes)
    for (const Vec2& u : {nd.node(0, 0), nd.node(nd.n[0] - 1, nd.n[1] - 1)})
      for (int j = 0; j < dim; ++j) {
        lo[j] = std::min(lo[j], fine_index(u, j));
        hi[j] = std::max(hi[j], fine_index(u, j));
      }
  std::array<int, 2> fn{1, 1};
  for (int j = 0; j < dim; ++j) fn[j] = static_cast<int>(hi[j] - lo[j] + 1);
  auto rx = make_rng(seed, 0);
  const std::vector<double> x = GaussianFieldSampler(spec, dim, fine.delta, fn).sample(rx);

  std::array<GriddedField, 2> out;
  for (int p = 0; p < 2; ++p) {
    const GridNodes& nd = nodes[p];
    auto ru = make_rng(seed, static_cast<std::uint64_t>(p) + 1);
    std::vector<double> v = GaussianFieldSampler(spec, dim, grids[p].delta, nd.n).sample(ru);
    for (int i1 = 0; i1 < nd.n[1]; ++i1)
      for (int i0 = 0; i0 < nd.n[0]; ++i0) {
        const Vec2 u = nd.node(i0, i1);
        const long f0 = fine_index(u, 0) - lo[0];
        const long f1 = dim == 2 ? fine_index(u, 1) - lo[1] : 0;
        v[nd.index(i0, i1)] += alpha[p] * x[static_cast<std::size_t>(f1) * fn[0] + f0];
      }
    out[p] = field_on_nodes(nd, std::move(v));
  }
  return {out[0], out[1]};
}

GriddedField simulate_white_noise(const Region& region, const SamplingScheme& scheme, double sigma,
                                  double mean, std::uint64_t seed) {
  if (!(sigma > 0.0)) throw ConfigError("white noise sigma must be positive");
  const GridNodes nodes = grid_nodes(scheme, region);
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(nodes.size());
  for (auto& x : v) x = mean + sigma * normal(rng);
  return field_on_nodes(nodes, std::move(v));
}

Surrogate simulate_surrogate(const Region& region, const SurrogateConfig& cfg, std::uint64_t seed) {
  if (!cfg.marks.empty() && cfg.marks.size() != cfg.intensities.size())
    throw ConfigError("surrogate marks must be given for every pattern or none");
  const int dim = region.dim();
  Surrogate out;
  for (std::size_t i = 0; i < cfg.intensities.size(); ++i) {
    auto rng = make_rng(seed, i + 1);
    PointPattern p{dim, poisson_points(region, cfg.intensities[i], rng), {}};
    if (!cfg.marks.empty() && !cfg.marks[i].empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, cfg.marks[i].size() - 1);
      p.marks.resize(p.size());
      for (auto& m : p.marks) m = cfg.marks[i][pick(rng)];
    }
    out.patterns.push_back(std::move(p));
  }
  const GridNodes nodes = grid_nodes(cfg.gradient_scheme, region);
  std::array<int, 2> n{nodes.n[0] + 2, dim == 2 ? nodes.n[1] + 2 : 1};
  auto rng = make_rng(seed, 0);
  const auto y = GaussianFieldSampler(cfg.gradient_spec, dim, cfg.gradient_scheme.delta, n).sample(rng);
  const Vec2& d = cfg.gradient_scheme.delta;
  std::vector<double> g(nodes.size(), 0.0);
  for (int i1 = 0; i1 < nodes.n[1]; ++i1)
    for (int i0 = 0; i0 < nodes.n[0]; ++i0) {
      const int a0 = i0 + 1, a1 = dim == 2 ? i1 + 1 : 0;
      auto at = [&](int b0, int b1) { return y[static_cast<std::size_t>(b1) * n[0] + b0]; };
      const double gx = (at(a0 + 1, a1) - at(a0 - 1, a1)) / (2.0 * d[0]);
      const double gy = dim == 2 ? (at(a0, a1 + 1) - at(a0, a1 - 1)) / (2.0 * d[1]) : 0.0;
      g[nodes.index(i0, i1)] = std::hypot(gx, gy);
    }
  out.gradient = field_on_nodes(nodes, std::move(g));
  return out;
}

std::string model_name(const ModelConfig& model) {
  static const char* names[] = {"poisson", "shifted-pair", "marked-poisson", "lgcp", "colocation",
                                "white-noise"};
  return names[model.index()];
}

namespace {

void check_scheme(const SamplingScheme& s, int dim) {
  if (!s.is_grid()) throw ConfigError("model field scheme must be a grid");
  if (s.dim != dim) throw ConfigError("model scheme dimension differs from region");
  for (int j = 0; j < dim; ++j)
    if (!(s.delta[j] > 0.0)) throw ConfigError("grid spacing must be positive");
}

}  // namespace

void validate_model(const ModelConfig& model, int dim) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PoissonModel> || std::is_same_v<T, ShiftedPairModel> ||
                      std::is_same_v<T, MarkedPoissonModel>) {
          if (!(m.lambda > 0.0)) throw ConfigError("intensity must be positive");
        }
        if constexpr (std::is_same_v<T, MarkedPoissonModel>) {
          if (m.mark_sd < 0.0) throw ConfigError("mark standard deviation must be non-negative");
        }
        if constexpr (std::is_same_v<T, LgcpModel>) {
          m.matern.validate();
          check_scheme(m.data_scheme, dim);
          if (m.thin_factor < 1) throw ConfigError("thinning factor must be at least 1");
        }
        if constexpr (std::is_same_v<T, ColocationModel>) {
          m.matern.validate();
          check_scheme(m.grids[0], dim);
          check_scheme(m.grids[1], dim);
        }
        if constexpr (std::is_same_v<T, WhiteNoiseModel>) {
          if (!(m.sigma > 0.0)) throw ConfigError("white noise sigma must be positive");
          check_scheme(m.scheme, dim);
        }
      },
      model);
}

Simulation simulate(const ModelConfig& model, const Region& region, std::uint64_t seed) {
  validate_model(model, region.dim());
  Simulation sim;
  auto add = [&sim](std::string label, std::variant<PointPattern, GriddedField> data) {
    Process p;
    p.label = std::move(label);
    p.data = std::move(data);
    sim.processes.push_back(std::move(p));
  };
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PoissonModel>) {
          add("points", simulate_poisson(region, m.lambda, seed));
        } else if constexpr (std::is_same_v<T, ShiftedPairModel>) {
          auto [a, b] = simulate_shifted_pair(region, m.lambda, m.tau, seed);
          add("A", std::move(a));
          add("B", std::move(b));
        } else if constexpr (std::is_same_v<T, MarkedPoissonModel>) {
          add("marked", simulate_marked_poisson(region, m.lambda, m.mark_mean, m.mark_sd, seed));
        } else if constexpr (std::is_same_v<T, LgcpModel>) {
          auto r = simulate_lgcp(region, m.mean(), m.matern, m.data_scheme, m.thin_factor, seed);
          add("field", std::move(r.field));
          add("points", std::move(r.points));
          sim.max_log_variation = r.max_log_variation;
        } else if constexpr (std::is_same_v<T, ColocationModel>) {
          auto [y1, y2] = simulate_colocation(region, m.matern, m.alpha, m.grids, seed);
          add("Y1", std::move(y1));
          add("Y2", std::move(y2));
        } else {
          add("field", simulate_white_noise(region, m.scheme, m.sigma, m.mean, seed));
        }
      },
      model);
  return sim;
}

double lgcp_log_term(double knorm, const MaternSpec& spec, int dim, double step_scale) {
  const double rmax = matern_range(spec, 1e-16);
  double step = spec.ell / 100.0;
  if (knorm > 0.0) step = std::min(step, 1.0 / (16.0 * knorm));
  step *= step_scale;
  return radial_fourier_transform([&](double r) { return std::expm1(matern_cov(r, spec)); }, knorm,
                                  dim, step, rmax);
}

Spectrum TrueSpectrum::pair(int p, int q) const {
  const std::size_t i = static_cast<std::size_t>(p) * P + q;
  auto fn = f;
  return {[fn, p, q](const Vec2& k) { return fn(k, p, q); }, decays[i] != 0, support[i]};
}

TrueSpectrum true_spectrum(const ModelConfig& model, int dim) {
  validate_model(model, dim);
  TrueSpectrum t;
  t.dim = dim;
  t.method = "closed-form";
  auto knorm = [dim](const Vec2& k) { return norm(k, dim); };
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PoissonModel>) {
          t.P = 1;
          t.labels = {"points"};
          const double lam = m.lambda;
          t.f = [lam](const Vec2&, int, int) { return cdouble(lam); };
          t.decays = {0};
        } else if constexpr (std::is_same_v<T, ShiftedPairModel>) {
          t.P = 2;
          t.labels = {"A", "B"};
          const double lam = m.lambda;
          const Vec2 tau = m.tau;
          t.f = [lam, tau, dim](const Vec2& k, int p, int q) {
            if (p == q) return cdouble(lam);
            const double ph = kTwoPi * (tau[0] * k[0] + (dim == 2 ? tau[1] * k[1] : 0.0));
            return lam * std::polar(1.0, p == 0 ? ph : -ph);
          };
          t.decays = {0, 0, 0, 0};
        } else if constexpr (std::is_same_v<T, MarkedPoissonModel>) {
          t.P = 1;
          t.labels = {"marked"};
          const double v = m.lambda * (m.mark_mean * m.mark_mean + m.mark_sd * m.mark_sd);
          t.f = [v](const Vec2&, int, int) { return cdouble(v); };
          t.decays = {0};
        } else if constexpr (std::is_same_v<T, LgcpModel>) {
          t.P = 2;
          t.labels = {"field", "points"};
          t.method = "numeric-FT";
          const MaternSpec spec = m.matern;
          const double lq = m.point_intensity();
          t.f = [spec, lq, dim, knorm](const Vec2& k, int p, int q) {
            const double kn = knorm(k);
            if (p == 0 && q == 0) return cdouble(matern_sdf(kn, spec, dim));
            if (p != q) return cdouble(lq * matern_sdf(kn, spec, dim));
            return cdouble(lq * lq * lgcp_log_term(kn, spec, dim) + lq);
          };
          t.decays = {1, 1, 1, 0};
        } else if constexpr (std::is_same_v<T, ColocationModel>) {
          t.P = 2;
          t.labels = {"Y1", "Y2"};
          const MaternSpec spec = m.matern;
          const auto alpha = m.alpha;
          t.f = [spec, alpha, dim, knorm](const Vec2& k, int p, int q) {
            const double s = matern_sdf(knorm(k), spec, dim);
            return cdouble((p == q ? s : 0.0) + alpha[p] * alpha[q] * s);
          };
          t.decays = {1, 1, 1, 1};
        } else {
          t.P = 1;
          t.labels = {"field"};
          const double v = m.sigma * m.sigma * m.scheme.cell_volume();
          const Box nb = nyquist_box(m.scheme);
          t.f = [v, nb](const Vec2& k, int, int) { return nb.contains(k) ? cdouble(v) : cdouble(0.0); };
          t.decays = {0};
          t.support = {nb};
        }
      },
      model);
  if (t.support.empty()) t.support.assign(static_cast<std::size_t>(t.P) * t.P, std::nullopt);
  return t;
}

}  // namespace spatspec
