#include "spatspec/tapers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spatspec/eigensolver.hpp"
#include "spatspec/fft.hpp"
#include "spatspec/io.hpp"
#include "spatspec/parallel.hpp"
#include "spatspec/special.hpp"

namespace spatspec {

namespace {

std::vector<std::size_t> included_cells(const Region& region) {
  std::vector<std::size_t> cells;
  cells.reserve(region.included_cells());
  for (std::size_t i = 0; i < region.lattice_size(); ++i)
    if (region.mask()[i]) cells.push_back(i);
  return cells;
}

// kernel(l0 * d0, l1 * d1) for lags |l_j| < n_j, stored at (l1 + n1 - 1) * (2 n0 - 1) + l0 + n0 - 1.
std::vector<double> lag_table(const Region& region, double b) {
  const auto shape = region.shape();
  const int w0 = 2 * shape[0] - 1, w1 = 2 * shape[1] - 1;
  const Vec2 d = region.delta_ref();
  const int dim = region.dim();
  std::vector<double> table(static_cast<std::size_t>(w0) * w1);
  parallel_for(static_cast<std::size_t>(w1), [&](std::size_t r) {
    const int l1 = static_cast<int>(r) - (shape[1] - 1);
    for (int l0 = -(shape[0] - 1); l0 < shape[0]; ++l0) {
      const double dist = dim == 2 ? std::hypot(l0 * d[0], l1 * d[1]) : std::abs(l0 * d[0]);
      table[r * w0 + static_cast<std::size_t>(l0 + shape[0] - 1)] = ball_kernel(dist, b, dim);
    }
  });
  return table;
}

double shannon_number(const Region& region, double b) {
  return region.dim() == 2 ? region.area() * kPi * b * b : 2.0 * b * region.area();
}

void fix_sign(std::vector<double>& v) {
  double s = 0.0, amax = 0.0, at = 0.0;
  for (double x : v) {
    s += x;
    if (std::abs(x) > amax + 1e-12 * amax) {
      amax = std::abs(x);
      at = x;
    }
  }
  const double ref = std::abs(s) > 1e-8 * amax * std::sqrt(static_cast<double>(v.size())) ? s : at;
  if (ref < 0)
    for (double& x : v) x = -x;
}

// Mass matrix of the 1D hat basis: 2/3 on the diagonal, 1/6 off it.
void apply_hat_mass(const std::vector<double>& in, std::vector<double>& out, int n0, int n1, int dim) {
  std::vector<double> tmp(in.size());
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i0 = 0; i0 < n0; ++i0) {
      const std::size_t i = static_cast<std::size_t>(i1) * n0 + i0;
      double v = 2.0 / 3.0 * in[i];
      if (i0 > 0) v += in[i - 1] / 6.0;
      if (i0 + 1 < n0) v += in[i + 1] / 6.0;
      tmp[i] = v;
    }
  if (dim == 1) {
    out = tmp;
    return;
  }
  out.assign(in.size(), 0.0);
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i0 = 0; i0 < n0; ++i0) {
      const std::size_t i = static_cast<std::size_t>(i1) * n0 + i0;
      double v = 2.0 / 3.0 * tmp[i];
      if (i1 > 0) v += tmp[i - n0] / 6.0;
      if (i1 + 1 < n1) v += tmp[i + n0] / 6.0;
      out[i] = v;
    }
}

// max over z (including the zero border) and v in {0,1}^d \ {0} of |h(z + v) - h(z)|.
double max_neighbour_difference(const std::vector<double>& h, int n0, int n1, int dim) {
  auto at = [&](int i0, int i1) {
    if (i0 < 0 || i1 < 0 || i0 >= n0 || i1 >= n1) return 0.0;
    return h[static_cast<std::size_t>(i1) * n0 + i0];
  };
  double m = 0.0;
  const int lo1 = dim == 2 ? -1 : 0;
  for (int i1 = lo1; i1 < n1; ++i1)
    for (int i0 = -1; i0 < n0; ++i0) {
      const double base = at(i0, i1);
      m = std::max(m, std::abs(at(i0 + 1, i1) - base));
      if (dim == 2) {
        m = std::max(m, std::abs(at(i0, i1 + 1) - base));
        m = std::max(m, std::abs(at(i0 + 1, i1 + 1) - base));
      }
    }
  return m;
}

}  // namespace

Eigen::MatrixXd concentration_matrix(const Region& region, double bandwidth) {
  const auto cells = included_cells(region);
  const auto shape = region.shape();
  const int w0 = 2 * shape[0] - 1;
  const std::vector<double> table = lag_table(region, bandwidth);
  const double dv = region.cell_volume();
  const Eigen::Index n = static_cast<Eigen::Index>(cells.size());
  Eigen::MatrixXd a(n, n);
  parallel_for(cells.size(), [&](std::size_t c) {
    const int j0 = static_cast<int>(cells[c] % shape[0]), j1 = static_cast<int>(cells[c] / shape[0]);
    for (std::size_t r = 0; r < cells.size(); ++r) {
      const int i0 = static_cast<int>(cells[r] % shape[0]), i1 = static_cast<int>(cells[r] / shape[0]);
      const std::size_t idx = static_cast<std::size_t>(i1 - j1 + shape[1] - 1) * w0 +
                              static_cast<std::size_t>(i0 - j0 + shape[0] - 1);
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = dv * table[idx];
    }
  });
  return a;
}

ConcentrationOperator::ConcentrationOperator(const Region& region, double bandwidth)
    : shape_(region.shape()), cell_volume_(region.cell_volume()), cells_(included_cells(region)) {
  const int dim = region.dim();
  pad_[0] = good_fft_size(2 * shape_[0] - 1);
  pad_[1] = dim == 2 ? good_fft_size(2 * shape_[1] - 1) : 1;
  const std::vector<double> table = lag_table(region, bandwidth);
  const int w0 = 2 * shape_[0] - 1;
  kernel_hat_.assign(static_cast<std::size_t>(pad_[0]) * pad_[1], 0.0);
  for (int l1 = -(shape_[1] - 1); l1 < shape_[1]; ++l1)
    for (int l0 = -(shape_[0] - 1); l0 < shape_[0]; ++l0) {
      const int p0 = (l0 + pad_[0]) % pad_[0], p1 = (l1 + pad_[1]) % pad_[1];
      kernel_hat_[static_cast<std::size_t>(p1) * pad_[0] + p0] =
          table[static_cast<std::size_t>(l1 + shape_[1] - 1) * w0 + (l0 + shape_[0] - 1)];
    }
  fft_inplace(kernel_hat_, pad_[0], pad_[1], -1);
  const double norm = cell_volume_ / (static_cast<double>(pad_[0]) * pad_[1]);
  for (auto& v : kernel_hat_) v *= norm;
}

void ConcentrationOperator::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  std::vector<cdouble> buf(kernel_hat_.size(), 0.0);
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const std::size_t i0 = cells_[c] % shape_[0], i1 = cells_[c] / shape_[0];
    buf[i1 * pad_[0] + i0] = x[static_cast<Eigen::Index>(c)];
  }
  fft_inplace(buf, pad_[0], pad_[1], -1);
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= kernel_hat_[i];
  fft_inplace(buf, pad_[0], pad_[1], +1);
  y.resize(static_cast<Eigen::Index>(cells_.size()));
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const std::size_t i0 = cells_[c] % shape_[0], i1 = cells_[c] / shape_[0];
    y[static_cast<Eigen::Index>(c)] = buf[i1 * pad_[0] + i0].real();
  }
}

TaperFamily compute_tapers(const Region& region, const TaperOptions& opt) {
  if (!(opt.bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
  if (region.included_cells() == 0) throw ConfigError("region mask is empty");
  if (opt.count < 0) throw ConfigError("taper count must be non-negative");
  const auto cells = included_cells(region);
  const int n = static_cast<int>(cells.size());
  if (opt.count > n) throw ConfigError("more tapers requested than mask cells");

  EigenPairs pairs;
  if (n <= opt.dense_limit) {
    const Eigen::MatrixXd a = concentration_matrix(region, opt.bandwidth);
    pairs = opt.count > 0 ? dense_top_eigenpairs(a, opt.count)
                          : dense_top_eigenpairs(a, 0, opt.threshold);
    if (pairs.values.size() == 0) pairs = dense_top_eigenpairs(a, 1);
  } else {
    const ConcentrationOperator op(region, opt.bandwidth);
    MatVec mv = [&op](const Eigen::VectorXd& x, Eigen::VectorXd& y) { op.apply(x, y); };
    // The whole cluster of eigenvalues near 1 is resolved even when fewer
    // tapers are requested; Lanczos stalls on a partial cluster.
    int nev = std::min(n, std::max(opt.count, static_cast<int>(std::ceil(
                                                  1.1 * shannon_number(region, opt.bandwidth))) + 8));
    for (;;) {
      pairs = lanczos_top_eigenpairs(n, mv, nev, 1.0);
      if (opt.count > 0 || pairs.values[nev - 1] < opt.threshold || nev == n) break;
      nev = std::min(n, 2 * nev);
    }
  }

  int keep = 0;
  for (Eigen::Index j = 0; j < pairs.values.size(); ++j)
    if (pairs.values[j] >= opt.threshold) ++keep;
  if (keep == 0 || (opt.count > 0 && keep < opt.count)) {
    std::ostringstream msg;
    msg.precision(6);
    if (keep == 0)
      msg << "no taper reaches concentration " << opt.threshold << "; best concentration is "
          << pairs.values[0];
    else
      msg << "only " << keep << " of " << opt.count << " tapers reach concentration "
          << opt.threshold << "; smallest requested is " << pairs.values[pairs.values.size() - 1];
    throw ConfigError(msg.str());
  }

  if (opt.count > 0) keep = opt.count;
  TaperFamily fam{region, opt.bandwidth, {}, {}, 1.0 / std::sqrt(region.cell_volume())};
  for (int m = 0; m < keep; ++m) {
    std::vector<double> v(region.lattice_size(), 0.0);
    for (std::size_t c = 0; c < cells.size(); ++c) v[cells[c]] = pairs.vectors(static_cast<Eigen::Index>(c), m);
    fix_sign(v);
    fam.values.push_back(std::move(v));
    fam.concentrations.push_back(pairs.values[m]);
  }
  return fam;
}

double TaperFamily::interpolated_value(int m, const Vec2& u) const {
  const Box& bb = region.bbox();
  if (!bb.contains(u)) return 0.0;
  const auto shape = region.shape();
  const Vec2 d = region.delta_ref();
  const auto& h = values.at(static_cast<std::size_t>(m));
  std::array<int, 2> i{0, 0};
  std::array<double, 2> f{0.0, 0.0};
  const int dim = region.dim();
  for (int j = 0; j < dim; ++j) {
    const double t = (u[j] - bb.lo[j]) / d[j] - 0.5;
    i[j] = static_cast<int>(std::floor(t));
    f[j] = t - i[j];
  }
  auto at = [&](int i0, int i1) {
    if (i0 < 0 || i0 >= shape[0] || i1 < 0 || i1 >= shape[1]) return 0.0;
    return h[region.index(i0, i1)];
  };
  double v;
  if (dim == 1) {
    v = (1.0 - f[0]) * at(i[0], 0) + f[0] * at(i[0] + 1, 0);
  } else {
    v = (1.0 - f[0]) * (1.0 - f[1]) * at(i[0], i[1]) + f[0] * (1.0 - f[1]) * at(i[0] + 1, i[1]) +
        (1.0 - f[0]) * f[1] * at(i[0], i[1] + 1) + f[0] * f[1] * at(i[0] + 1, i[1] + 1);
  }
  return norm_scale * v;
}

LatticeTransform TaperFamily::continuous_transform(int m) const {
  LatticeTransform t;
  t.dim = region.dim();
  const Vec2 d = region.delta_ref();
  t.origin = {region.bbox().lo[0] + 0.5 * d[0], t.dim == 2 ? region.bbox().lo[1] + 0.5 * d[1] : 0.0};
  t.spacing = d;
  t.n = region.shape();
  t.weights = values.at(static_cast<std::size_t>(m));
  for (double& w : t.weights) w *= norm_scale;
  t.scale = region.cell_volume();
  t.sinc_power = 2;
  return t;
}

std::vector<double> TaperFamily::lattice_gram() const {
  const int mm = count();
  std::vector<double> g(static_cast<std::size_t>(mm) * mm);
  for (int a = 0; a < mm; ++a)
    for (int b = 0; b < mm; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < values[a].size(); ++i) s += values[a][i] * values[b][i];
      g[static_cast<std::size_t>(a) * mm + b] = s;
    }
  return g;
}

std::vector<double> TaperFamily::interpolated_gram() const {
  const int mm = count();
  const auto shape = region.shape();
  std::vector<std::vector<double>> smoothed(static_cast<std::size_t>(mm));
  for (int a = 0; a < mm; ++a) apply_hat_mass(values[a], smoothed[a], shape[0], shape[1], dim());
  std::vector<double> g(static_cast<std::size_t>(mm) * mm);
  // norm_scale^2 * cell volume = 1.
  for (int a = 0; a < mm; ++a)
    for (int b = 0; b < mm; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < values[a].size(); ++i) s += values[a][i] * smoothed[b][i];
      g[static_cast<std::size_t>(a) * mm + b] = s;
    }
  return g;
}

double TaperFamily::interpolation_drift_bound(int m, int mp) const {
  const auto shape = region.shape();
  const auto& g = values.at(static_cast<std::size_t>(m));
  const auto& h = values.at(static_cast<std::size_t>(mp));
  double g1 = 0.0, h1 = 0.0;
  for (double x : g) g1 += std::abs(x);
  for (double x : h) h1 += std::abs(x);
  return g1 * max_neighbour_difference(h, shape[0], shape[1], dim()) +
         h1 * max_neighbour_difference(g, shape[0], shape[1], dim());
}

LatticeTransform SampledTaper::transform() const {
  LatticeTransform t;
  t.dim = nodes.scheme.dim;
  t.origin = nodes.node(0, 0);
  t.spacing = nodes.scheme.delta;
  t.n = nodes.n;
  t.weights = weights;
  t.scale = scale;
  return t;
}

SampledTaper sample_taper(const TaperFamily& family, int m, const SamplingScheme& scheme) {
  if (!scheme.is_grid()) throw ConfigError("sampled tapers need a grid scheme");
  if (m < 0 || m >= family.count()) throw ConfigError("taper index out of range");
  SampledTaper st;
  st.nodes = grid_nodes(scheme, family.region);
  st.scale = scheme.cell_volume();
  st.weights.assign(st.nodes.size(), 0.0);
  for (int i1 = 0; i1 < st.nodes.n[1]; ++i1)
    for (int i0 = 0; i0 < st.nodes.n[0]; ++i0) {
      const std::size_t i = st.nodes.index(i0, i1);
      if (st.nodes.inside[i]) st.weights[i] = family.interpolated_value(m, st.nodes.node(i0, i1));
    }
  return st;
}

TransferFunction transfer_function(const TaperFamily& family, int m, const SamplingScheme& scheme,
                                   const WavenumberGrid& kgrid) {
  if (m < 0 || m >= family.count()) throw ConfigError("taper index out of range");
  TransferFunction tf{kgrid, {}};
  tf.values = scheme.is_grid() ? sample_taper(family, m, scheme).transform().on(kgrid)
                               : family.continuous_transform(m).on(kgrid);
  return tf;
}

double concentration(const TransferFunction& tf, double b, double energy) {
  const WavenumberGrid& g = tf.grid;
  if (!g.regular()) throw ConfigError("concentration needs a regular wavenumber grid");
  const int dim = g.dim();
  for (int j = 0; j < dim; ++j) {
    if (g.step()[j] > b / 16.0 * (1.0 + 1e-9))
      throw ConfigError("wavenumber grid too coarse for concentration (step > b/16)");
    if (g.half()[j] * g.step()[j] < 3.0 * b * (1.0 - 1e-9))
      throw ConfigError("wavenumber grid does not cover radius 3b");
  }
  const Vec2 h = g.step();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec2& k = g[i];
    double frac;
    if (dim == 1) {
      const double lo = std::max(k[0] - 0.5 * h[0], -b), hi = std::min(k[0] + 0.5 * h[0], b);
      frac = std::max(0.0, hi - lo) / h[0];
    } else {
      const double far = std::hypot(std::abs(k[0]) + 0.5 * h[0], std::abs(k[1]) + 0.5 * h[1]);
      const double near = std::hypot(std::max(0.0, std::abs(k[0]) - 0.5 * h[0]),
                                     std::max(0.0, std::abs(k[1]) - 0.5 * h[1]));
      if (far <= b) {
        frac = 1.0;
      } else if (near > b) {
        frac = 0.0;
      } else {
        constexpr int sub = 32;
        int inside = 0;
        for (int a = 0; a < sub; ++a)
          for (int c = 0; c < sub; ++c) {
            const double x = k[0] + ((a + 0.5) / sub - 0.5) * h[0];
            const double y = k[1] + ((c + 0.5) / sub - 0.5) * h[1];
            if (x * x + y * y <= b * b) ++inside;
          }
        frac = static_cast<double>(inside) / (sub * sub);
      }
    }
    if (frac > 0.0) sum += std::norm(tf.values[i]) * frac;
  }
  const double cell = dim == 2 ? h[0] * h[1] : h[0];
  return sum * cell / energy;
}

void save_tapers(const TaperFamily& family, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json meta;
  meta["bandwidth"] = family.bandwidth;
  meta["concentrations"] = family.concentrations;
  meta["delta_ref"] = std::vector<double>(family.region.delta_ref().begin(),
                                          family.region.delta_ref().begin() + family.dim());
  meta["bbox"] = box_to_json(family.region.bbox());
  meta["shape"] = family.region.shape();
  meta["norm_scale"] = family.norm_scale;
  meta["count"] = family.count();
  meta["region_hash"] = family.region.hash();
  std::vector<std::string> files;
  const auto shape = family.region.shape();
  for (int m = 0; m < family.count(); ++m) {
    char name[32];
    std::snprintf(name, sizeof name, "taper_%03d.csv", m);
    files.emplace_back(name);
    std::ofstream out(dir / name);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    for (int i1 = 0; i1 < shape[1]; ++i1) {
      for (int i0 = 0; i0 < shape[0]; ++i0) {
        if (i0) out << ',';
        out << fmt17(family.values[m][family.region.index(i0, i1)]);
      }
      out << '\n';
    }
  }
  meta["files"] = files;
  write_json(dir / "metadata.json", meta);
}

TaperFamily load_tapers(const std::filesystem::path& dir, const Region& region) {
  const nlohmann::json meta = read_json(dir / "metadata.json");
  if (meta.at("region_hash").get<std::string>() != region.hash())
    throw ConfigError("taper family was computed for a different region (hash mismatch)");
  TaperFamily fam{region, meta.at("bandwidth").get<double>(),
                  meta.at("concentrations").get<std::vector<double>>(), {},
                  meta.at("norm_scale").get<double>()};
  const auto shape = region.shape();
  for (const auto& file : meta.at("files")) {
    std::ifstream in(dir / file.get<std::string>());
    if (!in) throw ConfigError("missing taper file " + file.get<std::string>());
    std::vector<double> v(region.lattice_size(), 0.0);
    std::string line;
    for (int i1 = 0; i1 < shape[1]; ++i1) {
      if (!std::getline(in, line)) throw ConfigError("taper file has too few rows");
      const auto cells = split_csv(line);
      if (static_cast<int>(cells.size()) != shape[0]) throw ConfigError("taper file row has wrong length");
      for (int i0 = 0; i0 < shape[0]; ++i0) v[region.index(i0, i1)] = std::stod(cells[i0]);
    }
    fam.values.push_back(std::move(v));
  }
  if (fam.values.size() != fam.concentrations.size())
    throw ConfigError("taper metadata and files disagree");
  return fam;
}

}  // namespace spatspec
