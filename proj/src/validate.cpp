#include "spatspec/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "spatspec/models.hpp"
#include "spatspec/parallel.hpp"

namespace spatspec {

bool SuiteReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["pass"] = pass();
  j["seed"] = seed;
  j["reps"] = reps;
  j["seconds"] = seconds;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json r{{"name", c.name},           {"pass", c.pass}, {"measured", c.measured},
                     {"expected", c.expected},   {"tolerance", c.tolerance}, {"se", c.se}};
    if (!c.detail.empty()) r["detail"] = c.detail;
    j["checks"].push_back(r);
  }
  j["records"] = records;
  return j;
}

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t rep) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (rep + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PlaneFit unwrap_plane_fit(const CoherenceField& coh, int p, int q,
                          const std::function<bool(const Vec2&)>& band) {
  const WavenumberGrid& g = coh.kgrid;
  if (!g.regular()) throw ConfigError("plane fit needs a regular wavenumber grid");
  const auto cnt = g.counts();
  const std::size_t K = g.size();
  std::vector<char> in(K, 0);
  std::size_t start = K;
  double best = -1.0;
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t i = coh.index(k, p, q);
    if (!coh.valid[i] || !band(g[k])) continue;
    in[k] = 1;
    if (coh.r[i] > best) {
      best = coh.r[i];
      start = k;
    }
  }
  PlaneFit fit;
  if (start == K) return fit;
  std::vector<double> un(K, 0.0);
  std::vector<char> done(K, 0);
  using Item = std::pair<double, std::pair<std::size_t, std::size_t>>;  // (r, (node, parent))
  std::priority_queue<Item> pq;
  pq.push({best, {start, start}});
  auto wrap = [](double a) { return a - kTwoPi * std::nearbyint(a / kTwoPi); };
  while (!pq.empty()) {
    const auto [r, np] = pq.top();
    pq.pop();
    const auto [k, parent] = np;
    if (done[k]) continue;
    const double th = coh.theta[coh.index(k, p, q)];
    un[k] = k == parent ? th : un[parent] + wrap(th - coh.theta[coh.index(parent, p, q)]);
    done[k] = 1;
    const long i0 = static_cast<long>(k % cnt[0]), i1 = static_cast<long>(k / cnt[0]);
    const long nb[4][2] = {{i0 - 1, i1}, {i0 + 1, i1}, {i0, i1 - 1}, {i0, i1 + 1}};
    for (const auto& n : nb) {
      if (n[0] < 0 || n[0] >= cnt[0] || n[1] < 0 || n[1] >= (g.dim() == 2 ? cnt[1] : 1)) continue;
      const std::size_t kn = static_cast<std::size_t>(n[1]) * cnt[0] + static_cast<std::size_t>(n[0]);
      if (in[kn] && !done[kn]) pq.push({coh.r[coh.index(kn, p, q)], {kn, k}});
    }
  }
  const int cols = g.dim() == 2 ? 3 : 2;
  Eigen::MatrixXd A(0, cols);
  std::vector<std::array<double, 3>> rows;
  std::vector<double> rhs;
  for (std::size_t k = 0; k < K; ++k) {
    if (!done[k]) continue;
    rows.push_back({g[k][0], g[k][1], 1.0});
    rhs.push_back(un[k]);
  }
  A.resize(static_cast<Eigen::Index>(rows.size()), cols);
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    A(e, 0) = rows[i][0];
    if (cols == 3) A(e, 1) = rows[i][1];
    A(e, cols - 1) = 1.0;
    b[e] = rhs[i];
  }
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  fit.g0 = x[0];
  fit.g1 = cols == 3 ? x[1] : 0.0;
  fit.intercept = x[cols - 1];
  fit.used = static_cast<int>(rows.size());
  return fit;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const TaperFamily& cached_family(const Region& region, const TaperOptions& opt) {
  static std::mutex mu;
  static std::map<std::string, TaperFamily> cache;
  std::ostringstream key;
  key.precision(17);
  key << region.hash() << '|' << opt.bandwidth << '|' << opt.count << '|' << opt.threshold;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key.str());
  if (it == cache.end()) it = cache.emplace(key.str(), compute_tapers(region, opt)).first;
  return it->second;
}

SuiteReport start(std::string name, std::uint64_t seed, int reps) {
  SuiteReport r;
  r.suite = std::move(name);
  r.seed = seed;
  r.reps = reps;
  return r;
}

Region rect2(double w, double h) { return Region::rectangle(Box{2, {0.0, 0.0}, {w, h}}, Vec2{1.0, 1.0}); }

TaperOptions taper_opts(double b, int count = 0, double threshold = 0.99) {
  TaperOptions o;
  o.bandwidth = b;
  o.count = count;
  o.threshold = threshold;
  return o;
}

Check make_check(std::string name, bool pass, double measured, double expected, double tol,
                 double se = 0.0, std::string detail = {}) {
  return {std::move(name), pass, measured, expected, tol, se, std::move(detail)};
}

struct Stats {
  double mean = 0.0;
  double var = 0.0;  // sample variance
  double se = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  const double n = static_cast<double>(v.size());
  for (double x : v) s.mean += x;
  s.mean /= n;
  for (double x : v) s.var += (x - s.mean) * (x - s.mean);
  s.var /= std::max(1.0, n - 1.0);
  s.se = std::sqrt(s.var / n);
  return s;
}

// Column j of a reps x K table.
std::vector<double> column(const std::vector<std::vector<double>>& t, std::size_t j) {
  std::vector<double> c(t.size());
  for (std::size_t r = 0; r < t.size(); ++r) c[r] = t[r][j];
  return c;
}

Process make_process(std::string label, std::variant<PointPattern, GriddedField> data,
                     std::optional<double> lambda = std::nullopt, int offset = 0) {
  Process p;
  p.label = std::move(label);
  p.data = std::move(data);
  p.lambda = lambda;
  p.taper_offset = offset;
  return p;
}

// Evenly spaced selection of `n` entries.
std::vector<std::size_t> spread_pick(const std::vector<std::size_t>& v, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n && !v.empty(); ++i) out.push_back(v[i * v.size() / n]);
  return out;
}

nlohmann::json vec2_json(const Vec2& k, int dim) {
  return dim == 2 ? nlohmann::json::array({k[0], k[1]}) : nlohmann::json::array({k[0]});
}

// ---------------------------------------------------------------------------

constexpr double kFlatLambda = 0.02;
constexpr double kFlatBandwidth = 0.05;

WavenumberGrid flat_grid() { return WavenumberGrid::regular(2, {0.02, 0.02}, {12, 12}); }

std::vector<std::size_t> mid_band(const WavenumberGrid& g, double b) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double r = norm(g[k], g.dim());
    if (r >= 2.0 * b && r <= 0.24 + 1e-12) out.push_back(k);
  }
  return out;
}

SuiteReport flat_suite(const std::string& name, const ValidateOptions& opt, double mark_mean,
                       double mark_sd, int default_reps) {
  const auto t0 = Clock::now();
  SuiteReport rep = start(name, opt.seed, opt.reps > 0 ? opt.reps : default_reps);
  const Region region = rect2(200.0, 100.0);
  const TaperFamily& fam = cached_family(region, taper_opts(kFlatBandwidth));
  const WavenumberGrid kg = flat_grid();
  const bool marked = name != "poisson-flat";
  const double truth = kFlatLambda * (marked ? mark_mean * mark_mean + mark_sd * mark_sd : 1.0);

  std::vector<std::vector<double>> f(static_cast<std::size_t>(rep.reps));
  parallel_for(f.size(), [&](std::size_t r) {
    const std::uint64_t s = replicate_seed(opt.seed, r);
    PointPattern pat = marked ? simulate_marked_poisson(region, kFlatLambda, mark_mean, mark_sd, s)
                              : simulate_poisson(region, kFlatLambda, s);
    const auto est = multitaper_estimate({make_process("points", std::move(pat))}, fam, kg, {});
    f[r].resize(kg.size());
    for (std::size_t k = 0; k < kg.size(); ++k) f[r][k] = est.at(k, 0, 0).real();
  });

  const auto band = mid_band(kg, kFlatBandwidth);
  double band_mean = 0.0;
  for (std::size_t k : band) band_mean += stats(column(f, k)).mean;
  band_mean /= static_cast<double>(band.size());
  rep.checks.push_back(make_check("taper count >= 6", fam.count() >= 6, fam.count(), 6, 0));
  rep.checks.push_back(make_check("mid-band mean / truth in [0.95, 1.05]",
                                  std::abs(band_mean / truth - 1.0) <= 0.05, band_mean / truth, 1.0,
                                  0.05));
  int inside = 0;
  nlohmann::json probes = nlohmann::json::array();
  const auto picks = spread_pick(band, 25);
  double worst = 0.0;
  for (std::size_t k : picks) {
    const Stats s = stats(column(f, k));
    const double z = std::abs(s.mean - truth) / s.se;
    worst = std::max(worst, z);
    inside += z <= 3.0;
    probes.push_back({{"k", vec2_json(kg[k], 2)}, {"mean", s.mean}, {"se", s.se}, {"z", z}});
  }
  rep.checks.push_back(make_check("probe means within 3 SE of truth (25 probes)",
                                  inside == static_cast<int>(picks.size()), inside,
                                  static_cast<double>(picks.size()), 3.0, 0.0,
                                  "largest |z| = " + std::to_string(worst)));
  rep.records["truth"] = truth;
  rep.records["tapers"] = fam.count();
  rep.records["probes"] = probes;
  rep.seconds = seconds_since(t0);
  if (!marked)
    rep.checks.push_back(make_check("runtime < 120 s", rep.seconds < 120.0, rep.seconds, 120.0, 0.0));
  return rep;
}

SuiteReport variance_scaling(const ValidateOptions& opt) {
  const auto t0 = Clock::now();
  SuiteReport rep = start("variance-scaling", opt.seed, opt.reps > 0 ? opt.reps : 300);
  const Region region = rect2(200.0, 100.0);
  const TaperFamily& fam = cached_family(region, taper_opts(kFlatBandwidth));
  const WavenumberGrid kg = flat_grid();
  const auto band = mid_band(kg, kFlatBandwidth);
  std::vector<std::vector<double>> f1(static_cast<std::size_t>(rep.reps)), f8(f1.size());
  parallel_for(f1.size(), [&](std::size_t r) {
    PointPattern pat = simulate_poisson(region, kFlatLambda, replicate_seed(opt.seed, r));
    EstimateOptions eo;
    eo.tapers = 8;
    const auto dfts = tapered_dfts({make_process("points", std::move(pat))}, fam, kg, eo);
    const auto est8 = estimate_from_dfts(dfts, fam, false);
    f1[r].resize(band.size());
    f8[r].resize(band.size());
    for (std::size_t i = 0; i < band.size(); ++i) {
      f1[r][i] = std::norm(dfts[0][0].J[band[i]]);
      f8[r][i] = est8.at(band[i], 0, 0).real();
    }
  });
  double v1 = 0.0, v8 = 0.0, per_k = 0.0;
  for (std::size_t i = 0; i < band.size(); ++i) {
    const double a = stats(column(f1, i)).var, b = stats(column(f8, i)).var;
    v1 += a;
    v8 += b;
    per_k += b / a;
  }
  const double ratio = v8 / v1;
  rep.checks.push_back(make_check("band-averaged Var(M=8)/Var(M=1) in [1/12, 1/5]",
                                  ratio >= 1.0 / 12.0 && ratio <= 0.2, ratio, 0.125, 0.0));
  rep.records["mean_per_k_ratio"] = per_k / static_cast<double>(band.size());
  rep.records["band_size"] = band.size();
  rep.seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport bias_oracle(const ValidateOptions& opt) {
  const auto t0 = Clock::now();
  SuiteReport rep = start("bias-oracle", opt.seed, opt.reps > 0 ? opt.reps : 2000);
  const Region region = rect2(200.0, 100.0);
  const TaperFamily& fam = cached_family(region, taper_opts(kFlatBandwidth));
  const MaternSpec spec{1.0, 30.0, 2.5};
  const SamplingScheme scheme = SamplingScheme::grid(2, {5.0, 5.0}, {2.5, 2.5});
  const GridNodes nodes = grid_nodes(scheme, region);
  const GaussianFieldSampler sampler(spec, 2, scheme.delta, nodes.n);
  const int m = 0;
  const SampledTaper taper = sample_taper(fam, m, scheme);

  std::vector<Vec2> probes;
  const double ax[5] = {0.0, 0.015, 0.03, 0.045, 0.06};
  for (double b : ax)
    for (double a : ax) probes.push_back({a, b});
  const WavenumberGrid kg = WavenumberGrid::from_points(2, probes);

  std::vector<std::vector<double>> I(static_cast<std::size_t>(rep.reps));
  parallel_for(I.size(), [&](std::size_t r) {
    auto rng = make_rng(replicate_seed(opt.seed, r));
    std::vector<double> v = sampler.sample(rng);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!nodes.inside[i]) v[i] = 0.0;
    const GriddedField field{nodes, std::move(v)};
    const auto j = tapered_dft_field(field, taper, m, kg, 0.0);
    I[r].resize(kg.size());
    for (std::size_t k = 0; k < kg.size(); ++k) I[r][k] = std::norm(j.J[k]);
  });

  const Spectrum f{[spec](const Vec2& k) { return cdouble(matern_sdf(norm(k, 2), spec, 2)); }, true, {}};
  const TaperTransfer tt = taper_transfer(fam, m, scheme);
  QuadratureOptions qo;
  qo.bandwidth = fam.bandwidth;
  int inside = 0;
  double worst = 0.0;
  nlohmann::json rec = nlohmann::json::array();
  for (std::size_t k = 0; k < kg.size(); ++k) {
    const auto e = expected_periodogram(f, tt, tt, kg[k], qo);
    const Stats s = stats(column(I, k));
    const double z = std::abs(s.mean - e.value.real()) / s.se;
    worst = std::max(worst, z);
    inside += z <= 3.0;
    rec.push_back({{"k", vec2_json(kg[k], 2)}, {"mc_mean", s.mean}, {"se", s.se},
                   {"expected", e.value.real()}, {"quadrature_error", e.error}, {"z", z}});
  }
  rep.checks.push_back(make_check("MC mean of I_0 within 3 SE of expected periodogram (25 probes)",
                                  inside == static_cast<int>(kg.size()), inside,
                                  static_cast<double>(kg.size()), 3.0, 0.0,
                                  "largest |z| = " + std::to_string(worst)));
  rep.records["probes"] = rec;
  rep.records["embedding"] = sampler.uses_embedding();
  rep.seconds = seconds_since(t0);
  rep.checks.push_back(make_check("runtime < 600 s", rep.seconds < 600.0, rep.seconds, 600.0, 0.0));
  return rep;
}

// ---------------------------------------------------------------------------
// One-dimensional LGCP: field and points smoothed with matched or offset tapers.

constexpr double kLgcp1dLength = 500.0;
constexpr double kLgcp1dBandwidth = 0.005;
constexpr double kLgcp1dIntensity = 0.2;
const MaternSpec kLgcp1dSpec{1.0, 10.0, 2.5};

SuiteReport lgcp_1d_tapers(const ValidateOptions& opt) {
  const auto t0 = Clock::now();
  SuiteReport rep = start("lgcp-1d-tapers", opt.seed, opt.reps > 0 ? opt.reps : 1000);
  const Region region = Region::rectangle(Box{1, {0.0, 0.0}, {kLgcp1dLength, 1.0}}, Vec2{0.5, 1.0});
  const TaperFamily& fam = cached_family(region, taper_opts(kLgcp1dBandwidth));
  const SamplingScheme scheme = SamplingScheme::grid(1, {1.0, 1.0}, {0.5, 0.0});
  const double mu = lgcp_mu_for_intensity(kLgcp1dIntensity, kLgcp1dSpec);
  const std::vector<Vec2> probes{{0.03, 0.0}, {0.04, 0.0}, {0.05, 0.0}, {0.06, 0.0}};
  const WavenumberGrid kg = WavenumberGrid::from_points(1, probes);
  const std::size_t K = kg.size();

  // Per rep: matched (re, im), mixed (re, im), field and point marginals.
  std::vector<std::vector<double>> data(static_cast<std::size_t>(rep.reps));
  parallel_for(data.size(), [&](std::size_t r) {
    auto sim = simulate_lgcp(region, mu, kLgcp1dSpec, scheme, 2, replicate_seed(opt.seed, r));
    Process field = make_process("field", sim.field, mu);
    Process pts = make_process("points", sim.points, kLgcp1dIntensity);
    const auto same = multitaper_estimate({field, pts}, fam, kg, {});
    EstimateOptions mixed;
    mixed.allow_mixed_tapers = true;
    field.taper_offset = 1;
    const auto diff = multitaper_estimate({field, pts}, fam, kg, mixed);
    auto& d = data[r];
    for (std::size_t k = 0; k < K; ++k) {
      d.push_back(same.at(k, 0, 1).real());
      d.push_back(same.at(k, 0, 1).imag());
      d.push_back(diff.at(k, 0, 1).real());
      d.push_back(diff.at(k, 0, 1).imag());
      d.push_back(same.at(k, 0, 0).real());
      d.push_back(same.at(k, 1, 1).real());
    }
  });

  int matched_ok = 0, atten_ok = 0;
  nlohmann::json rec = nlohmann::json::array();
  for (std::size_t k = 0; k < K; ++k) {
    const double truth = kLgcp1dIntensity * matern_sdf(std::abs(kg[k][0]), kLgcp1dSpec, 1);
    const Stats re = stats(column(data, 6 * k)), im = stats(column(data, 6 * k + 1));
    const Stats xre = stats(column(data, 6 * k + 2)), xim = stats(column(data, 6 * k + 3));
    const double z = std::abs(re.mean - truth) / re.se;
    const double same_mag = std::hypot(re.mean, im.mean), diff_mag = std::hypot(xre.mean, xim.mean);
    const double reduction = 1.0 - diff_mag / same_mag;
    matched_ok += z <= 3.0;
    atten_ok += reduction >= 0.3;
    rec.push_back({{"k", kg[k][0]},
                   {"truth", truth},
                   {"matched_mean", {re.mean, im.mean}},
                   {"matched_se", re.se},
                   {"mixed_mean", {xre.mean, xim.mean}},
                   {"reduction", reduction},
                   {"z", z},
                   {"field_mean", stats(column(data, 6 * k + 4)).mean},
                   {"points_mean", stats(column(data, 6 * k + 5)).mean}});
  }
  rep.checks.push_back(make_check("matched cross-spectrum within 3 SE of lambda^q f^pp",
                                  matched_ok == static_cast<int>(K), matched_ok, static_cast<double>(K),
                                  3.0));
  rep.checks.push_back(make_check("mixed-taper cross-spectrum magnitude reduced by >= 30%",
                                  atten_ok == static_cast<int>(K), atten_ok, static_cast<double>(K), 0.3));
  rep.records["tapers"] = fam.count();
  rep.records["probes"] = rec;
  rep.seconds = seconds_since(t0);
  rep.checks.push_back(make_check("runtime < 600 s", rep.seconds < 600.0, rep.seconds, 600.0, 0.0));
  return rep;
}

// ---------------------------------------------------------------------------

constexpr double kLgcpIntensity = 0.02;
constexpr double kLowBandwidth = 0.02;

SuiteReport lgcp_cross(const ValidateOptions& opt) {
  const auto t0 = Clock::now();
  SuiteReport rep = start("lgcp-cross", opt.seed, opt.reps > 0 ? opt.reps : 200);
  const Region region = rect2(200.0, 100.0);
  const TaperFamily& fam = cached_family(region, taper_opts(kLowBandwidth));
  LgcpModel model;
  model.matern = {1.0, 30.0, 2.5};
  model.mu = lgcp_mu_for_intensity(kLgcpIntensity, model.matern);
  model.data_scheme = SamplingScheme::grid(2, {5.0, 5.0}, {2.5, 2.5});
  model.thin_factor = 5;
  const WavenumberGrid kg = WavenumberGrid::regular(2, {0.002, 0.002}, {8, 8});
  double fmax = 0.0;
  for (const auto& k : kg.points()) fmax = std::max(fmax, matern_sdf(norm(k, 2), model.matern, 2));
  std::vector<std::size_t> band;
  for (std::size_t k = 0; k < kg.size(); ++k)
    if (matern_sdf(norm(kg[k], 2), model.matern, 2) > 0.1 * fmax) band.push_back(k);

  std::vector<std::vector<double>> data(static_cast<std::size_t>(rep.reps));
  std::vector<double> lam(data.size()), varn(data.size());
  parallel_for(data.size(), [&](std::size_t r) {
    auto sim = simulate(model, region, replicate_seed(opt.seed, r));
    lam[r] = intensity_estimate(std::get<PointPattern>(sim.processes[1].data), region);
    varn[r] = sim.max_log_variation;
    const auto est = multitaper_estimate(sim.processes, fam, kg, {});
    for (std::size_t k : band) {
      data[r].push_back(est.at(k, 0, 1).real());
      data[r].push_back(est.at(k, 0, 1).imag());
      data[r].push_back(est.at(k, 0, 0).real());
    }
  });
  const double lam_hat = stats(lam).mean;
  double ratio = 0.0;
  for (std::size_t i = 0; i < band.size(); ++i) {
    const double re = stats(column(data, 3 * i)).mean, im = stats(column(data, 3 * i + 1)).mean;
    ratio += std::hypot(re, im) / stats(column(data, 3 * i + 2)).mean;
  }
  ratio /= static_cast<double>(band.size());
  rep.checks.push_back(make_check("band-averaged |f^pq| / f^pp within 15% of lambda_hat^q",
                                  std::abs(ratio / lam_hat - 1.0) <= 0.15, ratio / lam_hat, 1.0, 0.15));
  rep.records["lambda_hat"] = lam_hat;
  rep.records["lambda_true"] = model.point_intensity();
  rep.records["ratio"] = ratio;
  rep.records["band_size"] = band.size();
  rep.records["max_log_variation"] = *std::max_element(varn.begin(), varn.end());
  rep.records["tapers"] = fam.count();
  rep.seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

constexpr double kShiftIntensity = 0.0012;
constexpr double kShiftBandwidth = 0.004;

SuiteReport shifted_pair(const ValidateOptions& opt) {
  const auto t0 = Clock::now();
  SuiteReport rep = start("shifted-pair", opt.seed, 1);
  // A 100-high window loses 15% of the pairs to the y-shift, which caps the
  // coherence near 0.89 even for the first taper; use the wider window.
  const Region region = Region::rectangle(Box{2, {0.0, 0.0}, {1000.0, 500.0}}, Vec2{2.5, 2.5});
  const TaperFamily& fam = cached_family(region, taper_opts(kShiftBandwidth));
  const Vec2 tau{10.5, 15.0};
  auto [a, b] = simulate_shifted_pair(region, kShiftIntensity, tau, opt.seed);
  const std::size_t n = a.size();
  const WavenumberGrid kg = WavenumberGrid::regular(2, {0.002, 0.002}, {20, 20});
  const auto est =
      multitaper_estimate({make_process("A", std::move(a)), make_process("B", std::move(b))}, fam, kg, {});
  const auto coh = coherence_and_delay(est);
  const double lo = 2.0 * kShiftBandwidth, hi = 0.035;
  auto band = [&](const Vec2& k) {
    const double r = norm(k, 2);
    return r >= lo && r <= hi;
  };
  const PlaneFit fit = unwrap_plane_fit(coh, 0, 1, band);
  double rsum = 0.0;
  int rn = 0;
  for (std::size_t k = 0; k < kg.size(); ++k)
    if (band(kg[k]) && coh.valid[coh.index(k, 0, 1)]) {
      rsum += coh.r[coh.index(k, 0, 1)];
      ++rn;
    }
  const double g0 = kTwoPi * tau[0], g1 = kTwoPi * tau[1];
  rep.checks.push_back(make_check("realization has >= 500 points", n >= 500, static_cast<double>(n), 500, 0));
  rep.checks.push_back(make_check("plane-fit gradient k0 within 5% of 2 pi tau_0",
                                  std::abs(fit.g0 / g0 - 1.0) <= 0.05, fit.g0, g0, 0.05));
  rep.checks.push_back(make_check("plane-fit gradient k1 within 5% of 2 pi tau_1",
                                  std::abs(fit.g1 / g1 - 1.0) <= 0.05, fit.g1, g1, 0.05));
  rep.checks.push_back(make_check("mean coherence over band >= 0.9", rsum / rn >= 0.9, rsum / rn, 0.9, 0.0));
  rep.records["band"] = {lo, hi};
  rep.records["band_points"] = fit.used;
  rep.records["tapers"] = fam.count();
  rep.seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport taper_quality(const ValidateOptions& opt) {
  const auto t0 = Clock::now();
  SuiteReport rep = start("taper-quality", opt.seed, 0);
  struct Case {
    std::string name;
    Region region;
    double b;
  };
  std::vector<Case> cases;
  cases.push_back({"rectangle 200x100", rect2(200.0, 100.0), kFlatBandwidth});
  {
    // L-shaped region with a disc removed.
    const Box bb{2, {0.0, 0.0}, {60.0, 50.0}};
    const Vec2 d{1.0, 1.0};
    std::vector<std::uint8_t> mask(60 * 50, 0);
    for (int i1 = 0; i1 < 50; ++i1)
      for (int i0 = 0; i0 < 60; ++i0) {
        const double x = i0 + 0.5, y = i1 + 0.5;
        const bool l = !(x > 35.0 && y > 30.0);
        const bool hole = std::hypot(x - 15.0, y - 15.0) < 6.0;
        mask[static_cast<std::size_t>(i1) * 60 + i0] = l && !hole;
      }
    cases.push_back({"masked L-shape", Region(bb, d, mask), 0.1});
  }
  for (const auto& c : cases) {
    const TaperFamily& fam = cached_family(c.region, taper_opts(c.b));
    const int M = fam.count();
    const double minc = *std::min_element(fam.concentrations.begin(), fam.concentrations.end());
    rep.checks.push_back(make_check(c.name + ": all concentrations >= 0.99", minc >= 0.99, minc, 0.99, 0.0));
    const auto lg = fam.lattice_gram();
    const auto ig = fam.interpolated_gram();
    double dev = 0.0, worst_excess = -1e300;
    int violations = 0;
    for (int a = 0; a < M; ++a)
      for (int b = 0; b < M; ++b) {
        const std::size_t i = static_cast<std::size_t>(a) * M + b;
        dev = std::max(dev, std::abs(lg[i] - (a == b ? 1.0 : 0.0)));
        const double drift = std::abs(ig[i] - lg[i]);
        const double bound = fam.interpolation_drift_bound(a, b);
        worst_excess = std::max(worst_excess, drift - bound);
        violations += drift > bound;
      }
    rep.checks.push_back(make_check(c.name + ": lattice Gram deviation <= 1e-6", dev <= 1e-6, dev, 0.0, 1e-6));
    rep.checks.push_back(make_check(c.name + ": interpolated Gram drift within neighbour-difference bound",
                                    violations == 0, violations, 0.0, 0.0, 0.0,
                                    "max(drift - bound) = " + std::to_string(worst_excess)));
    // Tapers vanish outside the mask.
    double outside = 0.0;
    for (int m = 0; m < M; ++m)
      for (std::size_t i = 0; i < c.region.lattice_size(); ++i)
        if (!c.region.mask()[i]) outside = std::max(outside, std::abs(fam.values[m][i]));
    rep.checks.push_back(make_check(c.name + ": tapers vanish outside the mask", outside == 0.0, outside, 0.0, 0.0));
    rep.records[c.name] = {{"tapers", M}, {"min_concentration", minc}};
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport alias_identity(const ValidateOptions& opt) {
  const auto t0 = Clock::now();
  SuiteReport rep = start("alias-identity", opt.seed, 20);
  const Region region = rect2(200.0, 100.0);
  const TaperFamily& fam = cached_family(region, taper_opts(kLowBandwidth));
  const SamplingScheme coarse = SamplingScheme::grid(2, {10.0, 15.0}, {0.0, 3.0});
  const SamplingScheme fine = SamplingScheme::grid(2, {5.0, 5.0}, {0.0, 0.0});
  const LatticeTransform h = sample_taper(fam, 0, coarse).transform();
  const AliasStructure al = AliasStructure::of(coarse);
  auto rng = make_rng(opt.seed, 11);
  std::uniform_real_distribution<double> uk(-0.5, 0.5);
  std::uniform_int_distribution<int> uz(-4, 4);
  const double scale = std::abs(h.at({0.0, 0.0}));
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Vec2 k{uk(rng), uk(rng)};
    const Vec2 psi{uz(rng) / coarse.delta[0], uz(rng) / coarse.delta[1]};
    const cdouble lhs = h.at({k[0] + psi[0], k[1] + psi[1]});
    const cdouble rhs = h.at(k) * al.phase(psi);
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  rep.checks.push_back(make_check("transfer periodicity H(k+psi) = H(k) w(psi), 20 random (k, z)",
                                  worst <= 1e-12, worst, 0.0, 1e-12));

  const MaternSpec spec{1.0, 30.0, 2.5};
  const Spectrum f{[spec](const Vec2& k) { return cdouble(matern_sdf(norm(k, 2), spec, 2)); }, true, {}};
  const std::vector<std::pair<SamplingScheme, SamplingScheme>> pairs{{coarse, coarse}, {fine, coarse}};
  double worst_rel = 0.0;
  for (const auto& [sp, sq] : pairs) {
    const AliasStructure ap = AliasStructure::of(sp), aq = AliasStructure::of(sq);
    const AliasLattice L = alias_intersection(sp, sq);
    for (int i = 0; i < 5; ++i) {
      const Vec2 k{uk(rng) * 0.1, uk(rng) * 0.1};
      const cdouble v = aliased_spectrum(f, ap, aq, k, 40.0);
      // Brute force over a wide square of lattice points.
      cdouble bf = 0.0;
      for (int z1 = -150; z1 <= 150; ++z1)
        for (int z0 = -150; z0 <= 150; ++z0) {
          const Vec2 psi{z0 * L.generator[0], z1 * L.generator[1]};
          bf += f.f({k[0] - psi[0], k[1] - psi[1]}) * ap.phase(psi) * std::conj(aq.phase(psi));
        }
      worst_rel = std::max(worst_rel, std::abs(v - bf) / std::abs(bf));
    }
  }
  rep.checks.push_back(make_check("aliased Matérn spectrum matches brute-force shell sum",
                                  worst_rel <= 1e-6, worst_rel, 0.0, 1e-6));
  rep.seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport structural(const ValidateOptions& opt) {
  const auto t0 = Clock::now();
  SuiteReport rep = start("structural", opt.seed, opt.reps > 0 ? opt.reps : 50);
  double herm = 0.0, psd = 0.0, cmin = 0.0, cmax = 0.0, conj_sym = 0.0;
  int failures = 0;
  nlohmann::json configs = nlohmann::json::array();
  for (int c = 0; c < rep.reps; ++c) {
    auto rng = make_rng(replicate_seed(opt.seed, static_cast<std::uint64_t>(c)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto uint = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
    const int dim = u(rng) < 0.25 ? 1 : 2;
    const int w = uint(30, 60), hgt = dim == 2 ? uint(20, 40) : 1;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * hgt, 1);
    if (dim == 2 && u(rng) < 0.6) {
      const double cx = u(rng) * w, cy = u(rng) * hgt, rad = 0.15 * std::min(w, hgt) * (1 + u(rng));
      for (int i1 = 0; i1 < hgt; ++i1)
        for (int i0 = 0; i0 < w; ++i0)
          if (std::hypot(i0 + 0.5 - cx, i1 + 0.5 - cy) < rad) mask[static_cast<std::size_t>(i1) * w + i0] = 0;
    }
    const Region region(Box{dim, {0.0, 0.0}, {double(w), dim == 2 ? double(hgt) : 1.0}}, Vec2{1.0, 1.0}, mask);
    const double b = 0.06 + 0.1 * u(rng);
    const int count = uint(1, 5);
    const TaperFamily fam = compute_tapers(region, taper_opts(b, count, 0.0));
    const int P = uint(1, 4);
    std::vector<Process> procs;
    EstimateOptions eo;
    eo.allow_mixed_tapers = u(rng) < 0.3;
    const std::uint64_t s = replicate_seed(opt.seed + 1, static_cast<std::uint64_t>(c));
    for (int p = 0; p < P; ++p) {
      const int kind = uint(0, 2);
      const std::string label = "p" + std::to_string(p);
      Process proc;
      if (kind == 0) {
        proc = make_process(label, simulate_poisson(region, 0.05 + 0.2 * u(rng), s + p));
      } else if (kind == 1) {
        proc = make_process(label, simulate_marked_poisson(region, 0.05 + 0.2 * u(rng), 1.0, 0.5, s + p));
      } else {
        const double d = uint(1, 3);
        const SamplingScheme sc = SamplingScheme::grid(dim, {d, d}, {0.5 * d * u(rng), 0.5 * d * u(rng)});
        proc = make_process(label, simulate_gaussian_field({1.0, 5.0 + 10.0 * u(rng), 1.5}, sc, region, s + p));
      }
      if (eo.allow_mixed_tapers) proc.taper_offset = uint(0, 2);
      procs.push_back(std::move(proc));
    }
    const double step = 0.01 + 0.03 * u(rng);
    const WavenumberGrid kg = WavenumberGrid::regular(dim, {step, step}, {uint(3, 10), dim == 2 ? uint(3, 10) : 0});
    SpectralEstimate est;
    try {
      est = multitaper_estimate(procs, fam, kg, eo);
    } catch (const std::exception& e) {
      ++failures;
      configs.push_back({{"config", c}, {"error", e.what()}});
      continue;
    }
    const auto coh = coherence_and_delay(est);
    double fmax = 0.0;
    for (const auto& v : est.fhat) fmax = std::max(fmax, std::abs(v));
    for (std::size_t k = 0; k < kg.size(); ++k) {
      Eigen::MatrixXcd F(P, P);
      double trace = 0.0;
      for (int p = 0; p < P; ++p) {
        trace += est.at(k, p, p).real();
        for (int q = 0; q < P; ++q) {
          F(p, q) = est.at(k, p, q);
          herm = std::max(herm, std::abs(est.at(k, p, q) - std::conj(est.at(k, q, p))) / fmax);
          const std::size_t kn = kg.negated(k);
          conj_sym = std::max(conj_sym, std::abs(est.at(kn, p, q) - std::conj(est.at(k, p, q))) / fmax);
          const std::size_t i = coh.index(k, p, q);
          if (coh.valid[i]) {
            cmin = std::min(cmin, coh.r[i]);
            cmax = std::max(cmax, coh.r[i]);
          }
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(F, Eigen::EigenvaluesOnly);
      if (trace > 0.0) psd = std::min(psd, es.eigenvalues().minCoeff() / trace);
    }
    configs.push_back({{"config", c}, {"dim", dim}, {"P", P}, {"M", count}, {"b", b}});
  }
  rep.checks.push_back(make_check("all configurations estimated", failures == 0, failures, 0, 0));
  rep.checks.push_back(make_check("Hermitian to 1e-12", herm <= 1e-12, herm, 0.0, 1e-12));
  rep.checks.push_back(make_check("PSD: min eigenvalue >= -1e-10 trace", psd >= -1e-10, psd, 0.0, 1e-10));
  rep.checks.push_back(make_check("coherence in [0, 1]", cmin >= 0.0 && cmax <= 1.0, cmax, 1.0, 0.0, 0.0,
                                  "min " + std::to_string(cmin)));
  rep.checks.push_back(make_check("conjugate symmetry on symmetric grids (1e-10 relative)",
                                  conj_sym <= 1e-10, conj_sym, 0.0, 1e-10));
  rep.records["configs"] = configs;
  rep.seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport nudft_suite(const ValidateOptions& opt) {
  const auto t0 = Clock::now();
  SuiteReport rep = start("nudft", opt.seed, 1);
  auto rng = make_rng(opt.seed, 3);
  std::uniform_real_distribution<double> ux(0.0, 200.0), uy(0.0, 100.0), uc(-1.0, 1.0);
  std::vector<Vec2> x(500);
  std::vector<double> c(500);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = {ux(rng), uy(rng)};
    c[i] = uc(rng);
  }
  const WavenumberGrid kg = WavenumberGrid::regular(2, {0.004, 0.004}, {50, 50});
  const auto t1 = Clock::now();
  const auto direct = nudft_direct(x, c, kg.points(), 2);
  const double td = seconds_since(t1);
  const auto t2 = Clock::now();
  const auto fast = nudft_gridding(x, c, kg);
  const double tf = seconds_since(t2);
  double err = 0.0, mx = 0.0;
  for (std::size_t k = 0; k < kg.size(); ++k) {
    err = std::max(err, std::abs(fast[k] - direct[k]));
    mx = std::max(mx, std::abs(direct[k]));
  }
  rep.checks.push_back(make_check("gridding vs direct max relative error <= 1e-9 (500 x " +
                                      std::to_string(kg.size()) + ")",
                                  err / mx <= 1e-9, err / mx, 0.0, 1e-9));
  rep.records["wavenumbers"] = kg.size();
  rep.records["direct_seconds"] = td;
  rep.records["gridding_seconds"] = tf;
  rep.seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

struct PooledCoherence {
  double r = 0.0;
  double se = 0.0;
};

// Coherence of rep-pooled spectra with a leave-one-out jackknife SE.
// Each row holds (f11, f22, re f12, im f12).
PooledCoherence pooled_coherence(const std::vector<std::array<double, 4>>& rows) {
  std::array<double, 4> tot{0, 0, 0, 0};
  for (const auto& r : rows)
    for (int i = 0; i < 4; ++i) tot[i] += r[i];
  auto coh = [](const std::array<double, 4>& s) { return std::hypot(s[2], s[3]) / std::sqrt(s[0] * s[1]); };
  PooledCoherence out;
  out.r = coh(tot);
  const double n = static_cast<double>(rows.size());
  std::vector<double> loo(rows.size());
  double mean = 0.0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    std::array<double, 4> s = tot;
    for (int i = 0; i < 4; ++i) s[i] -= rows[j][i];
    loo[j] = coh(s);
    mean += loo[j];
  }
  mean /= n;
  double v = 0.0;
  for (double x : loo) v += (x - mean) * (x - mean);
  out.se = std::sqrt((n - 1.0) / n * v);
  return out;
}

SuiteReport colocation(const ValidateOptions& opt) {
  const auto t0 = Clock::now();
  SuiteReport rep = start("colocation", opt.seed, opt.reps > 0 ? opt.reps : 200);
  const Region region = rect2(200.0, 100.0);
  const TaperFamily& fam = cached_family(region, taper_opts(kLowBandwidth));
  ColocationModel model;
  const double truth = model.alpha[0] * model.alpha[1] /
                       std::sqrt((1.0 + model.alpha[0] * model.alpha[0]) * (1.0 + model.alpha[1] * model.alpha[1]));
  const std::vector<Vec2> inside{{0.035, 0.0}, {-0.035, 0.005}, {0.03, -0.01}, {0.04, 0.005}, {0.045, -0.005}};
  const std::vector<Vec2> outside{{0.07, 0.0}, {0.0, 0.05}, {0.06, 0.045}};
  std::vector<Vec2> all = inside;
  all.insert(all.end(), outside.begin(), outside.end());
  const WavenumberGrid kg = WavenumberGrid::from_points(2, all);
  std::vector<std::vector<std::array<double, 4>>> rows(kg.size(), std::vector<std::array<double, 4>>(rep.reps));
  parallel_for(static_cast<std::size_t>(rep.reps), [&](std::size_t r) {
    auto sim = simulate(model, region, replicate_seed(opt.seed, r));
    const auto est = multitaper_estimate(sim.processes, fam, kg, {});
    for (std::size_t k = 0; k < kg.size(); ++k)
      rows[k][r] = {est.at(k, 0, 0).real(), est.at(k, 1, 1).real(), est.at(k, 0, 1).real(),
                    est.at(k, 0, 1).imag()};
  });
  const Box nyq = nyquist_box(model.grids[1]);
  int ok = 0;
  nlohmann::json rec = nlohmann::json::array();
  for (std::size_t k = 0; k < kg.size(); ++k) {
    const PooledCoherence pc = pooled_coherence(rows[k]);
    const bool in = k < inside.size();
    if (in && !nyq.contains(kg[k])) throw ConfigError("colocation probe outside the Nyquist box");
    const double z = std::abs(pc.r - truth) / pc.se;
    if (in) ok += z <= 3.0;
    rec.push_back({{"k", vec2_json(kg[k], 2)}, {"inside_nyquist", in}, {"coherence", pc.r},
                   {"se", pc.se}, {"z", z}, {"underestimate", pc.r < truth}});
  }
  rep.checks.push_back(make_check("coherence inside the coarse Nyquist box within 3 SE of closed form",
                                  ok == static_cast<int>(inside.size()), ok,
                                  static_cast<double>(inside.size()), 3.0));
  rep.records["truth"] = truth;
  rep.records["probes"] = rec;
  rep.records["tapers"] = fam.count();
  rep.seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport unknown_mean(const ValidateOptions& opt) {
  const auto t0 = Clock::now();
  SuiteReport rep = start("unknown-mean", opt.seed, 0);
  const Region region = rect2(200.0, 100.0);
  const TaperFamily& fam = cached_family(region, taper_opts(kFlatBandwidth));
  WhiteNoiseModel model;
  model.sigma = 1.0;
  model.scheme = SamplingScheme::grid(2, {1.0, 1.0}, {0.5, 0.5});
  const TrueSpectrum ts = true_spectrum(model, 2);
  const Spectrum f = ts.pair(0, 0);
  const double level = model.sigma * model.sigma * model.scheme.cell_volume();
  const TaperTransfer g = mean_transfer(region, model.scheme);
  const double n = static_cast<double>(grid_nodes(model.scheme, region).count);
  QuadratureOptions qo;
  qo.bandwidth = fam.bandwidth;
  const std::vector<Vec2> probes{{0.16, 0.0}, {0.0, 0.2}, {0.12, 0.12}, {-0.25, 0.1}, {0.3, -0.3}, {0.45, 0.05}};
  double worst = 0.0, worst_closed = 0.0, mean_bias = 0.0;
  nlohmann::json rec = nlohmann::json::array();
  for (int m : {0, fam.count() - 1}) {
    const TaperTransfer h = taper_transfer(fam, m, model.scheme);
    for (const Vec2& k : probes) {
      const auto t = unknown_mean_bias(f, h, h, g, g, k, model.mean, model.mean, qo);
      const double corr = std::abs(t.correction()) / level;
      const double closed = std::norm(h.transform.at(k)) * level / n;
      worst = std::max(worst, corr);
      worst_closed = std::max(worst_closed, std::abs(t.correction().real() + closed) / level);
      mean_bias = std::max(mean_bias, std::abs(t.mean_bias));
      rec.push_back({{"m", m}, {"k", vec2_json(k, 2)}, {"correction", corr}, {"closed_form", closed / level},
                     {"oracle", t.oracle.real() / level}});
    }
  }
  rep.checks.push_back(make_check("(G(0)-1)^2 term is exactly 0", mean_bias == 0.0, mean_bias, 0.0, 0.0));
  rep.checks.push_back(make_check("|correction| / spectrum level < 1e-6 for |k| > 3b", worst < 1e-6, worst,
                                  0.0, 1e-6));
  rep.records["closed_form_gap"] = worst_closed;
  rep.records["probes"] = rec;
  rep.seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport surrogate_null(const ValidateOptions& opt) {
  const auto t0 = Clock::now();
  SuiteReport rep = start("surrogate", opt.seed, opt.reps > 0 ? opt.reps : 100);
  const Region region = rect2(200.0, 100.0);
  const TaperFamily& fam = cached_family(region, taper_opts(kLowBandwidth));
  SurrogateConfig cfg;
  cfg.intensities = {0.01, 0.02};
  cfg.marks = {{1.0, 2.0, 5.0}, {}};
  cfg.gradient_scheme = SamplingScheme::grid(2, {5.0, 5.0}, {2.5, 2.5});
  const WavenumberGrid kg = WavenumberGrid::regular(2, {0.01, 0.01}, {10, 10});
  std::vector<std::size_t> band;
  for (std::size_t k = 0; k < kg.size(); ++k) {
    const double r = norm(kg[k], 2);
    if (r >= 2.0 * kLowBandwidth && r <= 0.1) band.push_back(k);
  }
  std::vector<double> mean_r(static_cast<std::size_t>(rep.reps));
  double grad_min = 0.0;
  std::mutex mu;
  parallel_for(mean_r.size(), [&](std::size_t r) {
    const Surrogate s = simulate_surrogate(region, cfg, replicate_seed(opt.seed, r));
    {
      std::lock_guard<std::mutex> lock(mu);
      for (double v : s.gradient.values) grad_min = std::min(grad_min, v);
    }
    const auto est = multitaper_estimate({make_process("a", s.patterns[0]), make_process("b", s.patterns[1]),
                                          make_process("grad", s.gradient)},
                                         fam, kg, {});
    const auto coh = coherence_and_delay(est);
    double acc = 0.0;
    for (std::size_t k : band) acc += coh.r[coh.index(k, 0, 1)] + coh.r[coh.index(k, 0, 2)] + coh.r[coh.index(k, 1, 2)];
    mean_r[r] = acc / (3.0 * static_cast<double>(band.size()));
  });
  const Stats s = stats(mean_r);
  const double limit = 2.0 / std::sqrt(static_cast<double>(fam.count())) + 3.0 * s.se;
  rep.checks.push_back(make_check("mean mid-band cross-coherence < 2/sqrt(M) + 3 SE", s.mean < limit, s.mean,
                                  0.0, limit, s.se));
  rep.checks.push_back(make_check("gradient norm >= 0", grad_min >= 0.0, grad_min, 0.0, 0.0));
  rep.seconds = seconds_since(t0);
  return rep;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "poisson-flat", "bias-oracle", "lgcp-1d-tapers",        "lgcp-cross", "shifted-pair",   "variance-scaling",
      "taper-quality", "alias-identity", "structural", "nudft",   "colocation",     "unknown-mean",
      "marked-poisson", "surrogate"};
  return names;
}

SuiteReport run_suite(const std::string& name, const ValidateOptions& opt) {
  if (opt.reps < 0) throw ConfigError("reps must be non-negative");
  if (name == "poisson-flat") return flat_suite(name, opt, 1.0, 0.0, 100);
  if (name == "marked-poisson") return flat_suite(name, opt, 1.5, 0.4, 50);
  if (name == "variance-scaling") return variance_scaling(opt);
  if (name == "bias-oracle") return bias_oracle(opt);
  if (name == "lgcp-1d-tapers") return lgcp_1d_tapers(opt);
  if (name == "lgcp-cross") return lgcp_cross(opt);
  if (name == "shifted-pair") return shifted_pair(opt);
  if (name == "taper-quality") return taper_quality(opt);
  if (name == "alias-identity") return alias_identity(opt);
  if (name == "structural") return structural(opt);
  if (name == "nudft") return nudft_suite(opt);
  if (name == "colocation") return colocation(opt);
  if (name == "unknown-mean") return unknown_mean(opt);
  if (name == "surrogate") return surrogate_null(opt);
  throw ConfigError("unknown validation suite '" + name + "'");
}

}  // namespace spatspec
