#include "spatspec/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "spatspec/io.hpp"
#include "spatspec/validate.hpp"

namespace spatspec {

namespace fs = std::filesystem;
using nlohmann::json;

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return content_hash(ss.str());
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path q(p);
  return q.is_absolute() ? q : base / q;
}

Vec2 vec_from_json(const json& j, int dim, const char* what) {
  if (j.is_number()) {
    const double v = j.get<double>();
    return {v, dim == 2 ? v : 0.0};
  }
  const auto v = j.get<std::vector<double>>();
  if (static_cast<int>(v.size()) != dim)
    throw ConfigError(std::string(what) + " needs " + std::to_string(dim) + " components");
  return {v[0], dim == 2 ? v[1] : 0.0};
}

MaternSpec matern_from_json(const json& j, MaternSpec s) {
  s.sigma = j.value("sigma", s.sigma);
  s.ell = j.value("ell", s.ell);
  s.nu = j.value("nu", s.nu);
  return s;
}

json matern_to_json(const MaternSpec& s) { return {{"sigma", s.sigma}, {"ell", s.ell}, {"nu", s.nu}}; }

SamplingScheme project_1d(const SamplingScheme& s, int dim) {
  if (dim == s.dim) return s;
  return SamplingScheme::grid(1, {s.delta[0], 1.0}, {s.offset[0], 0.0});
}

SamplingScheme scheme_or(const json& j, const char* key, const SamplingScheme& fallback, int dim) {
  if (j.contains(key)) return scheme_from_json(j.at(key), dim);
  return project_1d(fallback, dim);
}

// True means of the processes of a model, in simulation order.
std::vector<double> model_means(const ModelConfig& model) {
  return std::visit(
      [](const auto& m) -> std::vector<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PoissonModel>) return {m.lambda};
        if constexpr (std::is_same_v<T, ShiftedPairModel>) return {m.lambda, m.lambda};
        if constexpr (std::is_same_v<T, MarkedPoissonModel>) return {m.lambda * m.mark_mean};
        if constexpr (std::is_same_v<T, LgcpModel>) return {m.mean(), m.point_intensity()};
        if constexpr (std::is_same_v<T, ColocationModel>) return {0.0, 0.0};
        if constexpr (std::is_same_v<T, WhiteNoiseModel>) return {m.mean};
      },
      model);
}

fs::path field_header(const json& j, const fs::path& base, const fs::path& csv) {
  if (j.contains("header")) return resolve(base, j.at("header").get<std::string>());
  fs::path h = csv;
  h.replace_extension(".json");
  return h;
}

}  // namespace

Region region_from_json(const json& j, const fs::path& base) {
  if (j.is_string()) {
    const fs::path p = resolve(base, j.get<std::string>());
    if (!fs::exists(p)) throw ConfigError("region file not found: " + p.string());
    return read_region(p);
  }
  if (!j.is_object()) throw ConfigError("region must be a path or an object");
  return region_from_header(j, base);
}

ModelConfig model_from_json(const json& j, int dim) {
  try {
    const std::string name = j.at("model").get<std::string>();
    ModelConfig out;
    if (name == "poisson") {
      PoissonModel m;
      m.lambda = j.value("lambda", m.lambda);
      out = m;
    } else if (name == "shifted-pair") {
      ShiftedPairModel m;
      m.lambda = j.value("lambda", m.lambda);
      if (j.contains("tau")) m.tau = vec_from_json(j.at("tau"), dim, "tau");
      else if (dim == 1) m.tau[1] = 0.0;
      out = m;
    } else if (name == "marked-poisson") {
      MarkedPoissonModel m;
      m.lambda = j.value("lambda", m.lambda);
      m.mark_mean = j.value("mark_mean", m.mark_mean);
      m.mark_sd = j.value("mark_sd", m.mark_sd);
      out = m;
    } else if (name == "lgcp") {
      LgcpModel m;
      if (j.contains("matern")) m.matern = matern_from_json(j.at("matern"), m.matern);
      if (j.contains("mu")) m.mu = j.at("mu").get<double>();
      else if (j.contains("intensity")) m.mu = lgcp_mu_for_intensity(j.at("intensity").get<double>(), m.matern);
      m.data_scheme = scheme_or(j, "data_scheme", m.data_scheme, dim);
      m.thin_factor = j.value("thin_factor", m.thin_factor);
      out = m;
    } else if (name == "colocation") {
      ColocationModel m;
      if (j.contains("matern")) m.matern = matern_from_json(j.at("matern"), m.matern);
      if (j.contains("alpha")) {
        const auto a = j.at("alpha").get<std::vector<double>>();
        if (a.size() != 2) throw ConfigError("colocation alpha needs two values");
        m.alpha = {a[0], a[1]};
      }
      if (j.contains("grids")) {
        const auto& g = j.at("grids");
        if (!g.is_array() || g.size() != 2) throw ConfigError("colocation needs two grids");
        m.grids = {scheme_from_json(g[0], dim), scheme_from_json(g[1], dim)};
      } else {
        m.grids = {project_1d(m.grids[0], dim), project_1d(m.grids[1], dim)};
      }
      out = m;
    } else if (name == "white-noise") {
      WhiteNoiseModel m;
      m.sigma = j.value("sigma", m.sigma);
      m.mean = j.value("mean", m.mean);
      m.scheme = scheme_or(j, "scheme", m.scheme, dim);
      out = m;
    } else {
      throw ConfigError("unknown model '" + name + "'");
    }
    validate_model(out, dim);
    return out;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
}

json model_to_json(const ModelConfig& model) {
  json j;
  j["model"] = model_name(model);
  std::visit(
      [&j](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PoissonModel>) {
          j["lambda"] = m.lambda;
        } else if constexpr (std::is_same_v<T, ShiftedPairModel>) {
          j["lambda"] = m.lambda;
          j["tau"] = {m.tau[0], m.tau[1]};
        } else if constexpr (std::is_same_v<T, MarkedPoissonModel>) {
          j["lambda"] = m.lambda;
          j["mark_mean"] = m.mark_mean;
          j["mark_sd"] = m.mark_sd;
        } else if constexpr (std::is_same_v<T, LgcpModel>) {
          j["mu"] = m.mean();
          j["matern"] = matern_to_json(m.matern);
          j["data_scheme"] = scheme_to_json(m.data_scheme);
          j["thin_factor"] = m.thin_factor;
        } else if constexpr (std::is_same_v<T, ColocationModel>) {
          j["matern"] = matern_to_json(m.matern);
          j["alpha"] = {m.alpha[0], m.alpha[1]};
          j["grids"] = {scheme_to_json(m.grids[0]), scheme_to_json(m.grids[1])};
        } else {
          j["sigma"] = m.sigma;
          j["mean"] = m.mean;
          j["scheme"] = scheme_to_json(m.scheme);
        }
      },
      model);
  return j;
}

WavenumberGrid kgrid_from_json(const json& j, const Region& region,
                               const std::vector<SamplingScheme>& schemes, bool full_k) {
  const int dim = region.dim();
  try {
    if (j.contains("points")) {
      std::vector<Vec2> pts;
      for (const auto& p : j.at("points")) pts.push_back(vec_from_json(p, dim, "k point"));
      if (pts.empty()) throw ConfigError("kgrid points list is empty");
      return WavenumberGrid::from_points(dim, std::move(pts));
    }
    if (j.contains("step")) {
      const Vec2 step = vec_from_json(j.at("step"), dim, "kgrid step");
      std::array<int, 2> half{0, 0};
      const auto& h = j.at("half");
      if (h.is_number()) {
        half = {h.get<int>(), dim == 2 ? h.get<int>() : 0};
      } else {
        const auto v = h.get<std::vector<int>>();
        if (static_cast<int>(v.size()) != dim) throw ConfigError("kgrid half needs one value per dimension");
        half = {v[0], dim == 2 ? v[1] : 0};
      }
      return WavenumberGrid::regular(dim, step, half);
    }
    Vec2 nyq{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    bool any_grid = false;
    for (const auto& s : schemes) {
      if (!s.is_grid()) continue;
      any_grid = true;
      const Box nb = nyquist_box(s);
      for (int d = 0; d < dim; ++d) nyq[d] = std::min(nyq[d], nb.hi[d]);
    }
    Vec2 kmax{0.0, 0.0};
    if (j.contains("kmax")) {
      kmax = vec_from_json(j.at("kmax"), dim, "kmax");
      if (any_grid && !full_k)
        for (int d = 0; d < dim; ++d) kmax[d] = std::min(kmax[d], nyq[d]);
    } else if (any_grid) {
      kmax = nyq;
    } else {
      throw ConfigError("kgrid needs kmax when no process is grid-sampled");
    }
    return WavenumberGrid::fourier(region.bbox(), j.value("oversample", 1.0), kmax);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("kgrid: ") + e.what());
  }
}

RunConfig load_run_config(const fs::path& file) {
  RunConfig cfg;
  cfg.file = file;
  cfg.hash = file_hash(file);
  const json j = read_json(file);
  const fs::path base = file.parent_path();
  try {
    if (!j.contains("region")) throw ConfigError("run config needs a region");
    cfg.region = region_from_json(j.at("region"), base);
    const int dim = cfg.region->dim();

    const json t = j.value("tapers", json::object());
    if (t.contains("dir")) {
      cfg.taper_dir = resolve(base, t.at("dir").get<std::string>());
      if (!fs::exists(*cfg.taper_dir / "metadata.json"))
        throw ConfigError("taper directory has no metadata.json: " + cfg.taper_dir->string());
    } else {
      cfg.tapers.bandwidth = t.at("bandwidth").get<double>();
      cfg.tapers.threshold = t.value("threshold", cfg.tapers.threshold);
      cfg.tapers.count = t.value("count", 0);
    }

    cfg.kgrid = j.value("kgrid", json::object());
    const json flags = j.value("flags", json::object());
    cfg.oracle_lambda = flags.value("oracle_lambda", false);
    cfg.allow_mixed_tapers = flags.value("allow_mixed_tapers", false);
    cfg.full_k = flags.value("full_k", false);
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("out")) cfg.out = resolve(base, j.at("out").get<std::string>());

    if (!j.contains("processes") || !j.at("processes").is_array() || j.at("processes").empty())
      throw ConfigError("run config needs a non-empty processes list");
    for (const auto& pj : j.at("processes")) {
      ProcessConfig pc;
      pc.label = pj.value("label", std::string());
      pc.taper_offset = pj.value("taper_offset", 0);
      if (pj.contains("lambda")) pc.lambda = pj.at("lambda").get<double>();
      if (pj.contains("model")) {
        pc.type = "model";
        const auto& m = pj.at("model");
        pc.model = model_from_json(m.is_string() ? read_json(resolve(base, m.get<std::string>())) : m, dim);
        if (pj.contains("seed")) pc.seed = pj.at("seed").get<std::uint64_t>();
      } else {
        pc.type = pj.value("type", std::string("points"));
        if (pc.label.empty()) throw ConfigError("data processes need a label");
        pc.path = resolve(base, pj.at("path").get<std::string>());
        if (!fs::exists(pc.path)) throw ConfigError("process file not found: " + pc.path.string());
        if (pc.type == "field") {
          if (pj.contains("scheme")) {
            pc.scheme = scheme_from_json(pj.at("scheme"), dim);
          } else {
            const fs::path h = field_header(pj, base, pc.path);
            if (!fs::exists(h)) throw ConfigError("field " + pc.label + " needs a scheme or a header file");
            pc.scheme = scheme_from_json(read_json(h).at("scheme"), dim);
          }
          if (!pc.scheme->is_grid()) throw ConfigError("field " + pc.label + " needs a grid scheme");
        } else if (pc.type != "points") {
          throw ConfigError("unknown process type '" + pc.type + "'");
        }
      }
      cfg.processes.push_back(std::move(pc));
    }
  } catch (const json::exception& e) {
    throw ConfigError("run config " + file.string() + ": " + e.what());
  }
  return cfg;
}

std::vector<Process> load_processes(const RunConfig& cfg) {
  const Region& region = *cfg.region;
  std::vector<Process> out;
  for (std::size_t i = 0; i < cfg.processes.size(); ++i) {
    const auto& pc = cfg.processes[i];
    if (pc.type == "model") {
      const std::uint64_t seed = pc.seed.value_or(replicate_seed(cfg.seed, i));
      Simulation sim = simulate(*pc.model, region, seed);
      const auto means = model_means(*pc.model);
      for (std::size_t s = 0; s < sim.processes.size(); ++s) {
        Process p = std::move(sim.processes[s]);
        if (!pc.label.empty()) p.label = pc.label + "." + p.label;
        p.taper_offset = pc.taper_offset;
        if (cfg.oracle_lambda) p.lambda = means[s];
        out.push_back(std::move(p));
      }
      continue;
    }
    Process p;
    p.label = pc.label;
    p.taper_offset = pc.taper_offset;
    p.lambda = pc.lambda;
    if (pc.type == "points") p.data = read_points(pc.path, region.dim());
    else p.data = read_field(pc.path, *pc.scheme, region);
    if (cfg.oracle_lambda && !p.lambda)
      throw ConfigError("oracle_lambda is set but process " + p.label + " has no lambda");
    out.push_back(std::move(p));
  }
  std::set<std::string> seen;
  for (const auto& p : out)
    if (!seen.insert(p.label).second) throw ConfigError("duplicate process label '" + p.label + "'");
  return out;
}

}  // namespace spatspec
