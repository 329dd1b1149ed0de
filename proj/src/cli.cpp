#include "spatspec/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "spatspec/config.hpp"
#include "spatspec/io.hpp"
#include "spatspec/models.hpp"
#include "spatspec/parallel.hpp"

namespace spatspec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

void write_k(std::ostream& out, const Vec2& k, int dim) {
  out << fmt17(k[0]);
  if (dim == 2) out << ',' << fmt17(k[1]);
}

const char* k_header(int dim) { return dim == 2 ? "kx,ky" : "kx"; }

json kgrid_to_json(const WavenumberGrid& g) {
  json j;
  j["size"] = g.size();
  j["regular"] = g.regular();
  j["symmetric"] = g.symmetric();
  if (g.regular()) {
    j["step"] = std::vector<double>(g.step().begin(), g.step().begin() + g.dim());
    j["half"] = std::vector<int>(g.half().begin(), g.half().begin() + g.dim());
  }
  return j;
}

void write_matrix_csv(const fs::path& path, const WavenumberGrid& kg, int P,
                      const std::function<cdouble(std::size_t, int, int)>& f) {
  auto out = open_out(path);
  out << k_header(kg.dim()) << ",p,q,re,im\n";
  for (std::size_t k = 0; k < kg.size(); ++k)
    for (int p = 0; p < P; ++p)
      for (int q = 0; q < P; ++q) {
        const cdouble v = f(k, p, q);
        write_k(out, kg[k], kg.dim());
        out << ',' << p << ',' << q << ',' << fmt17(v.real()) << ',' << fmt17(v.imag()) << '\n';
      }
}

ModelConfig resolve_model(const SimulateCommand& cmd, json& cfg, int dim) {
  if (!cfg.contains("model")) {
    if (!cmd.model) throw ConfigError("simulate needs --model or a config naming the model");
    cfg["model"] = *cmd.model;
  } else if (cmd.model && cfg.at("model").get<std::string>() != *cmd.model) {
    throw ConfigError("--model " + *cmd.model + " disagrees with the config's model '" +
                      cfg.at("model").get<std::string>() + "'");
  }
  return model_from_json(cfg, dim);
}

}  // namespace

TaperFamily cmd_tapers(const TapersCommand& cmd) {
  const Region region = read_region(cmd.region);
  TaperOptions opt;
  opt.bandwidth = cmd.bandwidth;
  opt.threshold = cmd.threshold;
  opt.count = cmd.count;
  TaperFamily fam = compute_tapers(region, opt);
  save_tapers(fam, cmd.out);
  return fam;
}

void cmd_simulate(const SimulateCommand& cmd) {
  json cfg = json::object();
  fs::path base = fs::current_path();
  if (cmd.config) {
    cfg = read_json(*cmd.config);
    base = cmd.config->parent_path();
  }
  std::optional<Region> region;
  if (cmd.region) region = read_region(*cmd.region);
  else if (cfg.contains("region")) region = region_from_json(cfg.at("region"), base);
  else throw ConfigError("simulate needs --region or a config with a region");
  const ModelConfig model = resolve_model(cmd, cfg, region->dim());

  const Simulation sim = simulate(model, *region, cmd.seed);
  fs::create_directories(cmd.out);
  write_region(*region, cmd.out / "region.json");
  json procs = json::array();
  for (const auto& p : sim.processes) {
    const std::string file = p.label + ".csv";
    json pj{{"label", p.label}, {"path", file}};
    if (p.is_points()) {
      const auto& pts = std::get<PointPattern>(p.data);
      write_points(pts, cmd.out / file);
      pj["type"] = "points";
      pj["count"] = pts.size();
    } else {
      const auto& f = std::get<GriddedField>(p.data);
      write_field(f, cmd.out / file);
      write_json(cmd.out / (p.label + ".json"), {{"scheme", scheme_to_json(f.scheme())}, {"csv", file}});
      pj["type"] = "field";
      pj["scheme"] = scheme_to_json(f.scheme());
      pj["count"] = f.nodes.count;
    }
    procs.push_back(pj);
  }
  json meta{{"model", model_to_json(model)},
            {"seed", cmd.seed},
            {"region_hash", region->hash()},
            {"processes", procs},
            {"max_log_variation", sim.max_log_variation},
            {"version", kVersion}};

  if (cmd.truth) {
    std::vector<SamplingScheme> schemes;
    for (const auto& p : sim.processes) schemes.push_back(p.scheme(region->dim()));
    const WavenumberGrid kg =
        kgrid_from_json(cfg.value("truth_kgrid", json::object()), *region, schemes, false);
    const TrueSpectrum ts = true_spectrum(model, region->dim());
    const int P = ts.P;
    std::vector<cdouble> vals(kg.size() * static_cast<std::size_t>(P * P));
    parallel_for(kg.size(), [&](std::size_t k) {
      for (int p = 0; p < P; ++p)
        for (int q = 0; q < P; ++q) vals[(k * P + p) * P + q] = ts(kg[k], p, q);
    });
    write_matrix_csv(cmd.out / "truth.csv", kg, P,
                     [&](std::size_t k, int p, int q) { return vals[(k * P + p) * P + q]; });
    meta["truth"] = {{"labels", ts.labels}, {"method", ts.method}, {"kgrid", kgrid_to_json(kg)}};
  }
  write_json(cmd.out / "simulation.json", meta);
}

SpectralEstimate cmd_estimate(const EstimateCommand& cmd) {
  RunConfig cfg = load_run_config(cmd.config);
  if (cmd.allow_mixed_tapers) cfg.allow_mixed_tapers = true;
  if (cmd.full_k) cfg.full_k = true;
  const fs::path out = cmd.out ? *cmd.out : cfg.out.value_or(fs::path());
  if (out.empty()) throw ConfigError("estimate needs --out or an out entry in the config");
  const Region& region = *cfg.region;

  const std::vector<Process> processes = load_processes(cfg);
  std::vector<SamplingScheme> schemes;
  for (const auto& p : processes) schemes.push_back(p.scheme(region.dim()));
  const WavenumberGrid kg = kgrid_from_json(cfg.kgrid, region, schemes, cfg.full_k);
  const TaperFamily fam = cfg.taper_dir ? load_tapers(*cfg.taper_dir, region) : compute_tapers(region, cfg.tapers);

  EstimateOptions opt;
  opt.allow_mixed_tapers = cfg.allow_mixed_tapers;
  const auto dfts = tapered_dfts(processes, fam, kg, opt);
  const SpectralEstimate est = estimate_from_dfts(dfts, fam, opt.allow_mixed_tapers);
  const CoherenceField coh = coherence_and_delay(est);

  fs::create_directories(out);
  const int P = est.P;
  write_matrix_csv(out / "spectral_matrix.csv", kg, P,
                   [&](std::size_t k, int p, int q) { return est.at(k, p, q); });
  {
    auto c = open_out(out / "coherence.csv");
    auto g = open_out(out / "group_delay.csv");
    c << k_header(kg.dim()) << ",p,q,r,theta\n";
    g << k_header(kg.dim()) << ",p,q,theta\n";
    for (std::size_t k = 0; k < kg.size(); ++k)
      for (int p = 0; p < P; ++p)
        for (int q = p + 1; q < P; ++q) {
          const std::size_t i = coh.index(k, p, q);
          write_k(c, kg[k], kg.dim());
          c << ',' << p << ',' << q << ',' << fmt17(coh.r[i]) << ',' << fmt17(coh.theta[i]) << '\n';
          write_k(g, kg[k], kg.dim());
          g << ',' << p << ',' << q << ',' << fmt17(coh.theta[i]) << '\n';
        }
  }

  std::vector<double> lambda_hat;
  for (const auto& d : dfts) lambda_hat.push_back(d.front().lambda_hat);
  json meta{{"M", est.M},
            {"bandwidth", est.bandwidth},
            {"labels", est.labels},
            {"region_hash", est.region_hash},
            {"P", P},
            {"dim", region.dim()},
            {"lambda_hat", lambda_hat},
            {"concentrations", fam.concentrations},
            {"allow_mixed_tapers", cfg.allow_mixed_tapers},
            {"kgrid", kgrid_to_json(kg)}};
  write_json(out / "metadata.json", meta);

  // Inputs are keyed by their path relative to the config file.
  const fs::path cfg_dir = fs::absolute(cfg.file).parent_path();
  auto key = [&](const fs::path& p) { return fs::relative(fs::absolute(p), cfg_dir).generic_string(); };
  json inputs = json::object();
  for (const auto& pc : cfg.processes)
    if (pc.type != "model") inputs[key(pc.path)] = file_hash(pc.path);
  if (cfg.taper_dir) inputs[key(*cfg.taper_dir / "metadata.json")] = file_hash(*cfg.taper_dir / "metadata.json");
  json prov{{"command", "estimate"},
            {"config_hash", cfg.hash},
            {"region_hash", region.hash()},
            {"input_hashes", inputs},
            {"seed", cfg.seed},
            {"version", kVersion},
            {"float_format", "%.17g"}};
  write_json(out / "provenance.json", prov);
  return est;
}

SuiteReport cmd_validate(const ValidateCommand& cmd) {
  ValidateOptions opt;
  opt.reps = cmd.reps;
  opt.seed = cmd.seed;
  SuiteReport rep = run_suite(cmd.suite, opt);
  if (cmd.out) write_json(*cmd.out, rep.to_json());
  return rep;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Multitaper spectral estimation for mixed point patterns and gridded fields", "spatspec"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: SPATSPEC_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  TapersCommand tc;
  auto* tapers = app.add_subcommand("tapers", "compute a taper family for a region");
  tapers->add_option("--region", tc.region, "region header JSON")->required();
  tapers->add_option("--bandwidth", tc.bandwidth, "concentration radius b")->required();
  tapers->add_option("--threshold", tc.threshold, "minimum concentration");
  tapers->add_option("--count", tc.count, "exact number of tapers (0: by threshold)");
  tapers->add_option("--out", tc.out, "output directory")->required();

  SimulateCommand sc;
  std::string model, sim_config, sim_region;
  auto* sim = app.add_subcommand("simulate", "simulate a model");
  sim->add_option("--model", model, "poisson, shifted-pair, marked-poisson, lgcp, colocation, white-noise");
  sim->add_option("--config", sim_config, "model config JSON");
  sim->add_option("--region", sim_region, "region header JSON");
  sim->add_option("--seed", sc.seed, "seed");
  sim->add_option("--out", sc.out, "output directory")->required();
  sim->add_flag("--truth", sc.truth, "tabulate the true spectral matrix");

  EstimateCommand ec;
  std::string est_out;
  auto* est = app.add_subcommand("estimate", "multitaper estimate from a run config");
  est->add_option("--config", ec.config, "run config JSON")->required();
  est->add_option("--out", est_out, "output directory");
  est->add_flag("--allow-mixed-tapers", ec.allow_mixed_tapers, "honour per-process taper offsets");
  est->add_flag("--full-k", ec.full_k, "do not clip the k-grid to the Nyquist box");

  ValidateCommand vc;
  std::string val_out;
  auto* val = app.add_subcommand("validate", "run a validation suite");
  val->add_option("suite", vc.suite, "suite name")->required();
  val->add_option("--reps", vc.reps, "replications (0: suite default)");
  val->add_option("--seed", vc.seed, "base seed");
  val->add_option("--out", val_out, "write the report JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (threads > 0) set_thread_count(threads);
    if (*tapers) {
      const TaperFamily fam = cmd_tapers(tc);
      std::cout << "wrote " << fam.count() << " tapers to " << tc.out.string() << '\n';
    } else if (*sim) {
      if (!model.empty()) sc.model = model;
      if (!sim_config.empty()) sc.config = sim_config;
      if (!sim_region.empty()) sc.region = sim_region;
      cmd_simulate(sc);
    } else if (*est) {
      if (!est_out.empty()) ec.out = est_out;
      const SpectralEstimate e = cmd_estimate(ec);
      std::cout << "estimated " << e.P << " processes with M = " << e.M << " at " << e.kgrid.size()
                << " wavenumbers\n";
    } else if (*val) {
      if (!val_out.empty()) vc.out = val_out;
      const SuiteReport rep = cmd_validate(vc);
      if (vc.out) {
        for (const auto& c : rep.checks)
          std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " (measured " << c.measured << ")\n";
      } else {
        std::cout << rep.to_json().dump(2) << '\n';
      }
      return rep.pass() ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace spatspec
