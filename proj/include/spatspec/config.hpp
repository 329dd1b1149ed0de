#pragma once

/// @file config.hpp
/// JSON run and model configurations used by the command line front-end.
///
/// Every path inside a configuration file is resolved relative to the
/// directory holding that file.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "spatspec/estimator.hpp"
#include "spatspec/models.hpp"
#include "spatspec/tapers.hpp"

namespace spatspec {

/// FNV-1a 64 of a byte string, as 16 hex digits.
std::string content_hash(const std::string& bytes);
/// content_hash of a file's bytes.
std::string file_hash(const std::filesystem::path& path);

/// A region given either as a path to a header file or as an inline header
/// object {bbox, delta_ref[, mask]}.
Region region_from_json(const nlohmann::json& j, const std::filesystem::path& base);

/// {"model": name, ...parameters}. Missing parameters keep their defaults;
/// in 1d the default grids use their first component.
ModelConfig model_from_json(const nlohmann::json& j, int dim);
nlohmann::json model_to_json(const ModelConfig& model);

/// Wavenumber grid specification. `points` wins over `step`/`half`, which
/// win over the Fourier grid of the bounding box (`oversample`, `kmax`).
/// Without `kmax` the Fourier grid stops at the tightest Nyquist box of the
/// grid schemes; `full_k` lifts that restriction for an explicit `kmax`.
WavenumberGrid kgrid_from_json(const nlohmann::json& j, const Region& region,
                               const std::vector<SamplingScheme>& schemes, bool full_k);

struct ProcessConfig {
  std::string label;
  std::string type;  ///< "points", "field" or "model"
  std::filesystem::path path;
  std::optional<SamplingScheme> scheme;
  std::optional<double> lambda;
  int taper_offset = 0;
  std::optional<ModelConfig> model;
  std::optional<std::uint64_t> seed;
};

struct RunConfig {
  std::filesystem::path file;
  std::string hash;  ///< content hash of the config bytes
  std::optional<Region> region;
  TaperOptions tapers;
  std::optional<std::filesystem::path> taper_dir;
  nlohmann::json kgrid = nlohmann::json::object();
  std::vector<ProcessConfig> processes;
  bool oracle_lambda = false;
  bool allow_mixed_tapers = false;
  bool full_k = false;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out;
};

/// @throws ConfigError for missing files, duplicate labels or bad values.
RunConfig load_run_config(const std::filesystem::path& file);

/// Reads or simulates every process of the run. Model entries expand to
/// all processes of the model, labelled "<label>.<sub>" when a label is set.
std::vector<Process> load_processes(const RunConfig& cfg);

}  // namespace spatspec
