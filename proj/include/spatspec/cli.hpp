#pragma once

/// @file cli.hpp
/// Subcommands of the `spatspec` executable.
///
/// Exit codes: 0 success, 1 a validation suite failed, 2 invalid
/// configuration, 3 numerical failure.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "spatspec/estimator.hpp"
#include "spatspec/tapers.hpp"
#include "spatspec/validate.hpp"

namespace spatspec {

inline constexpr const char* kVersion = "0.1.0";

struct TapersCommand {
  std::filesystem::path region;
  double bandwidth = 0.0;
  double threshold = 0.99;
  int count = 0;
  std::filesystem::path out;
};

/// Computes the family and writes it to `out`.
TaperFamily cmd_tapers(const TapersCommand& cmd);

struct SimulateCommand {
  std::optional<std::string> model;   ///< must agree with the config's model if both are set
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> region;  ///< overrides the config's region
  std::uint64_t seed = 0;
  std::filesystem::path out;
  bool truth = false;
};

/// Writes region.json, one CSV per process (fields also get a JSON header
/// holding the scheme), simulation.json and, with `truth`, truth.csv.
void cmd_simulate(const SimulateCommand& cmd);

struct EstimateCommand {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;  ///< overrides the config's out
  bool allow_mixed_tapers = false;
  bool full_k = false;
};

/// Writes spectral_matrix.csv, coherence.csv, group_delay.csv,
/// metadata.json and provenance.json.
SpectralEstimate cmd_estimate(const EstimateCommand& cmd);

struct ValidateCommand {
  std::string suite;
  int reps = 0;
  std::uint64_t seed = 20240917;
  std::optional<std::filesystem::path> out;
};

SuiteReport cmd_validate(const ValidateCommand& cmd);

/// Parses arguments and runs a subcommand; returns the exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace spatspec
