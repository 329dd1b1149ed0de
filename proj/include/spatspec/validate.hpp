#pragma once

/// @file validate.hpp
/// Named Monte Carlo and property suites comparing estimates with oracles.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "spatspec/estimator.hpp"

namespace spatspec {

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  double se = 0.0;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  int reps = 0;
  double seconds = 0.0;
  std::vector<Check> checks;
  nlohmann::json records = nlohmann::json::object();

  bool pass() const;
  nlohmann::json to_json() const;
};

struct ValidateOptions {
  int reps = 0;  ///< 0 uses the suite default
  std::uint64_t seed = 20240917;
};

const std::vector<std::string>& suite_names();
/// @throws ConfigError for an unknown suite.
SuiteReport run_suite(const std::string& name, const ValidateOptions& opt = {});

/// Seed of replicate `rep` derived from a base seed (splitmix64).
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t rep);

struct PlaneFit {
  double g0 = 0.0;  ///< d theta / d k0
  double g1 = 0.0;  ///< d theta / d k1
  double intercept = 0.0;
  int used = 0;
};

/// Unwraps theta^{pq} over the wavenumbers accepted by `band` (regular grid
/// only), growing from the most coherent point through grid neighbours in
/// order of coherence, then fits theta = g.k + c by least squares.
PlaneFit unwrap_plane_fit(const CoherenceField& coh, int p, int q,
                          const std::function<bool(const Vec2&)>& band);

}  // namespace spatspec
