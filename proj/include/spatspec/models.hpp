#pragma once

/// @file models.hpp
/// Simulators for the example processes and their true spectra.
///
/// Matérn parameterization: c(r) = sigma^2 2^{1-nu}/Gamma(nu) (sqrt(2 nu) r/ell)^nu
/// K_nu(sqrt(2 nu) r/ell), with sigma the marginal standard deviation.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "spatspec/estimator.hpp"
#include "spatspec/fourier.hpp"
#include "spatspec/geometry.hpp"

namespace spatspec {

struct MaternSpec {
  double sigma = 1.0;
  double ell = 30.0;
  double nu = 2.5;

  /// @throws ConfigError unless all parameters are positive.
  void validate() const;
};

double matern_cov(double r, const MaternSpec& spec);
/// Spectral density in dimension `dim` at |k|; integrates to sigma^2.
double matern_sdf(double knorm, const MaternSpec& spec, int dim);
/// Smallest r with matern_cov(r) <= tol * sigma^2.
double matern_range(const MaternSpec& spec, double tol = 1e-15);

/// Fourier transform of an isotropic function g(|u|) at |k|: the cosine
/// transform in 1d, the J0 Hankel transform in 2d. Composite Simpson on
/// [0, rmax] with the given step.
double radial_fourier_transform(const std::function<double(double)>& g, double knorm, int dim,
                                double step, double rmax);

/// Deterministic generator for (seed, stream).
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Stationary Gaussian draws with Matérn covariance on a regular rectangle
/// of n0 x n1 nodes (n1 = 1 in 1d). Values are indexed i1 * n0 + i0.
class GaussianFieldSampler {
 public:
  GaussianFieldSampler(const MaternSpec& spec, int dim, Vec2 delta, std::array<int, 2> n,
                       int dense_limit = 4000);

  /// Two independent draws.
  std::pair<std::vector<double>, std::vector<double>> sample_two(std::mt19937_64& rng) const;
  std::vector<double> sample(std::mt19937_64& rng) const;

  bool uses_embedding() const { return dense_.size() == 0; }
  const std::array<int, 2>& embedding_shape() const { return m_; }

 private:
  int dim_;
  std::array<int, 2> n_;
  std::array<int, 2> m_{1, 1};
  std::vector<double> sqrt_eig_;  // sqrt(lambda / M)
  Eigen::MatrixXd dense_;         // Cholesky factor when embedding fails
};

/// Mean-zero Matérn field on the scheme's nodes inside the region.
GriddedField simulate_gaussian_field(const MaternSpec& spec, const SamplingScheme& scheme,
                                     const Region& region, std::uint64_t seed);

PointPattern simulate_poisson(const Region& region, double lambda, std::uint64_t seed);
std::pair<PointPattern, PointPattern> simulate_shifted_pair(const Region& region, double lambda,
                                                            const Vec2& tau, std::uint64_t seed);
PointPattern simulate_marked_poisson(const Region& region, double lambda, double mark_mean,
                                     double mark_sd, std::uint64_t seed);

struct LgcpResult {
  GriddedField field;
  PointPattern points;
  /// Largest |Y(u) - Y(v)| over neighbouring thinning nodes.
  double max_log_variation = 0.0;
};

/// Log-Gaussian Cox process. Y = mu + Z is simulated on a thinning grid whose
/// spacing is data_scheme.delta / thin_factor (sharing the data grid's
/// nodes); each thinning cell receives Poisson(exp(Y) * cell volume) uniform
/// points, kept when inside the region. The field is returned on the data
/// grid.
LgcpResult simulate_lgcp(const Region& region, double mu, const MaternSpec& spec,
                         const SamplingScheme& data_scheme, int thin_factor, std::uint64_t seed);
/// mu giving point intensity lambda: log(lambda) - sigma^2 / 2.
double lgcp_mu_for_intensity(double lambda, const MaternSpec& spec);

/// Y^j = U^j + alpha_j X on grid j; U^1, U^2, X independent with the same
/// Matérn covariance. X is drawn once on the common refinement of the grids.
std::pair<GriddedField, GriddedField> simulate_colocation(const Region& region,
                                                          const MaternSpec& spec,
                                                          const std::array<double, 2>& alpha,
                                                          const std::array<SamplingScheme, 2>& grids,
                                                          std::uint64_t seed);
/// Coarsest grid containing the nodes of both schemes.
/// @throws ConfigError when spacings or offsets are incommensurate.
SamplingScheme common_refinement(const SamplingScheme& a, const SamplingScheme& b);

/// IID N(mean, sigma^2) values at the grid nodes inside the region.
GriddedField simulate_white_noise(const Region& region, const SamplingScheme& scheme, double sigma,
                                  double mean, std::uint64_t seed);

struct SurrogateConfig {
  std::vector<double> intensities;
  /// Empirical marks per pattern; empty means unmarked.
  std::vector<std::vector<double>> marks;
  SamplingScheme gradient_scheme;
  MaternSpec gradient_spec{4.0, 60.0, 2.5};
};

struct Surrogate {
  std::vector<PointPattern> patterns;
  GriddedField gradient;
};

/// Independent Poisson patterns with the given intensities (marks resampled
/// with replacement) and the finite-difference gradient norm of an
/// independent Matérn field.
Surrogate simulate_surrogate(const Region& region, const SurrogateConfig& cfg, std::uint64_t seed);

struct PoissonModel {
  double lambda = 0.001;
};
struct ShiftedPairModel {
  double lambda = 0.001;
  Vec2 tau{10.5, 15.0};
};
struct MarkedPoissonModel {
  double lambda = 0.001;
  double mark_mean = 1.5;
  double mark_sd = 0.4;
};
struct LgcpModel {
  std::optional<double> mu;  ///< default: point intensity 0.001
  MaternSpec matern;
  SamplingScheme data_scheme = SamplingScheme::grid(2, {5.0, 5.0});
  int thin_factor = 5;

  double mean() const { return mu.value_or(lgcp_mu_for_intensity(0.001, matern)); }
  double point_intensity() const;
};
struct ColocationModel {
  MaternSpec matern;
  std::array<double, 2> alpha{0.8, 0.5};
  std::array<SamplingScheme, 2> grids{SamplingScheme::grid(2, {5.0, 5.0}, {0.0, 0.0}),
                                      SamplingScheme::grid(2, {10.0, 15.0}, {0.0, 3.0})};
};
struct WhiteNoiseModel {
  double sigma = 1.0;
  double mean = 0.0;
  SamplingScheme scheme = SamplingScheme::grid(2, {1.0, 1.0}, {0.5, 0.5});
};

using ModelConfig = std::variant<PoissonModel, ShiftedPairModel, MarkedPoissonModel, LgcpModel,
                                 ColocationModel, WhiteNoiseModel>;

std::string model_name(const ModelConfig& model);
/// @throws ConfigError on invalid parameters.
void validate_model(const ModelConfig& model, int dim);

struct Simulation {
  std::vector<Process> processes;
  double max_log_variation = 0.0;
};

Simulation simulate(const ModelConfig& model, const Region& region, std::uint64_t seed);

/// True spectral matrix of a model.
struct TrueSpectrum {
  int P = 1;
  int dim = 2;
  std::vector<std::string> labels;
  std::string method;  ///< "closed-form" or "numeric-FT"
  std::function<cdouble(const Vec2&, int, int)> f;
  std::vector<std::uint8_t> decays;  ///< per pair (p * P + q)
  std::vector<std::optional<Box>> support;

  cdouble operator()(const Vec2& k, int p, int q) const { return f(k, p, q); }
  Spectrum pair(int p, int q) const;
};

TrueSpectrum true_spectrum(const ModelConfig& model, int dim);

/// (e^{c} - 1) transformed numerically, c the Matérn covariance.
double lgcp_log_term(double knorm, const MaternSpec& spec, int dim, double step_scale = 1.0);

}  // namespace spatspec
