#pragma once

/// @file estimator.hpp
/// Periodograms, the multitaper spectral matrix, coherence and group delay,
/// plus the quadrature oracles for the expected periodogram.

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spatspec/fourier.hpp"
#include "spatspec/geometry.hpp"
#include "spatspec/tapers.hpp"

namespace spatspec {

/// One observed process. `lambda` overrides the intensity estimate (oracle
/// mode). `taper_offset` shifts the taper index used for this process and is
/// only honoured with EstimateOptions::allow_mixed_tapers.
struct Process {
  std::string label;
  std::variant<PointPattern, GriddedField> data;
  std::optional<double> lambda;
  int taper_offset = 0;

  bool is_points() const { return std::holds_alternative<PointPattern>(data); }
  SamplingScheme scheme(int dim) const;
};

struct EstimateOptions {
  bool allow_mixed_tapers = false;
  /// Use only the first `tapers` tapers of the family (0 = all).
  int tapers = 0;
  NudftOptions nudft;
};

/// J_m^p for every process p and taper m: dfts[p][m].
std::vector<std::vector<TaperedDFT>> tapered_dfts(const std::vector<Process>& processes,
                                                  const TaperFamily& family,
                                                  const WavenumberGrid& kgrid,
                                                  const EstimateOptions& opt = {});

/// I(k) = Jp(k) conj(Jq(k)).
/// @throws ConfigError for different taper indices unless `allow_mixed`.
std::vector<cdouble> periodogram(const TaperedDFT& jp, const TaperedDFT& jq, bool allow_mixed = false);

struct SpectralEstimate {
  WavenumberGrid kgrid;
  int P = 0;
  int M = 0;
  double bandwidth = 0.0;
  std::vector<std::string> labels;
  std::string region_hash;
  std::vector<cdouble> fhat;  ///< index (k * P + p) * P + q

  cdouble at(std::size_t k, int p, int q) const {
    return fhat[(k * static_cast<std::size_t>(P) + static_cast<std::size_t>(p)) * P + q];
  }
};

/// f_hat(k) = (1/M) sum_m J_m(k) J_m(k)^H.
SpectralEstimate multitaper_estimate(const std::vector<Process>& processes, const TaperFamily& family,
                                     const WavenumberGrid& kgrid, const EstimateOptions& opt = {});
/// Same from precomputed transforms (dfts[p][m]).
SpectralEstimate estimate_from_dfts(const std::vector<std::vector<TaperedDFT>>& dfts,
                                    const TaperFamily& family, bool allow_mixed = false);

struct CoherenceField {
  WavenumberGrid kgrid;
  int P = 0;
  std::vector<double> r;        ///< NaN where invalid
  std::vector<double> theta;    ///< in (-pi, pi], NaN where invalid
  std::vector<std::uint8_t> valid;

  std::size_t index(std::size_t k, int p, int q) const {
    return (k * static_cast<std::size_t>(P) + static_cast<std::size_t>(p)) * P + q;
  }
};

/// Entries with min(f^pp, f^qq) <= floor are flagged invalid. The default
/// floor is 1e-12 times the largest marginal.
CoherenceField coherence_and_delay(const SpectralEstimate& est,
                                   std::optional<double> floor = std::nullopt);

/// A spectral density f^{p,q}. Flat spectra (e.g. Poisson) set
/// `decays = false`; band-limited ones give their support box, outside of
/// which f is taken to be zero.
struct Spectrum {
  std::function<cdouble(const Vec2&)> f;
  bool decays = true;
  std::optional<Box> support;
};

/// A transfer function with the alias structure of its sampling scheme.
struct TaperTransfer {
  LatticeTransform transform;
  AliasStructure alias;
};

/// Continuous transfer function for continuous schemes, sampled one otherwise.
TaperTransfer taper_transfer(const TaperFamily& family, int m, const SamplingScheme& scheme);
/// Transfer function of the default intensity weights for the scheme.
TaperTransfer mean_transfer(const Region& region, const SamplingScheme& scheme);

struct QuadratureOptions {
  double bandwidth = 0.0;  ///< sets the k spacing (<= b/8) and the window (4b)
  double tol = 1e-6;       ///< relative to the integrand scale
  int max_shells = 400;
  /// The spacing is halved until successive levels agree; levels with
  /// more points than this raise NumericalError.
  double max_points = 1 << 22;
};

struct QuadratureResult {
  cdouble value;
  double error = 0.0;  ///< |Q(h) - Q(h/2)|
};

/// int X(a - k') conj(Y(c - k')) f(k') dk' by midpoint quadrature on the
/// intersection of the two alias lattices.
QuadratureResult convolve_transfer(const Spectrum& f, const TaperTransfer& x, const Vec2& a,
                                   const TaperTransfer& y, const Vec2& c, bool full_cell,
                                   const QuadratureOptions& opt);

/// E[I^{p,q}(k)] = int H^p(k-k') conj(H^q(k-k')) f(k') dk'.
/// @throws NumericalError when the grid-halving error exceeds the tolerance.
QuadratureResult expected_periodogram(const Spectrum& f, const TaperTransfer& hp,
                                      const TaperTransfer& hq, const Vec2& k,
                                      const QuadratureOptions& opt);

/// sum over psi in Psi^p ∩ Psi^q, |psi|_inf <= radius, of
/// f(k - psi) w^p(psi) conj(w^q(psi)).
/// @throws NumericalError if the outermost shell exceeds tol of the total,
///         ConfigError for a non-decaying spectrum with a nontrivial lattice.
cdouble aliased_spectrum(const Spectrum& f, const AliasStructure& p, const AliasStructure& q,
                         const Vec2& k, double radius, double tol = 1e-10);

/// The terms of the expected periodogram when the intensities are estimated
/// with weights whose transfer functions are G^p, G^q.
struct UnknownMeanTerms {
  cdouble oracle;      ///< int H^p conj(H^q) f
  cdouble mean_bias;   ///< H^p conj(H^q) (G^p(0)-1)(G^q(0)-1) lambda^p lambda^q
  cdouble gg;          ///< H^p(k) conj(H^q(k)) int G^p(-k') conj(G^q(-k')) f
  cdouble hg;          ///< -conj(H^q(k)) int H^p(k-k') conj(G^q(-k')) f
  cdouble gh;          ///< -H^p(k) int G^p(-k') conj(H^q(k-k')) f
  double error = 0.0;  ///< largest quadrature error estimate

  cdouble correction() const { return mean_bias + gg + hg + gh; }
  cdouble total() const { return oracle + correction(); }
};

UnknownMeanTerms unknown_mean_bias(const Spectrum& f, const TaperTransfer& hp, const TaperTransfer& hq,
                                   const TaperTransfer& gp, const TaperTransfer& gq, const Vec2& k,
                                   double lambda_p, double lambda_q, const QuadratureOptions& opt);

}  // namespace spatspec
