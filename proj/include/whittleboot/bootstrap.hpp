#pragma once

#include "whittleboot/family.hpp"
#include "whittleboot/psd.hpp"
#include "whittleboot/rng.hpp"
#include "whittleboot/smoothing.hpp"
#include "whittleboot/spectral.hpp"
#include "whittleboot/whittle.hpp"
#include "whittleboot/yule_walker.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace whittleboot {

struct Variant {
  enum class Kind { standard, tapered, debiased, boundary };
  Kind kind = Kind::standard;
  TaperSpec taper{};           // tapered
  std::optional<int> ar_order;  // boundary; AIC choice when empty

  static Variant standard() { return {}; }
  static Variant tapered(double rho) { return {Kind::tapered, TaperSpec::tukey(rho), std::nullopt}; }
  static Variant debiased() { return {Kind::debiased, {}, std::nullopt}; }
  static Variant boundary(std::optional<int> p = std::nullopt) { return {Kind::boundary, {}, p}; }

  /// "standard", "tapered:rho", "debiased", "boundary", "boundary:p".
  static Variant parse(const std::string& text);
  [[nodiscard]] std::string to_string() const;
};

/// round(4 n^{1/4}), clamped to [4, n].
Eigen::Index default_block_length(Eigen::Index n);

struct BootstrapConfig {
  Eigen::Index B = 400;
  std::optional<Eigen::Index> b;  // default_block_length(n) when empty
  std::uint64_t seed = 1;
  Variant variant{};
  LogTerm log_term = LogTerm::discrete;
  std::optional<double> bandwidth;  // CV when empty
  double max_discard_fraction = 0.05;

  /// Throws InvalidInput unless 4 <= b <= n and B >= 100.
  void validate(Eigen::Index n) const;
  [[nodiscard]] Eigen::Index block_length(Eigen::Index n) const {
    return b ? *b : default_block_length(n);
  }
};

// ---------------------------------------------------------------- replicates

/// I*(lambda_j) = f-hat(lambda_j) U_j, U_j iid Exp(1), j = 1..N.
Vector mult_pseudo_periodogram(const Vector& fhat, Rng& rng);

/// (8 pi^2 / n) sum over G(n) of g g^T f-hat^2.
Matrix v1_star(const SpectralFamily& family, const Vector& theta0, const FourierGrid& grid,
               const Vector& fhat);

/// Hessian of D_n(., I*) at theta0.
Matrix w_star(const SpectralFamily& family, const Vector& theta0, const FourierGrid& grid,
              const Vector& pseudo, LogTerm log_term = LogTerm::discrete);

struct ThetaStar {
  Vector theta;
  Vector pseudo;  // the spectral values it was fitted to
  bool converged = false;
};

/// One multiplicative replicate, minimized from theta0 (other starts on failure).
ThetaStar bootstrap_theta_star(const SpectralFamily& family, const FourierGrid& grid,
                               const Vector& fhat, const Vector& theta0, Rng& rng,
                               LogTerm log_term = LogTerm::discrete);

/// (V1*)^{-1/2} W* sqrt(n) (theta* - theta0). Throws NumericFailure when the
/// smallest eigenvalue of V1* is below 1e-10 trace.
Vector z_star(const Matrix& V1, const Matrix& W, const Vector& theta_star, const Vector& theta0,
              Eigen::Index n);

// ---------------------------------------------------------------- convolved subsampling

/// Window quantities shared by M+, Sigma+ and C+.
struct SubsampleContext {
  Eigen::Index n = 0;
  Eigen::Index b = 0;
  Eigen::Index k = 0;  // floor(n / b)
  FourierGrid grid{4};
  Vector fhat;    // f-hat at lambda_{j,b}, j = 1..floor(b/2)
  Vector ftilde;  // subsample mean spectrum
  Matrix U;       // windows x floor(b/2): I_b^{(t)} / f-tilde
  Matrix g;       // m x floor(b/2) scores at theta0
  Matrix y;       // windows x m: sum_j g f-hat (U - 1)
};

SubsampleContext subsample_context(const TimeSeries& series, const SpectralDensityEstimate& fhat,
                                   const SpectralFamily& family, const Vector& theta0,
                                   Eigen::Index b,
                                   const std::optional<TaperSpec>& taper = std::nullopt);

/// One draw of M+ from k windows picked uniformly with replacement.
Vector convolved_m_plus(const SubsampleContext& ctx, Rng& rng);

/// Var*(M+) in closed form.
Matrix sigma_plus(const SubsampleContext& ctx);
/// The |j1| = |j2| part of Sigma+.
Matrix c_plus(const SubsampleContext& ctx);
/// (Sigma+ - C+) symmetrized.
Matrix v2_plus(const Matrix& sigma, const Matrix& c);

// ---------------------------------------------------------------- assembly

/// (W*)^{-1} (V1* + V2+)^{1/2} Z*, the sum projected onto the PSD cone first.
Vector assemble_l_star(const Matrix& W, const Matrix& V1, const Matrix& V2, const Vector& z,
                       double* clamped_mass = nullptr);

/// V1^{1/2} S^{-1/2} V1^{1/2} with S = V1^{1/2} Sigma V1^{1/2}, i.e.
/// V1 (Sigma V1)^{-1/2} with the principal root taken through the similarity.
Matrix w_hat_star(const Matrix& V1, const Matrix& sigma);

struct BootstrapComponents {
  Eigen::Index n = 0;
  Eigen::Index b = 0;
  Eigen::Index k = 0;
  double bandwidth = 0.0;
  int ar_order = -1;  // boundary variant
  Vector theta_hat;   // fit to the data
  Vector theta0;      // fit to f-hat
  Matrix V1_star;
  Matrix Sigma_plus;
  Matrix C_plus;
  Matrix V2_plus;
  Matrix W_star_mean;
  double W_star_max_condition = 0.0;
  Matrix Z_star;      // B x m
  Matrix theta_star;  // B x m
  double psd_clamped_mass = 0.0;
  double b3_over_n = 0.0;
  int discarded = 0;
};

struct BootstrapDistribution {
  Matrix samples;  // B x m draws of L*

  [[nodiscard]] double quantile(Eigen::Index coord, double p) const;
  /// Percentile interval for theta_coord: theta_hat - q_{1-a/2}/sqrt(n) ...
  [[nodiscard]] std::pair<double, double> percentile_ci(Eigen::Index coord, double level,
                                                        double estimate, Eigen::Index n) const;
};

/// Type-7 sample quantile.
double sample_quantile(std::vector<double> values, double p);

struct BootstrapResult {
  BootstrapComponents components;
  BootstrapDistribution distribution;
};

/// Data-side quantities shared by every command: centered series, f-hat,
/// the variant's estimate theta-hat and the centering parameter theta0.
struct VariantFit {
  VariantFit(TimeSeries centered, Periodogram pgram) : x(std::move(centered)), I(std::move(pgram)) {}

  TimeSeries x;
  Periodogram I;
  FamilyPtr family;  // debiased wrapper for that variant
  double bandwidth = 0.0;
  std::optional<SpectralDensityEstimate> fhat;
  Vector data_spec;  // ordinates the estimator consumes
  std::optional<Taper> taper;
  YuleWalkerFit yw;
  int ar_order = -1;
  ParamEstimate fit;
  ParamEstimate centre;
};

VariantFit fit_variant(const TimeSeries& series, const FamilyPtr& family,
                       const BootstrapConfig& config);

/// Full hybrid pipeline for any variant.
BootstrapResult run_hybrid_bootstrap(const TimeSeries& series, const FamilyPtr& family,
                                     const BootstrapConfig& config);
/// Same pipeline; requires a non-standard variant.
BootstrapResult run_variant_bootstrap(const TimeSeries& series, const FamilyPtr& family,
                                      const BootstrapConfig& config);

// ---------------------------------------------------------------- variants

/// Pseudo-series with spectral density f-hat:
/// X*_t = sqrt(2 pi / n) sum_s f-hat(lambda_s)^{1/2} Z*_s e^{i t lambda_s},
/// Z*_s = n^{-1/2} sum_t eps_t e^{-i t lambda_s}, eps iid N(0, 1).
struct PseudoSeries {
  TimeSeries series;
  ComplexVector z;  // Z*_s, s = 0..n-1 (index mod n)
};

PseudoSeries gaussian_pseudo_series(const SpectralDensityEstimate& fhat, Rng& rng);

Periodogram tapered_pseudo_periodogram(const TimeSeries& pseudo, const Taper& taper);

/// Exact Var*(M*_T) for the tapered periodogram of the Gaussian pseudo-series.
Matrix v1_star_tapered(const SpectralFamily& family, const Vector& theta0,
                       const SpectralDensityEstimate& fhat, const Taper& taper);

}  // namespace whittleboot
