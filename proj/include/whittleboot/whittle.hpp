#pragma once

#include "whittleboot/family.hpp"
#include "whittleboot/smoothing.hpp"
#include "whittleboot/spectral.hpp"

#include <optional>
#include <string>

namespace whittleboot {

/// How the log f_theta part of the objective is computed.
/// discrete:   (1/n) sum_{G(n)} log f_theta(lambda_j), as displayed.
/// kolmogorov: |G(n)|/n times (1/2pi) int log f_theta, using the family's closed
///             form (for AR this makes the AR(1) minimizer equal ar1_closed_form).
enum class LogTerm { discrete, kolmogorov };

/// Objective, gradient and Hessian of D_n(theta, spec). spec holds values at
/// j = 1..N of `grid`; the -j half is its mirror.
struct WhittleTerms {
  double value = 0.0;
  Vector grad;
  Matrix hess;
};

WhittleTerms whittle_terms(const SpectralFamily& family, const Vector& theta,
                           const FourierGrid& grid, const Vector& spec, int order,
                           LogTerm log_term = LogTerm::discrete);

double whittle_objective(const SpectralFamily& family, const Vector& theta,
                         const FourierGrid& grid, const Vector& spec,
                         LogTerm log_term = LogTerm::discrete);
Vector whittle_score(const SpectralFamily& family, const Vector& theta, const FourierGrid& grid,
                     const Vector& spec, LogTerm log_term = LogTerm::discrete);
Matrix whittle_hessian(const SpectralFamily& family, const Vector& theta,
                       const FourierGrid& grid, const Vector& spec,
                       LogTerm log_term = LogTerm::discrete);

struct ParamEstimate {
  Vector theta;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
  double score_norm = 0.0;
  std::string method;  // "newton" or "nelder-mead"
};

struct MinimizeOptions {
  LogTerm log_term = LogTerm::discrete;
  /// Also try the moment-implied start and the box center; keep the best.
  bool multi_start = true;
  int max_iterations = 200;
  /// Converged when |score| <= gtol (1 + |theta|).
  double gtol = 1e-9;
};

ParamEstimate minimize_whittle(const SpectralFamily& family, const FourierGrid& grid,
                               const Vector& spec, const Vector& theta_init,
                               const MinimizeOptions& options = {});
/// Starts from the moment-implied guess (or the box center).
ParamEstimate minimize_whittle(const SpectralFamily& family, const FourierGrid& grid,
                               const Vector& spec, const MinimizeOptions& options = {});
ParamEstimate minimize_whittle(const SpectralFamily& family, const Periodogram& I,
                               const MinimizeOptions& options = {});

/// sum I cos(lambda) / sum I over G(n).
double ar1_closed_form(const Periodogram& I);

/// theta-hat_0 = argmin D_n(theta, f-hat) on the full-sample grid.
ParamEstimate pseudo_true_parameter(const SpectralFamily& family,
                                    const SpectralDensityEstimate& fhat,
                                    const MinimizeOptions& options = {});

double fejer_kernel(Eigen::Index n, double x);

/// f-bar_theta(lambda_j), j = 1..N.
Vector debiased_expected_spectrum(const SpectralFamily& family, const Vector& theta,
                                  const FourierGrid& grid);
double debiased_objective(const SpectralFamily& family, const Vector& theta,
                          const FourierGrid& grid, const Vector& spec);

/// Non-owning handle for APIs that keep a FamilyPtr.
FamilyPtr borrow(const SpectralFamily& family);

}  // namespace whittleboot
