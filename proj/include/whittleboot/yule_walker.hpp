#pragma once

#include "whittleboot/spectral.hpp"

namespace whittleboot {

struct YuleWalkerFit {
  int p = 0;
  Vector phi;           // phi_1..phi_p
  double sigma2 = 0.0;  // innovation variance
  Vector acov;          // gamma(0..p)
};

/// Levinson-Durbin on gamma(0..p). Throws NumericFailure if the Toeplitz
/// system is not positive definite.
YuleWalkerFit yule_walker_from_acov(const Vector& acov, int p);

/// Biased sample autocovariances (divisor n) of the centered series, lags 0..max_lag.
Vector sample_autocovariance(const TimeSeries& series, int max_lag);

/// Yule-Walker AR(p) fit; requires p < n/2.
YuleWalkerFit yule_walker(const TimeSeries& series, int p);

/// AIC order n log sigma2_p + 2p over p = 0..p_max.
int select_ar_order_aic(const TimeSeries& series, int p_max);

/// 10 * floor(log10 n).
int default_max_ar_order(Eigen::Index n);

}  // namespace whittleboot
