#include "whittleboot/yule_walker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace whittleboot {

YuleWalkerFit yule_walker_from_acov(const Vector& acov, int p) {
  if (p < 0) throw InvalidInput("AR order must be nonnegative");
  if (acov.size() < p + 1) throw InvalidInput("need autocovariances up to lag p");
  if (!(acov[0] > 0.0)) throw NumericFailure("Yule-Walker: gamma(0) must be positive");
  YuleWalkerFit fit;
  fit.p = p;
  fit.acov = acov.head(p + 1);
  Vector phi = Vector::Zero(p);
  Vector prev(p);
  double v = acov[0];
  for (int k = 1; k <= p; ++k) {
    double num = acov[k];
    for (int j = 1; j < k; ++j) num -= phi[j - 1] * acov[k - j];
    const double kappa = num / v;
    if (!(std::abs(kappa) < 1.0)) {
      throw NumericFailure("Yule-Walker: singular Toeplitz system at order " +
                           std::to_string(k));
    }
    prev.head(k - 1) = phi.head(k - 1);
    for (int j = 1; j < k; ++j) phi[j - 1] = prev[j - 1] - kappa * prev[k - j - 1];
    phi[k - 1] = kappa;
    v *= 1.0 - kappa * kappa;
  }
  if (!(v > 0.0)) throw NumericFailure("Yule-Walker: nonpositive innovation variance");
  fit.phi = phi;
  fit.sigma2 = v;
  return fit;
}

Vector sample_autocovariance(const TimeSeries& series, int max_lag) {
  const TimeSeries c = series.centered();
  const Eigen::Index n = c.size();
  if (max_lag < 0 || max_lag >= n) throw InvalidInput("lag out of range");
  const Vector& x = c.values();
  Vector g(max_lag + 1);
  for (int h = 0; h <= max_lag; ++h) {
    g[h] = x.head(n - h).dot(x.tail(n - h)) / static_cast<double>(n);
  }
  return g;
}

YuleWalkerFit yule_walker(const TimeSeries& series, int p) {
  if (p < 0 || 2 * p >= series.size()) {
    throw InvalidInput("AR order p=" + std::to_string(p) + " must satisfy 0 <= p < n/2");
  }
  return yule_walker_from_acov(sample_autocovariance(series, p), p);
}

int select_ar_order_aic(const TimeSeries& series, int p_max) {
  const Eigen::Index n = series.size();
  p_max = std::min<int>(p_max, static_cast<int>((n - 1) / 2));
  const Vector g = sample_autocovariance(series, p_max);
  int best_p = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int p = 0; p <= p_max; ++p) {
    double s2 = 0.0;
    try {
      s2 = yule_walker_from_acov(g, p).sigma2;
    } catch (const NumericFailure&) {
      break;
    }
    const double aic = static_cast<double>(n) * std::log(s2) + 2.0 * p;
    if (aic < best) {
      best = aic;
      best_p = p;
    }
  }
  return best_p;
}

int default_max_ar_order(Eigen::Index n) {
  return 10 * static_cast<int>(std::floor(std::log10(static_cast<double>(n))));
}

}  // namespace whittleboot
