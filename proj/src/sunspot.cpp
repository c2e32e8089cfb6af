#include "whittleboot/sunspot.hpp"

#include <cmath>

namespace whittleboot {

Vector peak_search_grid(int count) {
  if (count < 2) throw InvalidInput("peak grid needs at least 2 points");
  Vector g(count);
  for (int i = 0; i < count; ++i) g[i] = (i + 0.5) * kPi / count;
  return g;
}

SpectralPeak ar_spectral_peak(const Vector& a, const Vector& grid) {
  SpectralPeak best;
  double top = -1.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double lam = grid[i];
    double c = 1.0;
    double s = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      c -= a[k] * std::cos((k + 1) * lam);
      s += a[k] * std::sin((k + 1) * lam);
    }
    const double v = 1.0 / (c * c + s * s);
    if (v > top) {
      top = v;
      best.lambda = lam;
      best.index = i;
    }
  }
  best.interior = best.index > 0 && best.index + 1 < grid.size();
  return best;
}

SpectralPeak periodogram_peak(const Periodogram& I) {
  Eigen::Index j = 0;
  I.ordinates.maxCoeff(&j);
  SpectralPeak p;
  p.index = j + 1;
  p.lambda = I.grid.frequency(j + 1);
  p.interior = j + 1 < I.grid.half();
  return p;
}

SunspotAnalysis analyze_sunspots(const TimeSeries& series, int order, Eigen::Index B,
                                 std::uint64_t seed, std::optional<Eigen::Index> b) {
  const Eigen::Index n = series.size();
  if (order < 1 || 2 * order >= n) {
    throw InvalidInput("AR order p=" + std::to_string(order) + " must satisfy 1 <= p < n/2");
  }
  const TimeSeries x = series.centered();
  const auto family = std::make_shared<ARFamily>(order);
  const Vector grid = peak_search_grid();

  SunspotAnalysis out;
  out.n = n;
  out.order = order;
  out.B = B;
  out.seed = seed;
  out.grid_points = static_cast<int>(grid.size());

  const Periodogram I = periodogram(x);
  const SpectralPeak pp = periodogram_peak(I);
  out.periodogram_lambda = pp.lambda;
  out.periodogram_period = kTwoPi / pp.lambda;

  BootstrapConfig cfg;
  cfg.B = B;
  cfg.b = b;
  cfg.seed = seed;
  const BootstrapResult br = run_hybrid_bootstrap(x, family, cfg);
  out.b = br.components.b;
  out.theta = br.components.theta_hat;

  const SpectralPeak peak = ar_spectral_peak(out.theta.tail(order), grid);
  out.lambda_max = peak.lambda;
  out.period = kTwoPi / peak.lambda;

  const double rn = std::sqrt(static_cast<double>(n));
  const Matrix& L = br.distribution.samples;
  for (Eigen::Index r = 0; r < L.rows(); ++r) {
    const Vector th = br.components.theta0 + L.row(r).transpose() / rn;
    const SpectralPeak rp = ar_spectral_peak(th.tail(order), grid);
    if (!rp.interior) ++out.monotone_replicates;
    out.replicate_lambdas.push_back(rp.lambda);
    out.replicate_periods.push_back(kTwoPi / rp.lambda);
  }
  out.ci_low = sample_quantile(out.replicate_periods, 0.025);
  out.ci_high = sample_quantile(out.replicate_periods, 0.975);
  return out;
}

}  // namespace whittleboot
