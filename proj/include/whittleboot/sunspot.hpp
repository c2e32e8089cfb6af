#pragma once

#include "whittleboot/bootstrap.hpp"

#include <optional>
#include <vector>

namespace whittleboot {

/// 500 equidistant midpoints (g - 1/2) pi / 500 of (0, pi).
Vector peak_search_grid(int count = 500);

struct SpectralPeak {
  double lambda = 0.0;
  Eigen::Index index = 0;
  bool interior = true;  // false when the maximum sits at a grid end
};

/// Argmax of the AR density shape |phi(lambda)|^{-2} over `grid`. Only the AR
/// coefficients matter, so replicate draws with sigma^2 <= 0 still have a peak.
SpectralPeak ar_spectral_peak(const Vector& ar_coefficients, const Vector& grid);

/// Largest raw-periodogram ordinate.
SpectralPeak periodogram_peak(const Periodogram& I);

struct SunspotAnalysis {
  Eigen::Index n = 0;
  int order = 0;
  Vector theta;
  double lambda_max = 0.0;
  double period = 0.0;
  double periodogram_lambda = 0.0;
  double periodogram_period = 0.0;
  Eigen::Index B = 0;
  Eigen::Index b = 0;
  std::uint64_t seed = 0;
  std::vector<double> replicate_lambdas;
  std::vector<double> replicate_periods;
  int monotone_replicates = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int grid_points = 500;
};

SunspotAnalysis analyze_sunspots(const TimeSeries& series, int order, Eigen::Index B,
                                 std::uint64_t seed, std::optional<Eigen::Index> b = std::nullopt);

}  // namespace whittleboot
