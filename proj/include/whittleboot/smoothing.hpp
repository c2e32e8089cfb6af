#pragma once

#include "whittleboot/spectral.hpp"

#include <span>
#include <vector>

namespace whittleboot {

/// K(u / h) / h with K(x) = 3/(4 pi) (1 - (x/pi)^2) on |x| <= pi. Unit mass in u.
double bartlett_priestley_weight(double u, double h);

/// Kernel-smoothed periodogram. Stored on the full-sample grid j = 0..N and
/// evaluated elsewhere by periodic linear interpolation; even in lambda.
class SpectralDensityEstimate {
 public:
  SpectralDensityEstimate(FourierGrid grid, Vector values, double bandwidth);

  [[nodiscard]] const FourierGrid& grid() const { return grid_; }
  /// Half-width of the smoothing window in radians.
  [[nodiscard]] double bandwidth() const { return bandwidth_; }
  /// Values at lambda_j, j = 0..N.
  [[nodiscard]] const Vector& grid_values() const { return values_; }
  /// Values at lambda_j, j = 1..N (the layout objectives consume).
  [[nodiscard]] Vector positive_values() const { return values_.tail(grid_.half()); }

  [[nodiscard]] double operator()(double lambda) const;
  /// f-hat on the positive half of another Fourier grid (e.g. the length-b grid).
  [[nodiscard]] Vector on_grid(const FourierGrid& other) const;

 private:
  FourierGrid grid_;
  Vector values_;
  double bandwidth_;
};

inline constexpr double kSpectralFloor = 1e-6;

/// Smooths I with Bartlett-Priestley weights over the window |lambda_k| < h_bw.
/// The zero-frequency ordinate is excluded and weights renormalized; the result
/// is floored at kSpectralFloor * max.
SpectralDensityEstimate kernel_spectral_estimate(const Periodogram& I, double h_bw);

/// Whittle-form leave-(+-j)-out cross-validation score of one bandwidth.
double cv_score(const Periodogram& I, double h_bw);

/// Bandwidth minimizing cv_score over `grid`; ties go to the smaller bandwidth.
double cv_bandwidth(const Periodogram& I, std::span<const double> grid);

/// 15 geometric points between 4 pi / n and pi / 2.
std::vector<double> default_bandwidth_grid(Eigen::Index n);

/// Periodogram, CV bandwidth and f-hat in one go.
SpectralDensityEstimate estimate_spectral_density(const Periodogram& I);

/// Average of all sliding window periodograms on the length-b grid.
struct SubsampleMeanSpectrum {
  FourierGrid grid;
  Vector ordinates;  // j = 1..floor(b/2)
};

SubsampleMeanSpectrum subsample_mean_spectrum(const SubsamplePeriodograms& windows);
SubsampleMeanSpectrum subsample_mean_spectrum(const TimeSeries& series, Eigen::Index b);

}  // namespace whittleboot
