#pragma once

#include "whittleboot/types.hpp"

#include <optional>
#include <span>
#include <string>

namespace whittleboot {

/// Observed sample X_1..X_n, n >= 4, all finite.
class TimeSeries {
 public:
  explicit TimeSeries(Vector values);

  [[nodiscard]] Eigen::Index size() const { return values_.size(); }
  [[nodiscard]] const Vector& values() const { return values_; }
  [[nodiscard]] bool is_centered() const { return centered_; }

  /// Copy with the sample mean removed. Idempotent.
  [[nodiscard]] TimeSeries centered() const;

 private:
  TimeSeries(Vector values, bool centered);

  Vector values_;
  bool centered_ = false;
};

/// Fourier frequencies 2*pi*j/n. N = floor(n/2); the positive half j = 1..N is
/// what every ordinate container stores, the negative half being its mirror.
class FourierGrid {
 public:
  explicit FourierGrid(Eigen::Index n);

  [[nodiscard]] Eigen::Index n() const { return n_; }
  [[nodiscard]] Eigen::Index half() const { return n_ / 2; }
  /// Lowest index of F_n = {-floor((n-1)/2), ..., floor(n/2)}.
  [[nodiscard]] Eigen::Index lowest_index() const { return -((n_ - 1) / 2); }
  [[nodiscard]] double frequency(Eigen::Index j) const {
    return kTwoPi * static_cast<double>(j) / static_cast<double>(n_);
  }
  /// lambda_j for j = 1..N.
  [[nodiscard]] Vector positive_frequencies() const;
  /// |G(n)| = 2N.
  [[nodiscard]] Eigen::Index symmetric_count() const { return 2 * half(); }

 private:
  Eigen::Index n_;
};

inline FourierGrid fourier_grid(Eigen::Index n) { return FourierGrid(n); }

/// Ordinates at lambda_j, j = 1..N; I(-lambda_j) = I(lambda_j) is implied.
struct Periodogram {
  FourierGrid grid;
  Vector ordinates;
};

/// Finite Fourier transform J(lambda_k) = sum_{t=1}^n x_t exp(-i lambda_k t);
/// entry k holds the frequency with index k mod n.
ComplexVector dft(std::span<const double> values);
ComplexVector dft(const TimeSeries& series);

/// Plain forward FFT sum_{t=0}^{n-1} x_t exp(-2 pi i k t / n).
ComplexVector fft_forward(std::span<const double> values);
ComplexVector fft_forward(std::span<const Complex> values);
/// sum_{k=0}^{n-1} c_k exp(+2 pi i k t / n), unnormalized.
ComplexVector fft_backward(std::span<const Complex> values);

/// |J|^2 / (2 pi n) on j = 1..N, after removing the sample mean.
Periodogram periodogram(const TimeSeries& series);

struct TaperSpec {
  enum class Kind { rectangular, tukey };
  Kind kind = Kind::rectangular;
  double proportion = 0.0;  // tukey only, in [0, 1]

  static TaperSpec rectangular() { return {}; }
  static TaperSpec tukey(double rho) { return {Kind::tukey, rho}; }
};

/// Weights h(t/n), t = 1..n, and their power sums.
struct Taper {
  Vector weights;
  double h1 = 0.0;
  double h2 = 0.0;
  double h4 = 0.0;
};

Taper taper_weights(const TaperSpec& spec, Eigen::Index n);

/// |sum h_t X_t exp(-i lambda t)|^2 / (2 pi H_2) on j = 1..N, sample mean removed.
Periodogram tapered_periodogram(const TimeSeries& series, const Taper& taper);

/// Periodograms of every length-b window (X_t, ..., X_{t+b-1}), t = 1..n-b+1,
/// on the length-b grid. Windows share the full-sample mean.
struct SubsamplePeriodograms {
  FourierGrid grid;  // length-b grid
  Matrix ordinates;  // (n-b+1) x floor(b/2)
};

SubsamplePeriodograms subsample_periodograms(const TimeSeries& series, Eigen::Index b,
                                             const std::optional<TaperSpec>& taper = std::nullopt);

/// One real per line, optional header line. `column` selects a field when lines
/// carry comma/semicolon separated values; -1 takes the only field, else the second
/// (the year;value layout of yearly sunspot files).
TimeSeries read_series_csv(const std::string& path, int column = 0);

}  // namespace whittleboot
