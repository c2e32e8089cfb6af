#include "whittleboot/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace whittleboot {

namespace {

// Index of lambda_{j+d} folded onto 0..N (ordinates are even and n-periodic).
Eigen::Index fold(Eigen::Index k, Eigen::Index n) {
  k %= n;
  if (k < 0) k += n;
  return std::min(k, n - k);
}

void check_bandwidth(double h, Eigen::Index n) {
  const double lo = kTwoPi / static_cast<double>(n);
  if (!(h >= lo * (1.0 - 1e-12) && h <= kPi * (1.0 + 1e-12))) {
    throw InvalidInput("bandwidth " + std::to_string(h) + " outside [2pi/n, pi] = [" +
                       std::to_string(lo) + ", " + std::to_string(kPi) + "]");
  }
}

// Unnormalized kernel weights for offsets d = 0..D (symmetric in d).
Vector window_weights(Eigen::Index n, double h) {
  const double step = kTwoPi / static_cast<double>(n);
  const auto reach = static_cast<Eigen::Index>(std::floor(h / step));
  Vector w(reach + 1);
  for (Eigen::Index d = 0; d <= reach; ++d) w[d] = bartlett_priestley_weight(step * static_cast<double>(d), h / kPi);
  return w;
}

// ordinates: values at j = 0..N with index 0 ignored. leave_out skips the
// folded index equal to the target.
double smooth_at(const Vector& full, const Vector& w, Eigen::Index n, Eigen::Index j,
                 bool leave_out, double* mass = nullptr) {
  double num = 0.0;
  double den = 0.0;
  const auto reach = w.size() - 1;
  for (Eigen::Index d = -reach; d <= reach; ++d) {
    const double wd = w[std::abs(d)];
    if (wd <= 0.0) continue;
    const Eigen::Index k = fold(j + d, n);
    if (k == 0) continue;
    if (leave_out && k == fold(j, n)) continue;
    num += wd * full[k];
    den += wd;
  }
  if (mass) *mass = den;
  return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

Vector with_zero(const Periodogram& I) {
  Vector full(I.grid.half() + 1);
  full[0] = 0.0;
  full.tail(I.grid.half()) = I.ordinates;
  return full;
}

}  // namespace

double bartlett_priestley_weight(double u, double h) {
  if (!(h > 0.0)) throw InvalidInput("bandwidth must be positive");
  const double x = u / h;
  if (std::abs(x) >= kPi) return 0.0;
  return 3.0 / (4.0 * kPi) * (1.0 - (x / kPi) * (x / kPi)) / h;
}

SpectralDensityEstimate::SpectralDensityEstimate(FourierGrid grid, Vector values, double bandwidth)
    : grid_(grid), values_(std::move(values)), bandwidth_(bandwidth) {
  if (values_.size() != grid_.half() + 1) {
    throw InvalidInput("spectral estimate needs values at j = 0..N");
  }
}

double SpectralDensityEstimate::operator()(double lambda) const {
  const double n = static_cast<double>(grid_.n());
  double pos = std::fmod(std::abs(lambda), kTwoPi) / kTwoPi * n;  // in [0, n)
  const auto lo = static_cast<Eigen::Index>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  const double a = values_[fold(lo, grid_.n())];
  const double b = values_[fold(lo + 1, grid_.n())];
  return a + frac * (b - a);
}

Vector SpectralDensityEstimate::on_grid(const FourierGrid& other) const {
  Vector out(other.half());
  for (Eigen::Index j = 1; j <= other.half(); ++j) out[j - 1] = (*this)(other.frequency(j));
  return out;
}

SpectralDensityEstimate kernel_spectral_estimate(const Periodogram& I, double h_bw) {
  const Eigen::Index n = I.grid.n();
  check_bandwidth(h_bw, n);
  const Vector full = with_zero(I);
  const Vector w = window_weights(n, h_bw);
  const Eigen::Index half = I.grid.half();
  Vector est(half + 1);
  for (Eigen::Index j = 1; j <= half; ++j) est[j] = smooth_at(full, w, n, j, false);
  double mass = 0.0;
  const double at_zero = smooth_at(full, w, n, 0, false, &mass);
  est[0] = mass > 0.0 ? at_zero : est[1];
  const double floor = kSpectralFloor * est.maxCoeff();
  for (Eigen::Index j = 0; j <= half; ++j) {
    if (!(est[j] >= floor)) est[j] = floor;
  }
  if (!(est.maxCoeff() > 0.0)) {
    throw DegenerateInput("periodogram is identically zero; no spectral estimate");
  }
  return {I.grid, std::move(est), h_bw};
}

double cv_score(const Periodogram& I, double h_bw) {
  const Eigen::Index n = I.grid.n();
  check_bandwidth(h_bw, n);
  const Vector full = with_zero(I);
  const Vector w = window_weights(n, h_bw);
  double score = 0.0;
  for (Eigen::Index j = 1; j <= I.grid.half(); ++j) {
    const double f = smooth_at(full, w, n, j, true);
    if (!(f > 0.0)) return std::numeric_limits<double>::infinity();
    score += std::log(f) + full[j] / f;
  }
  return score;
}

double cv_bandwidth(const Periodogram& I, std::span<const double> grid) {
  if (grid.empty()) throw InvalidInput("bandwidth grid is empty");
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() == 1) {
    check_bandwidth(sorted.front(), I.grid.n());
    return sorted.front();
  }
  double best_h = sorted.front();
  double best = std::numeric_limits<double>::infinity();
  for (double h : sorted) {
    const double s = cv_score(I, h);
    if (s < best) {
      best = s;
      best_h = h;
    }
  }
  return best_h;
}

std::vector<double> default_bandwidth_grid(Eigen::Index n) {
  const double lo = 2.0 * kTwoPi / static_cast<double>(n);
  const double hi = kPi / 2.0;
  std::vector<double> g(15);
  if (lo >= hi) {
    std::fill(g.begin(), g.end(), std::min(kPi, std::max(lo, kTwoPi / static_cast<double>(n))));
    return g;
  }
  const double ratio = std::log(hi / lo) / 14.0;
  for (int i = 0; i < 15; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i);
  g.back() = hi;
  return g;
}

SpectralDensityEstimate estimate_spectral_density(const Periodogram& I) {
  const auto grid = default_bandwidth_grid(I.grid.n());
  return kernel_spectral_estimate(I, cv_bandwidth(I, grid));
}

SubsampleMeanSpectrum subsample_mean_spectrum(const SubsamplePeriodograms& windows) {
  return {windows.grid, windows.ordinates.colwise().mean().transpose()};
}

SubsampleMeanSpectrum subsample_mean_spectrum(const TimeSeries& series, Eigen::Index b) {
  return subsample_mean_spectrum(subsample_periodograms(series, b));
}

}  // namespace whittleboot
