#include "whittleboot/bootstrap.hpp"

#include <cmath>

namespace whittleboot {

namespace {

// f-hat at frequency index s mod n of its own grid.
double fhat_at_index(const SpectralDensityEstimate& fhat, Eigen::Index s) {
  const Eigen::Index n = fhat.grid().n();
  s %= n;
  if (s < 0) s += n;
  return fhat.grid_values()[std::min(s, n - s)];
}

}  // namespace

PseudoSeries gaussian_pseudo_series(const SpectralDensityEstimate& fhat, Rng& rng) {
  const Eigen::Index n = fhat.grid().n();
  std::normal_distribution<double> norm(0.0, 1.0);
  Vector eps(n);
  for (Eigen::Index t = 0; t < n; ++t) eps[t] = norm(rng);
  ComplexVector z = dft(std::span<const double>(eps.data(), static_cast<std::size_t>(n)));
  z /= std::sqrt(static_cast<double>(n));

  ComplexVector c(n);
  for (Eigen::Index s = 0; s < n; ++s) c[s] = std::sqrt(fhat_at_index(fhat, s)) * z[s];
  const ComplexVector raw = fft_backward(std::span<const Complex>(c.data(), static_cast<std::size_t>(n)));
  const double scale = std::sqrt(kTwoPi / static_cast<double>(n));
  Vector x(n);
  double resid = 0.0;
  double size = 0.0;
  for (Eigen::Index t = 1; t <= n; ++t) {
    const Complex v = raw[t % n] * scale;
    x[t - 1] = v.real();
    resid = std::max(resid, std::abs(v.imag()));
    size = std::max(size, std::abs(v.real()));
  }
  if (resid > 1e-10 * std::max(1.0, size)) {
    throw NumericFailure("pseudo-series has imaginary residue " + std::to_string(resid));
  }
  return {TimeSeries(std::move(x)), std::move(z)};
}

Periodogram tapered_pseudo_periodogram(const TimeSeries& pseudo, const Taper& taper) {
  return tapered_periodogram(pseudo, taper);
}

Matrix v1_star_tapered(const SpectralFamily& family, const Vector& theta0,
                       const SpectralDensityEstimate& fhat, const Taper& taper) {
  const FourierGrid& grid = fhat.grid();
  const Eigen::Index n = grid.n();
  const Eigen::Index N = grid.half();
  if (taper.weights.size() != n) throw InvalidInput("taper length does not match the series");
  const ComplexVector H = dft(std::span<const double>(taper.weights.data(), static_cast<std::size_t>(n)));
  auto h_at = [&](Eigen::Index d) {
    d %= n;
    if (d < 0) d += n;
    return H[d];
  };
  // The s = 0 term is the sample mean, which the periodogram removes.
  Eigen::MatrixXcd A(N, n - 1);
  Eigen::MatrixXcd Bm(N, n - 1);
  for (Eigen::Index s = 1; s < n; ++s) {
    const double r = std::sqrt(fhat_at_index(fhat, s));
    for (Eigen::Index j = 1; j <= N; ++j) {
      A(j - 1, s - 1) = h_at(j - s) * r;
      Bm(j - 1, s - 1) = h_at(-j - s) * r;
    }
  }
  const double c = kTwoPi / static_cast<double>(n);
  const Eigen::MatrixXcd C = c * (A * A.adjoint());
  const Eigen::MatrixXcd Cm = c * (A * Bm.adjoint());
  const double denom = kTwoPi * taper.h2;
  const Matrix gamma = (C.cwiseAbs2() + Cm.cwiseAbs2()) / (denom * denom);

  const Vector lam = grid.positive_frequencies();
  const Matrix g = score_matrix(family, theta0, std::span<const double>(lam.data(), static_cast<std::size_t>(lam.size())));
  const Matrix v = (16.0 * kPi * kPi / static_cast<double>(n)) * g * gamma * g.transpose();
  return symmetrize(v);
}

}  // namespace whittleboot
