#pragma once

#include "whittleboot/rng.hpp"
#include "whittleboot/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace wbtest {

using whittleboot::Rng;
using whittleboot::TimeSeries;
using whittleboot::Vector;

inline Rng rng(std::uint64_t index, std::uint64_t seed = 977) {
  return whittleboot::stream_rng(seed, whittleboot::Stream::test, index);
}

inline Vector white(Eigen::Index n, Rng& r, double sd = 1.0) {
  std::normal_distribution<double> z(0.0, sd);
  Vector x(n);
  for (auto& v : x) v = z(r);
  return x;
}

/// AR(p) path with N(0, sigma2) innovations after a 500-step burn-in.
inline TimeSeries ar_series(const std::vector<double>& a, Eigen::Index n, Rng& r, double sigma2 = 1.0) {
  std::normal_distribution<double> z(0.0, std::sqrt(sigma2));
  const int p = static_cast<int>(a.size());
  std::vector<double> x(static_cast<std::size_t>(n + 500 + p), 0.0);
  for (std::size_t t = static_cast<std::size_t>(p); t < x.size(); ++t) {
    double v = z(r);
    for (int k = 0; k < p; ++k) v += a[static_cast<std::size_t>(k)] * x[t - 1 - static_cast<std::size_t>(k)];
    x[t] = v;
  }
  Vector out(n);
  for (Eigen::Index t = 0; t < n; ++t) out[t] = x[x.size() - static_cast<std::size_t>(n) + static_cast<std::size_t>(t)];
  return TimeSeries(out);
}

/// AR(1) density sigma2 / (2 pi) / (1 + a^2 - 2 a cos lambda).
inline double ar1_density(double sigma2, double a, double lambda) {
  return sigma2 / (2.0 * M_PI) / (1.0 + a * a - 2.0 * a * std::cos(lambda));
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline double rel_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
  return (a - ref).norm() / ref.norm();
}

}  // namespace wbtest
