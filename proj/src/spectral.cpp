#include "whittleboot/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace whittleboot {

namespace {

Eigen::FFT<double>& fft_engine() {
  // Eigen::FFT caches twiddle plans and is not safe to share across threads.
  thread_local Eigen::FFT<double> engine;
  return engine;
}

void require_finite(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw InvalidInput("time series value at index " + std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace

TimeSeries::TimeSeries(Vector values) : TimeSeries(std::move(values), false) {}

TimeSeries::TimeSeries(Vector values, bool centered)
    : values_(std::move(values)), centered_(centered) {
  if (values_.size() < 4) {
    throw InvalidInput("time series needs at least 4 observations, got " +
                       std::to_string(values_.size()));
  }
  require_finite(values_);
}

TimeSeries TimeSeries::centered() const {
  if (centered_) return *this;
  Vector v = values_.array() - values_.mean();
  return TimeSeries(std::move(v), true);
}

FourierGrid::FourierGrid(Eigen::Index n) : n_(n) {
  if (n < 4) throw InvalidInput("Fourier grid needs n >= 4, got " + std::to_string(n));
}

Vector FourierGrid::positive_frequencies() const {
  Vector out(half());
  for (Eigen::Index j = 1; j <= half(); ++j) out[j - 1] = frequency(j);
  return out;
}

ComplexVector fft_forward(std::span<const double> values) {
  std::vector<double> in(values.begin(), values.end());
  std::vector<Complex> out;
  fft_engine().fwd(out, in);
  return Eigen::Map<ComplexVector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

ComplexVector fft_forward(std::span<const Complex> values) {
  std::vector<Complex> in(values.begin(), values.end());
  std::vector<Complex> out;
  fft_engine().fwd(out, in);
  return Eigen::Map<ComplexVector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

ComplexVector fft_backward(std::span<const Complex> values) {
  std::vector<Complex> in(values.begin(), values.end());
  std::vector<Complex> out;
  // Eigen's inverse divides by n; undo it to get the raw sum.
  fft_engine().inv(out, in);
  ComplexVector res = Eigen::Map<ComplexVector>(out.data(), static_cast<Eigen::Index>(out.size()));
  res *= static_cast<double>(values.size());
  return res;
}

ComplexVector dft(std::span<const double> values) {
  const auto n = static_cast<Eigen::Index>(values.size());
  ComplexVector raw = fft_forward(values);
  // Time index starts at 1: shift each coefficient by exp(-i lambda_k).
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lambda = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    raw[k] *= std::polar(1.0, -lambda);
  }
  return raw;
}

ComplexVector dft(const TimeSeries& series) {
  const Vector& v = series.values();
  return dft(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

Periodogram periodogram(const TimeSeries& series) {
  const TimeSeries c = series.centered();
  const FourierGrid grid(c.size());
  const ComplexVector j = dft(c);
  Vector ord(grid.half());
  const double scale = 1.0 / (kTwoPi * static_cast<double>(grid.n()));
  for (Eigen::Index k = 1; k <= grid.half(); ++k) ord[k - 1] = std::norm(j[k]) * scale;
  return {grid, std::move(ord)};
}

Taper taper_weights(const TaperSpec& spec, Eigen::Index n) {
  if (n < 1) throw InvalidInput("taper length must be positive");
  Taper t;
  t.weights = Vector::Ones(n);
  if (spec.kind == TaperSpec::Kind::tukey) {
    const double rho = spec.proportion;
    if (!(rho >= 0.0 && rho <= 1.0)) {
      throw InvalidInput("tukey taper proportion must lie in [0, 1]");
    }
    if (rho > 0.0) {
      for (Eigen::Index s = 1; s <= n; ++s) {
        const double x = static_cast<double>(s) / static_cast<double>(n);
        double h = 1.0;
        if (x < rho / 2.0) {
          h = 0.5 * (1.0 - std::cos(kTwoPi * x / rho));
        } else if (x > 1.0 - rho / 2.0) {
          h = 0.5 * (1.0 - std::cos(kTwoPi * (1.0 - x) / rho));
        }
        t.weights[s - 1] = std::clamp(h, 0.0, 1.0);
      }
    }
  }
  t.h1 = t.weights.sum();
  t.h2 = t.weights.squaredNorm();
  t.h4 = t.weights.array().pow(4).sum();
  if (!(t.h2 > 0.0)) throw InvalidInput("taper has zero energy");
  return t;
}

Periodogram tapered_periodogram(const TimeSeries& series, const Taper& taper) {
  if (taper.weights.size() != series.size()) {
    throw InvalidInput("taper length " + std::to_string(taper.weights.size()) +
                       " does not match series length " + std::to_string(series.size()));
  }
  const TimeSeries c = series.centered();
  const FourierGrid grid(c.size());
  const Vector tapered = c.values().cwiseProduct(taper.weights);
  const ComplexVector j =
      dft(std::span<const double>(tapered.data(), static_cast<std::size_t>(tapered.size())));
  Vector ord(grid.half());
  const double scale = 1.0 / (kTwoPi * taper.h2);
  for (Eigen::Index k = 1; k <= grid.half(); ++k) ord[k - 1] = std::norm(j[k]) * scale;
  return {grid, std::move(ord)};
}

SubsamplePeriodograms subsample_periodograms(const TimeSeries& series, Eigen::Index b,
                                             const std::optional<TaperSpec>& taper) {
  const Eigen::Index n = series.size();
  if (b < 4 || b > n) {
    throw InvalidInput("subsample length b=" + std::to_string(b) + " must lie in [4, " +
                       std::to_string(n) + "]");
  }
  const TimeSeries c = series.centered();
  const FourierGrid grid(b);
  const Eigen::Index windows = n - b + 1;
  const Eigen::Index half = grid.half();
  Vector h = Vector::Ones(b);
  double h2 = static_cast<double>(b);
  if (taper) {
    const Taper t = taper_weights(*taper, b);
    h = t.weights;
    h2 = t.h2;
  }
  const double scale = 1.0 / (kTwoPi * h2);
  Matrix ord(windows, half);
  std::vector<double> buf(static_cast<std::size_t>(b));
  for (Eigen::Index t = 0; t < windows; ++t) {
    for (Eigen::Index s = 0; s < b; ++s) buf[static_cast<std::size_t>(s)] = c.values()[t + s] * h[s];
    const ComplexVector raw = fft_forward(std::span<const double>(buf));
    for (Eigen::Index k = 1; k <= half; ++k) ord(t, k - 1) = std::norm(raw[k]) * scale;
  }
  return {grid, std::move(ord)};
}

TimeSeries read_series_csv(const std::string& path, int column) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open input file '" + path + "'");
  std::vector<double> vals;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::all_of(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); })) {
      continue;
    }
    std::replace(line.begin(), line.end(), ';', ',');
    int col = column;
    if (col < 0) col = line.find(',') == std::string::npos ? 0 : 1;
    std::stringstream ss(line);
    std::string field;
    for (int c = 0; c <= col; ++c) {
      if (!std::getline(ss, field, ',')) {
        throw InvalidInput(path + ":" + std::to_string(lineno) + ": missing column " +
                           std::to_string(col));
      }
    }
    const auto first = field.find_first_not_of(" \t");
    const auto last = field.find_last_not_of(" \t");
    field = first == std::string::npos ? std::string() : field.substr(first, last - first + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      if (vals.empty() && lineno == 1) continue;  // header
      throw InvalidInput(path + ":" + std::to_string(lineno) + ": non-numeric value '" + field +
                         "'");
    }
    vals.push_back(v);
  }
  if (vals.empty()) throw InvalidInput("input file '" + path + "' contains no values");
  return TimeSeries(Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size())));
}

}  // namespace whittleboot
