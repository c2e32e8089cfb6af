#include "whittleboot/simulation.hpp"

#include "whittleboot/bootstrap.hpp"
#include "whittleboot/oracle.hpp"
#include "whittleboot/parallel.hpp"
#include "whittleboot/whittle.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <tuple>

namespace whittleboot {

SimulationModel SimulationModel::parse(const std::string& name) {
  std::string s;
  for (char c : name) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (s.rfind("MODEL", 0) == 0) s = s.substr(5);
  if (s == "I" || s == "1") return model(Tag::I);
  if (s == "II" || s == "2") return model(Tag::II);
  if (s == "III" || s == "3") return model(Tag::III);
  throw InvalidInput("unknown simulation model '" + name + "'");
}

std::string SimulationModel::name() const {
  switch (tag) {
    case Tag::I: return "I";
    case Tag::II: return "II";
    case Tag::III: return "III";
  }
  return "?";
}

double laplace_sample(double scale, Rng& rng) {
  if (!(scale > 0.0)) throw InvalidInput("Laplace scale must be positive");
  std::exponential_distribution<double> e(1.0);
  return scale * (e(rng) - e(rng));
}

namespace {

// Advances the recursion one step. e_prev is the previous innovation.
struct Stepper {
  const SimulationModel& model;
  double x = 0.0;
  double e_prev = 0.0;

  double innovation(Rng& rng) const {
    if (model.tag == SimulationModel::Tag::I) {
      std::normal_distribution<double> nd(0.0, 1.0);
      return nd(rng);
    }
    return laplace_sample(model.laplace_scale, rng);
  }

  double next(Rng& rng) {
    const double e = innovation(rng);
    switch (model.tag) {
      case SimulationModel::Tag::I: x = 0.8 * x + e; break;
      case SimulationModel::Tag::II: x = 0.75 * x + 0.6 * x * e_prev + e; break;
      case SimulationModel::Tag::III: x = (x <= 0.0 ? -0.3 : 0.8) * x + e; break;
    }
    e_prev = e;
    return x;
  }
};

}  // namespace

TimeSeries generate(const SimulationModel& model, Eigen::Index n, Rng& rng) {
  if (n < 50) throw InvalidInput("generate needs n >= 50");
  if (model.burn_in < 500) throw InvalidInput("burn-in must be at least 500");
  Stepper st{model};
  for (int t = 0; t < model.burn_in; ++t) st.next(rng);
  Vector x(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    x[t] = st.next(rng);
    if (!std::isfinite(x[t])) throw NumericFailure("simulated path overflowed");
  }
  return TimeSeries(std::move(x));
}

double a0_oracle(const SimulationModel& model, Eigen::Index length, std::uint64_t seed) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, Eigen::Index, std::uint64_t>, double> cache;
  const auto key = std::make_tuple(static_cast<int>(model.tag), model.burn_in, length, seed);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  if (length < 1000) throw InvalidInput("oracle path too short");
  Rng rng = stream_rng(seed, Stream::oracle, static_cast<std::uint64_t>(model.tag));
  Stepper st{model};
  for (int t = 0; t < model.burn_in; ++t) st.next(rng);
  // Two passes would need the path in memory; accumulate raw moments instead.
  long double s = 0, s2 = 0, s01 = 0, first = 0, last = 0;
  double prev = st.next(rng);
  first = prev;
  s = prev;
  s2 = static_cast<long double>(prev) * prev;
  for (Eigen::Index t = 1; t < length; ++t) {
    const double cur = st.next(rng);
    s += cur;
    s2 += static_cast<long double>(cur) * cur;
    s01 += static_cast<long double>(prev) * cur;
    prev = cur;
  }
  last = prev;
  const long double n = static_cast<long double>(length);
  const long double mean = s / n;
  const long double c0 = s2 / n - mean * mean;
  // sum (x_t - m)(x_{t+1} - m) = s01 - m (2 s - first - last) + (n - 1) m^2
  const long double c1 = (s01 - mean * (2 * s - first - last) + (n - 1) * mean * mean) / n;
  const double a0 = static_cast<double>(c1 / c0);
  std::lock_guard<std::mutex> lock(mu);
  cache[key] = a0;
  return a0;
}

std::vector<double> exact_distribution(const SimulationModel& model, Eigen::Index n, Eigen::Index R,
                                       double a0, std::uint64_t seed) {
  if (R < 1) throw InvalidInput("R must be positive");
  std::vector<double> out(static_cast<std::size_t>(R));
  const double rn = std::sqrt(static_cast<double>(n));
  parallel_for(out.size(), [&](std::size_t r) {
    Rng rng = stream_rng(seed, Stream::exact, r);
    const TimeSeries x = generate(model, n, rng);
    out[r] = rn * (ar1_closed_form(periodogram(x)) - a0);
  });
  return out;
}

double d1_distance(std::span<const double> f, std::span<const double> g) {
  if (f.empty() || g.empty()) throw InvalidInput("d1 needs two nonempty samples");
  std::vector<double> a(f.begin(), f.end());
  std::vector<double> b(g.begin(), g.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() == b.size()) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(a.size());
  }
  // Left-continuous inverse F^{-1}(u) = x_(ceil(u m)) on a midpoint u-grid.
  constexpr int K = 10000;
  auto inv = [](const std::vector<double>& v, double u) {
    const auto m = static_cast<double>(v.size());
    auto k = static_cast<std::size_t>(std::ceil(u * m));
    k = std::clamp<std::size_t>(k, 1, v.size());
    return v[k - 1];
  };
  double s = 0.0;
  for (int i = 1; i <= K; ++i) {
    const double u = (i - 0.5) / K;
    s += std::abs(inv(a, u) - inv(b, u));
  }
  return s / K;
}

// ---------------------------------------------------------------- experiment

void ExperimentConfig::apply_full_scale() {
  R = 10000;
  reps = 500;
  B = 1000;
}

void ExperimentConfig::validate() const {
  if (models.empty()) throw InvalidInput("experiment: no models");
  for (const auto& m : models) (void)SimulationModel::parse(m);
  if (n_values.empty()) throw InvalidInput("experiment: no sample sizes");
  for (auto n : n_values) {
    if (n < 50) throw InvalidInput("experiment: n must be at least 50");
  }
  for (auto b : b_values) {
    for (auto n : n_values) {
      if (b < 4 || b > n) throw InvalidInput("experiment: b=" + std::to_string(b) + " out of range for n=" + std::to_string(n));
    }
  }
  if (B < 100) throw InvalidInput("experiment: B must be at least 100");
  if (R < 500) throw InvalidInput("experiment: R must be at least 500");
  if (reps < 2) throw InvalidInput("experiment: need at least 2 repetitions");
}

double ExperimentConfig::estimated_fits() const {
  const double nb = b_values.empty() ? 1.0 : static_cast<double>(b_values.size());
  return static_cast<double>(models.size() * n_values.size()) * nb * static_cast<double>(reps) *
         static_cast<double>(B + 2);
}

const ExperimentCell* ExperimentResult::find(const std::string& model, Eigen::Index n,
                                             const std::string& method) const {
  for (const auto& c : cells) {
    if (c.model == model && c.n == n && c.method == method) return &c;
  }
  return nullptr;
}

namespace {

ExperimentCell make_cell(std::string model, Eigen::Index n, Eigen::Index b, std::string method) {
  ExperimentCell c;
  c.model = std::move(model);
  c.n = n;
  c.b = b;
  c.method = std::move(method);
  return c;
}

void summarize(ExperimentCell& cell) {
  const double k = static_cast<double>(cell.d1.size());
  cell.reps = static_cast<Eigen::Index>(cell.d1.size());
  cell.mean_d1 = std::accumulate(cell.d1.begin(), cell.d1.end(), 0.0) / k;
  double ss = 0.0;
  for (double v : cell.d1) ss += (v - cell.mean_d1) * (v - cell.mean_d1);
  cell.se_d1 = k > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
}

// Normal quantiles at (i - 0.5) / R, via Newton on erfc.
std::vector<double> normal_scores(Eigen::Index R, double sd) {
  std::vector<double> out(static_cast<std::size_t>(R));
  for (Eigen::Index i = 0; i < R; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(R);
    double z = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
      const double pdf = std::exp(-0.5 * z * z) / std::sqrt(kTwoPi);
      const double step = (cdf - p) / pdf;
      z -= std::clamp(step, -1.0, 1.0);
      if (std::abs(step) < 1e-14) break;
    }
    out[static_cast<std::size_t>(i)] = sd * z;
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  const auto family = std::make_shared<ARFamily>(1);
  for (const std::string& mname : config.models) {
    const SimulationModel model = SimulationModel::parse(mname);
    const double a0 = a0_oracle(model, config.a0_length);
    result.a0.emplace_back(model.name(), a0);
    for (Eigen::Index n : config.n_values) {
      const std::uint64_t cell_seed = splitmix64(config.seed ^ (static_cast<std::uint64_t>(model.tag) << 32) ^ static_cast<std::uint64_t>(n));
      const std::vector<double> exact = exact_distribution(model, n, config.R, a0, cell_seed);

      std::vector<Eigen::Index> bs = config.b_values;
      if (bs.empty()) bs.push_back(default_block_length(n));
      for (Eigen::Index b : bs) {
        ExperimentCell hyb = make_cell(model.name(), n, b, "hybrid");
        ExperimentCell mult = make_cell(model.name(), n, b, "multiplicative");
        for (Eigen::Index rep = 0; rep < config.reps; ++rep) {
          Rng rng = stream_rng(cell_seed, Stream::data, static_cast<std::uint64_t>(rep));
          const TimeSeries x = generate(model, n, rng);
          BootstrapConfig bc;
          bc.B = config.B;
          bc.b = b;
          bc.seed = splitmix64(cell_seed + static_cast<std::uint64_t>(rep) * 0x9e37ULL + static_cast<std::uint64_t>(b));
          bc.log_term = LogTerm::kolmogorov;
          const BootstrapResult br = run_hybrid_bootstrap(x, family, bc);
          const Vector l = br.distribution.samples.col(1);
          const double rn = std::sqrt(static_cast<double>(n));
          const Vector mb = (rn * (br.components.theta_star.col(1).array() - br.components.theta0[1])).matrix();
          hyb.d1.push_back(d1_distance(exact, std::span<const double>(l.data(), static_cast<std::size_t>(l.size()))));
          mult.d1.push_back(d1_distance(exact, std::span<const double>(mb.data(), static_cast<std::size_t>(mb.size()))));
        }
        summarize(hyb);
        summarize(mult);
        result.cells.push_back(std::move(hyb));
        result.cells.push_back(std::move(mult));
      }

      if (model.tag == SimulationModel::Tag::I) {
        // Oracle N(0, W^{-1} V1 W^{-1}) at the true AR(1) parameter; V2 = 0.
        Vector theta(2);
        theta << 1.0, 0.8;
        const OracleMatrices om = oracle_matrices(*family, theta, family_density(family, theta));
        const Matrix cov = asymptotic_covariance(om.W, om.V1, Matrix::Zero(2, 2));
        const std::vector<double> gauss = normal_scores(config.R, std::sqrt(cov(1, 1)));
        ExperimentCell g = make_cell(model.name(), n, 0, "gaussian-asymptotic");
        const double d = d1_distance(exact, gauss);
        g.d1.assign(static_cast<std::size_t>(config.reps), d);
        summarize(g);
        result.cells.push_back(std::move(g));
      }
    }
  }
  return result;
}

void write_experiment_csv(const ExperimentResult& result, std::ostream& out) {
  out << "model,n,b,method,mean_d1,se_d1,reps\n";
  out.precision(10);
  for (const auto& c : result.cells) {
    out << c.model << ',' << c.n << ',' << c.b << ',' << c.method << ',' << c.mean_d1 << ','
        << c.se_d1 << ',' << c.reps << '\n';
  }
}

double pooled_se(const ExperimentCell& a, const ExperimentCell& b) {
  return std::sqrt(a.se_d1 * a.se_d1 + b.se_d1 * b.se_d1);
}

}  // namespace whittleboot
