#pragma once

#include "whittleboot/rng.hpp"
#include "whittleboot/spectral.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace whittleboot {

/// I:   X_t = 0.8 X_{t-1} + e_t, e ~ N(0, 1)
/// II:  X_t = 0.75 X_{t-1} + 0.6 X_{t-1} e_{t-1} + e_t, e ~ Laplace(0, 0.1)
/// III: X_t = -0.3 X_{t-1} + e_t if X_{t-1} <= 0, else 0.8 X_{t-1} + e_t, e ~ Laplace(0, 0.1)
struct SimulationModel {
  enum class Tag { I, II, III };
  Tag tag = Tag::I;
  double laplace_scale = 0.1;
  int burn_in = 1000;

  static SimulationModel model(Tag t) { return {t, 0.1, 1000}; }
  /// "I", "II", "III" (optionally prefixed "Model").
  static SimulationModel parse(const std::string& name);
  [[nodiscard]] std::string name() const;
};

/// Density (2 scale)^{-1} exp(-|x| / scale).
double laplace_sample(double scale, Rng& rng);

TimeSeries generate(const SimulationModel& model, Eigen::Index n, Rng& rng);

/// Lag-1 autocorrelation of one long path (default length 1e7). Cached per
/// (model, length, seed) for the life of the process.
double a0_oracle(const SimulationModel& model, Eigen::Index length = 10'000'000,
                 std::uint64_t seed = 0x5eed0a0ULL);

/// R draws of sqrt(n) (a-hat_n - a0), a-hat_n the AR(1) closed form.
std::vector<double> exact_distribution(const SimulationModel& model, Eigen::Index n, Eigen::Index R,
                                       double a0, std::uint64_t seed);

/// Wasserstein-1 between two empirical distributions.
double d1_distance(std::span<const double> f, std::span<const double> g);

struct ExperimentConfig {
  std::vector<std::string> models{"I", "II", "III"};
  std::vector<Eigen::Index> n_values{50, 1000};
  std::vector<Eigen::Index> b_values;  // empty: round(4 n^{1/4}) per n
  Eigen::Index B = 400;
  Eigen::Index R = 2000;
  Eigen::Index reps = 100;
  std::uint64_t seed = 20240101;
  Eigen::Index a0_length = 10'000'000;

  /// R = 10000, 500 repetitions, B = 1000.
  void apply_full_scale();
  void validate() const;
  /// Whittle fits the run will perform.
  [[nodiscard]] double estimated_fits() const;
};

struct ExperimentCell {
  std::string model;
  Eigen::Index n = 0;
  Eigen::Index b = 0;
  std::string method;  // hybrid | multiplicative | gaussian-asymptotic
  double mean_d1 = 0.0;
  double se_d1 = 0.0;
  Eigen::Index reps = 0;
  std::vector<double> d1;  // per repetition
};

struct ExperimentResult {
  std::vector<ExperimentCell> cells;
  std::vector<std::pair<std::string, double>> a0;  // per model

  [[nodiscard]] const ExperimentCell* find(const std::string& model, Eigen::Index n,
                                           const std::string& method) const;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// model,n,b,method,mean_d1,se_d1,reps
void write_experiment_csv(const ExperimentResult& result, std::ostream& out);

/// Pooled standard error of a difference of two cell means.
double pooled_se(const ExperimentCell& a, const ExperimentCell& b);

}  // namespace whittleboot
