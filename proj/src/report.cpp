#include "whittleboot/report.hpp"

#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace whittleboot {

Json to_json(const Vector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Json to_json(const Matrix& m) {
  Json j = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(std::move(row));
  }
  return j;
}

Vector vector_from_json(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Matrix matrix_from_json(const Json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Json fit_report(const ParamEstimate& fit, const ParamEstimate& centre, double bandwidth,
                const SpectralFamily& family, const Variant& variant, Eigen::Index n) {
  Json j;
  j["family"] = family.name();
  j["variant"] = variant.to_string();
  j["n"] = n;
  j["theta_hat"] = to_json(fit.theta);
  j["objective"] = fit.objective;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["score_norm"] = fit.score_norm;
  j["method"] = fit.method;
  j["bandwidth"] = bandwidth;
  j["theta0"] = to_json(centre.theta);
  j["theta0_converged"] = centre.converged;
  return j;
}

Json bootstrap_summary(const BootstrapResult& result, const SpectralFamily& family,
                       const BootstrapConfig& config) {
  const BootstrapComponents& c = result.components;
  const BootstrapDistribution& d = result.distribution;
  static constexpr double levels[] = {0.01, 0.025, 0.05, 0.5, 0.95, 0.975, 0.99};
  Json j;
  j["family"] = family.name();
  j["variant"] = config.variant.to_string();
  j["n"] = c.n;
  j["B"] = config.B;
  j["b"] = c.b;
  j["k"] = c.k;
  j["seed"] = config.seed;
  j["bandwidth"] = c.bandwidth;
  if (c.ar_order >= 0) j["boundary_ar_order"] = c.ar_order;
  j["theta_hat"] = to_json(c.theta_hat);
  j["theta0"] = to_json(c.theta0);
  Json coords = Json::array();
  for (Eigen::Index i = 0; i < d.samples.cols(); ++i) {
    Json q;
    for (double p : levels) {
      std::ostringstream key;
      key << p * 100.0;
      q[key.str()] = d.quantile(i, p);
    }
    const auto ci = d.percentile_ci(i, 0.95, c.theta_hat[i], c.n);
    Json e;
    e["index"] = i;
    e["estimate"] = c.theta_hat[i];
    e["quantiles_L"] = q;
    e["ci95"] = Json::array({ci.first, ci.second});
    coords.push_back(e);
  }
  j["coordinates"] = coords;
  Json m;
  m["V1_star"] = to_json(c.V1_star);
  m["Sigma_plus"] = to_json(c.Sigma_plus);
  m["C_plus"] = to_json(c.C_plus);
  m["V2_plus"] = to_json(c.V2_plus);
  m["W_star_mean"] = to_json(c.W_star_mean);
  j["matrices"] = m;
  Json diag;
  diag["discarded_replicates"] = c.discarded;
  diag["psd_clamped_mass"] = c.psd_clamped_mass;
  diag["b3_over_n"] = c.b3_over_n;
  diag["W_star_max_condition"] = c.W_star_max_condition;
  j["diagnostics"] = diag;
  return j;
}

void write_samples_csv(const BootstrapDistribution& dist, std::ostream& out) {
  for (Eigen::Index c = 0; c < dist.samples.cols(); ++c) out << (c ? "," : "") << "L" << c + 1;
  out << '\n';
  out.precision(17);
  for (Eigen::Index r = 0; r < dist.samples.rows(); ++r) {
    for (Eigen::Index c = 0; c < dist.samples.cols(); ++c) out << (c ? "," : "") << dist.samples(r, c);
    out << '\n';
  }
}

Json experiment_summary(const ExperimentResult& result, const ExperimentConfig& config) {
  Json j;
  j["B"] = config.B;
  j["R"] = config.R;
  j["reps"] = config.reps;
  j["seed"] = config.seed;
  Json a0;
  for (const auto& [m, v] : result.a0) a0[m] = v;
  j["a0"] = a0;
  Json cells = Json::array();
  for (const auto& c : result.cells) {
    cells.push_back({{"model", c.model}, {"n", c.n}, {"b", c.b}, {"method", c.method},
                     {"mean_d1", c.mean_d1}, {"se_d1", c.se_d1}, {"reps", c.reps}});
  }
  j["cells"] = cells;
  // The three ordering claims, per sample size.
  Json claims = Json::array();
  for (Eigen::Index n : config.n_values) {
    for (const std::string& m : config.models) {
      const std::string name = SimulationModel::parse(m).name();
      const ExperimentCell* h = result.find(name, n, "hybrid");
      const ExperimentCell* mb = result.find(name, n, "multiplicative");
      if (!h || !mb) continue;
      const double se = pooled_se(*h, *mb);
      Json c{{"model", name}, {"n", n}};
      if (name == "I") {
        c["claim"] = "hybrid and multiplicative are close";
        c["holds"] = std::abs(h->mean_d1 - mb->mean_d1) <= 2.0 * se;
        if (const ExperimentCell* g = result.find(name, n, "gaussian-asymptotic")) {
          Json c2{{"model", name}, {"n", n}, {"claim", "bootstrap beats the gaussian approximation"}};
          c2["holds"] = std::max(h->mean_d1, mb->mean_d1) + 2.0 * std::max(pooled_se(*h, *g), pooled_se(*mb, *g)) <= g->mean_d1;
          claims.push_back(c2);
        }
      } else {
        c["claim"] = "hybrid beats multiplicative";
        c["holds"] = h->mean_d1 + 2.0 * se <= mb->mean_d1;
      }
      claims.push_back(c);
    }
  }
  j["claims"] = claims;
  return j;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("experiment config must be a JSON object");
  static const std::set<std::string> known{"models", "n", "b", "B", "R", "reps", "seed", "a0_length", "full_scale"};
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) throw InvalidInput("experiment config: unknown key '" + item.key() + "'");
  }
  ExperimentConfig c;
  try {
    if (j.contains("models")) c.models = j.at("models").get<std::vector<std::string>>();
    if (j.contains("n")) c.n_values = j.at("n").get<std::vector<Eigen::Index>>();
    if (j.contains("b")) c.b_values = j.at("b").get<std::vector<Eigen::Index>>();
    if (j.contains("B")) c.B = j.at("B").get<Eigen::Index>();
    if (j.contains("R")) c.R = j.at("R").get<Eigen::Index>();
    if (j.contains("reps")) c.reps = j.at("reps").get<Eigen::Index>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("a0_length")) c.a0_length = j.at("a0_length").get<Eigen::Index>();
    if (j.value("full_scale", false)) c.apply_full_scale();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

Json sunspot_report(const SunspotAnalysis& a) {
  Json j;
  j["n"] = a.n;
  j["ar_order"] = a.order;
  j["theta_hat"] = to_json(a.theta);
  j["grid"] = {{"points", a.grid_points}, {"rule", "(g - 0.5) * pi / 500"}};
  j["lambda_max"] = a.lambda_max;
  j["period"] = a.period;
  j["periodogram_lambda"] = a.periodogram_lambda;
  j["periodogram_period"] = a.periodogram_period;
  j["B"] = a.B;
  j["b"] = a.b;
  j["seed"] = a.seed;
  j["ci95_period"] = Json::array({a.ci_low, a.ci_high});
  j["monotone_replicates"] = a.monotone_replicates;
  j["replicate_lambdas"] = a.replicate_lambdas;
  j["replicate_periods"] = a.replicate_periods;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << text;
  if (!out) throw InvalidInput("failed writing '" + path + "'");
}

}  // namespace whittleboot
