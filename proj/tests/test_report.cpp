#include "support.hpp"

#include "whittleboot/report.hpp"
#include "whittleboot/sunspot.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace whittleboot;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("wbtest_" + name)).string();
}

// AR(2) with complex roots r^{-1} e^{+-i w}
Vector ar2_from_polar(double r, double w) {
  Vector a(2);
  a << 2 * r * std::cos(w), -r * r;
  return a;
}

double analytic_peak(const Vector& a) {
  // d/dl |phi|^2 = 0: cos l = a1 (a2 - 1) / (4 a2)
  return std::acos(a[0] * (a[1] - 1) / (4 * a[1]));
}

}  // namespace

TEST_CASE("JSON reports round-trip") {
  const auto fam = std::make_shared<ARFamily>(1);
  Rng r = wbtest::rng(80);
  const TimeSeries x = wbtest::ar_series({0.6}, 300, r);
  BootstrapConfig c;
  c.B = 120;
  c.seed = 3;
  const BootstrapResult res = run_hybrid_bootstrap(x, fam, c);
  const Json j = bootstrap_summary(res, *fam, c);
  const std::string path = temp_path("summary.json");
  write_text_file(path, dump(j));
  const Json back = read_json_file(path);
  CHECK(back == j);
  CHECK(dump(back) == dump(j));
  std::filesystem::remove(path);

  CHECK(j["b"] == default_block_length(300));
  CHECK(j["coordinates"].size() == 2);
  CHECK(j["coordinates"][1]["quantiles_L"].contains("97.5"));
  CHECK(j["diagnostics"]["discarded_replicates"] == res.components.discarded);
  CHECK(matrix_from_json(j["matrices"]["V1_star"]) == res.components.V1_star);
  CHECK(vector_from_json(j["theta_hat"]) == res.components.theta_hat);

  std::ostringstream csv;
  write_samples_csv(res.distribution, csv);
  const std::string s = csv.str();
  CHECK(s.rfind("L1,L2\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 121);
}

TEST_CASE("experiment config from JSON") {
  const Json j = Json::parse(R"({"models": ["I", "III"], "n": [100], "B": 150, "R": 600, "reps": 4, "seed": 9})");
  const ExperimentConfig c = experiment_config_from_json(j);
  CHECK(c.models == std::vector<std::string>{"I", "III"});
  CHECK(c.n_values == std::vector<Eigen::Index>{100});
  CHECK(c.B == 150);
  CHECK(c.R == 600);
  CHECK(c.reps == 4);
  CHECK(c.seed == 9);
  CHECK_THROWS_AS(experiment_config_from_json(Json::parse(R"({"B": "many"})")), InvalidInput);
  CHECK_THROWS_AS(experiment_config_from_json(Json::parse(R"({"colour": 1})")), InvalidInput);
  CHECK_THROWS_AS(experiment_config_from_json(Json::parse("[1, 2]")), InvalidInput);
  CHECK_THROWS_AS(read_json_file(temp_path("does_not_exist.json")), InvalidInput);
}

TEST_CASE("fit: rectangular taper reproduces the standard fit") {
  const auto fam = std::make_shared<ARFamily>(1);
  Rng r = wbtest::rng(81);
  const TimeSeries x = wbtest::ar_series({0.8}, 500, r);
  BootstrapConfig s;
  s.b = 20;
  BootstrapConfig t = s;
  t.variant = Variant::tapered(0.0);
  const VariantFit a = fit_variant(x, fam, s);
  const VariantFit b = fit_variant(x, fam, t);
  CHECK((a.fit.theta - b.fit.theta).norm() < 1e-8);
  CHECK((a.centre.theta - b.centre.theta).norm() < 1e-8);
  CHECK(a.fit.objective == doctest::Approx(b.fit.objective).epsilon(1e-8));
  CHECK(a.bandwidth == b.bandwidth);
}

TEST_CASE("fit: AR(1) on Model I") {
  const auto fam = std::make_shared<ARFamily>(1);
  int hits = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Rng r = wbtest::rng(2000 + rep);
    BootstrapConfig c;
    c.b = 22;
    const VariantFit f = fit_variant(wbtest::ar_series({0.8}, 1000, r), fam, c);
    hits += std::abs(f.fit.theta[1] - 0.8) <= 0.06;
  }
  CHECK(hits >= 95);
}

TEST_CASE("spectral peak location") {
  const Vector grid = peak_search_grid();
  REQUIRE(grid.size() == 500);
  CHECK(grid[0] == doctest::Approx(0.5 * kPi / 500));
  CHECK(grid[499] < kPi);
  const double step = kPi / 500;
  for (double w : {0.3, 0.5707, 1.2, 2.4}) {
    for (double rad : {0.6, 0.85, 0.95}) {
      const Vector a = ar2_from_polar(rad, w);
      const double cos_peak = a[0] * (a[1] - 1) / (4 * a[1]);
      if (std::abs(cos_peak) >= 1) continue;
      const SpectralPeak p = ar_spectral_peak(a, grid);
      CHECK(p.interior);
      CHECK(std::abs(p.lambda - analytic_peak(a)) <= step);
    }
  }
  // positive AR(1): the maximum sits at the low end of the grid
  const SpectralPeak low = ar_spectral_peak(Vector::Constant(1, 0.7), grid);
  CHECK_FALSE(low.interior);
  CHECK(low.index == 0);
}

TEST_CASE("sunspot pipeline on a synthetic 11-year cycle") {
  const double w = kTwoPi / 11.0;
  const Vector a = ar2_from_polar(0.9, w);
  Rng r = wbtest::rng(82);
  const TimeSeries x = wbtest::ar_series({a[0], a[1]}, 321, r);
  const Vector xs = x.values().array() + 50.0;  // analysis removes the mean
  const SunspotAnalysis s = analyze_sunspots(TimeSeries(xs), 2, 300, 17);
  CHECK(s.n == 321);
  CHECK(s.lambda_max > 0.0);
  CHECK(s.lambda_max < kPi);
  CHECK(s.period == 2 * kPi / s.lambda_max);
  CHECK(s.period == doctest::Approx(2 * kPi / analytic_peak(a)).epsilon(0.15));
  CHECK(s.ci_low < s.period);
  CHECK(s.ci_high > s.period);
  CHECK(s.replicate_periods.size() == 300);
  for (std::size_t i = 0; i < s.replicate_periods.size(); ++i) {
    CHECK(s.replicate_periods[i] == 2 * kPi / s.replicate_lambdas[i]);
  }

  const SunspotAnalysis again = analyze_sunspots(TimeSeries(xs), 2, 300, 17);
  CHECK(again.replicate_periods == s.replicate_periods);
  CHECK(sunspot_report(again) == sunspot_report(s));

  CHECK_THROWS_AS(analyze_sunspots(TimeSeries(xs), 161, 300, 17), InvalidInput);
}
