#include "support.hpp"

#include "whittleboot/oracle.hpp"
#include "whittleboot/simulation.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

using namespace whittleboot;

namespace {

struct Moments {
  double mean, var, skew, exkurt;
};

Moments moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double x : v) {
    const double d = x - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  return {m, m2, m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

double lag1(const Vector& x) {
  const Vector c = x.array() - x.mean();
  return c.head(c.size() - 1).dot(c.tail(c.size() - 1)) / c.squaredNorm();
}

// exact int_0^1 |F^{-1} - G^{-1}| for left-continuous empirical inverses
double exact_d1(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> cuts{0.0, 1.0};
  for (std::size_t i = 1; i < a.size(); ++i) cuts.push_back(static_cast<double>(i) / a.size());
  for (std::size_t i = 1; i < b.size(); ++i) cuts.push_back(static_cast<double>(i) / b.size());
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    const auto ia = static_cast<std::size_t>(mid * a.size());
    const auto ib = static_cast<std::size_t>(mid * b.size());
    s += (cuts[k + 1] - cuts[k]) * std::abs(a[ia] - b[ib]);
  }
  return s;
}

std::span<const double> sp(const std::vector<double>& v) { return {v.data(), v.size()}; }

}  // namespace

TEST_CASE("Laplace draws") {
  Rng r = wbtest::rng(70);
  std::vector<double> v(100000);
  for (double& x : v) x = laplace_sample(0.1, r);
  const Moments m = moments(v);
  CHECK(std::abs(m.mean) < 3 * std::sqrt(m.var / v.size()));
  CHECK(m.var == doctest::Approx(0.02).epsilon(0.05));
  CHECK(m.exkurt == doctest::Approx(3.0).epsilon(0.15));
}

TEST_CASE("data-generating processes") {
  Rng r = wbtest::rng(71);
  CHECK(lag1(generate(SimulationModel::model(SimulationModel::Tag::I), 100000, r).values()) ==
        doctest::Approx(0.8).epsilon(0.01 / 0.8));
  CHECK(generate(SimulationModel::model(SimulationModel::Tag::III), 100000, r).values().mean() > 0.0);

  const Vector x = generate(SimulationModel::model(SimulationModel::Tag::II), 100000, r).values();
  CHECK(x.allFinite());
  const auto half_var = [&](Eigen::Index s) {
    const Vector h = x.segment(s, 50000);
    return (h.array() - h.mean()).square().mean();
  };
  CHECK(half_var(0) == doctest::Approx(half_var(50000)).epsilon(0.20));

  CHECK(generate(SimulationModel::model(SimulationModel::Tag::I), 50, r).size() == 50);
  CHECK_THROWS_AS(generate(SimulationModel::model(SimulationModel::Tag::I), 49, r), InvalidInput);
  CHECK(SimulationModel::parse("Model II").tag == SimulationModel::Tag::II);
  CHECK(SimulationModel::parse("III").name() == "III");
  CHECK_THROWS_AS(SimulationModel::parse("IV"), InvalidInput);

  Rng a = wbtest::rng(72), b = wbtest::rng(72);
  const auto m3 = SimulationModel::model(SimulationModel::Tag::III);
  CHECK(generate(m3, 300, a).values() == generate(m3, 300, b).values());
}

TEST_CASE("a0 oracle") {
  using T = SimulationModel::Tag;
  CHECK(a0_oracle(SimulationModel::model(T::I)) == doctest::Approx(0.8).epsilon(0.002 / 0.8));
  for (T t : {T::II, T::III}) {
    const auto m = SimulationModel::model(t);
    const double a = a0_oracle(m);
    CHECK(a > 0.0);
    CHECK(a < 1.0);
    CHECK(std::abs(a - a0_oracle(m, 10'000'000, 4242)) < 0.01);
    CHECK(a0_oracle(m) == a);  // cached
  }
}

TEST_CASE("exact distribution on Model I") {
  const auto m = SimulationModel::model(SimulationModel::Tag::I);
  const std::vector<double> e = exact_distribution(m, 1000, 2000, 0.8, 73);
  REQUIRE(e.size() == 2000);
  const Moments mo = moments(e);
  CHECK(mo.skew < 0.0);

  // The centre carries the O(1/n) bias of the lag-1 autocorrelation, so compare
  // with a time-domain simulation of the same statistic rather than with 0.
  std::vector<double> td;
  for (int i = 0; i < 2000; ++i) {
    Rng r = wbtest::rng(5000 + i);
    const Vector x = wbtest::ar_series({0.8}, 1000, r).values();
    const Vector c = x.array() - x.mean();
    const double circ = c.head(999).dot(c.tail(999)) + c[999] * c[0];
    td.push_back(std::sqrt(1000.0) * (circ / c.squaredNorm() - 0.8));
  }
  const Moments mt = moments(td);
  CHECK(std::abs(mo.mean - mt.mean) < 3 * std::sqrt(mo.var / 2000 + mt.var / 2000));
  CHECK(mo.mean < 0.0);

  const auto fam = std::make_shared<ARFamily>(1);
  Vector th(2);
  th << 1.0, 0.8;
  const OracleMatrices o = oracle_matrices(*fam, th, family_density(fam, th));
  const double sd = std::sqrt(asymptotic_covariance(o.W, o.V1, Matrix::Zero(2, 2))(1, 1));
  CHECK(std::sqrt(mo.var) == doctest::Approx(sd).epsilon(0.10));

  CHECK(exact_distribution(m, 100, 1, 0.8, 1).size() == 1);
  CHECK(exact_distribution(m, 100, 3, 0.8, 9) == exact_distribution(m, 100, 3, 0.8, 9));
}

TEST_CASE("d1 distance") {
  Rng r = wbtest::rng(74);
  std::normal_distribution<double> z;
  auto draw = [&](std::size_t k) {
    std::vector<double> v(k);
    for (double& x : v) x = z(r);
    return v;
  };
  const std::vector<double> f = draw(200);
  CHECK(d1_distance(sp(f), sp(f)) == 0.0);

  const std::vector<double> zero(7, 0.0), c(5, -2.5);
  CHECK(d1_distance(sp(zero), sp(c)) == doctest::Approx(2.5).epsilon(1e-14));

  std::vector<double> g = f;
  for (double& x : g) x += 0.37;
  CHECK(std::abs(d1_distance(sp(f), sp(g)) - 0.37) < 1e-12);

  for (int t = 0; t < 20; ++t) {
    const auto a = draw(50), b = draw(50), e = draw(50);
    CHECK(d1_distance(sp(a), sp(b)) == d1_distance(sp(b), sp(a)));
    CHECK(d1_distance(sp(a), sp(e)) <= d1_distance(sp(a), sp(b)) + d1_distance(sp(b), sp(e)) + 1e-12);
    std::vector<double> ca = a, cb = b;
    for (double& x : ca) x *= -3.0;
    for (double& x : cb) x *= -3.0;
    CHECK(std::abs(d1_distance(sp(ca), sp(cb)) - 3.0 * d1_distance(sp(a), sp(b))) < 1e-12);
  }

  // sizes dividing the 1e4-point grid: grid average = exact integral
  const auto a = draw(40), b = draw(125);
  CHECK(std::abs(d1_distance(sp(a), sp(b)) - exact_d1(a, b)) < 1e-12);
  const auto p = draw(37), q = draw(91);
  CHECK(std::abs(d1_distance(sp(p), sp(q)) - exact_d1(p, q)) < 1e-3);

  CHECK_THROWS_AS(d1_distance(sp(f), std::span<const double>()), InvalidInput);
}

TEST_CASE("experiment at toy scale") {
  ExperimentConfig c;
  c.models = {"I", "II"};
  c.n_values = {60};
  c.B = 100;
  c.R = 500;
  c.reps = 3;
  c.a0_length = 100000;
  c.seed = 5;
  const ExperimentResult a = run_experiment(c);
  CHECK(a.cells.size() == 5);  // hybrid and multiplicative per model, gaussian for Model I
  for (const auto& cell : a.cells) {
    CHECK(cell.reps == 3);
    CHECK(cell.b == (cell.method == "gaussian-asymptotic" ? 0 : 11));
    for (double d : cell.d1) CHECK(d >= 0.0);
  }
  REQUIRE(a.find("I", 60, "gaussian-asymptotic") != nullptr);
  CHECK(a.find("II", 60, "gaussian-asymptotic") == nullptr);

  const ExperimentResult b = run_experiment(c);
  std::ostringstream sa, sb;
  write_experiment_csv(a, sa);
  write_experiment_csv(b, sb);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("model,n,b,method,mean_d1,se_d1,reps\n", 0) == 0);

  c.B = 99;
  CHECK_THROWS_AS(run_experiment(c), InvalidInput);
}
