#include "whittleboot/whittle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace whittleboot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_spec(const FourierGrid& grid, const Vector& spec) {
  if (spec.size() != grid.half()) {
    throw InvalidInput("spectral values: expected " + std::to_string(grid.half()) +
                       " ordinates, got " + std::to_string(spec.size()));
  }
}

// Objective pieces without the admissibility check.
WhittleTerms terms_unchecked(const SpectralFamily& family, const Vector& theta,
                             const FourierGrid& grid, const Vector& spec, int order,
                             LogTerm log_term) {
  const Vector lambdas = grid.positive_frequencies();
  FamilyEval e;
  family.evaluate(theta, std::span<const double>(lambdas.data(), static_cast<std::size_t>(lambdas.size())),
                  order, e);
  const Eigen::Index m = family.dim();
  const double n = static_cast<double>(grid.n());
  const double scale = 2.0 / n;
  const Vector inv_f = e.f.cwiseInverse();

  WhittleTerms t;
  std::optional<LogIntegral> li;
  if (log_term == LogTerm::kolmogorov) {
    li = family.log_integral(theta);
    if (!li) throw InvalidInput(family.name() + ": no closed-form log integral for this family");
    t.value = static_cast<double>(grid.symmetric_count()) / n * li->value + scale * spec.dot(inv_f);
  } else {
    t.value = scale * (e.f.array().log().sum() + spec.dot(inv_f));
  }
  if (order < 1) return t;

  // Weight on d(1/f): s in the Kolmogorov form, s - f in the discrete form.
  const Vector w = log_term == LogTerm::kolmogorov ? Vector(scale * spec) : Vector(scale * (spec - e.f));
  t.grad = e.inv_grad * w;
  if (li) t.grad += static_cast<double>(grid.symmetric_count()) / n * li->grad;
  if (order < 2) return t;

  const Vector hv = e.inv_hess * w;
  t.hess = Eigen::Map<const Matrix>(hv.data(), m, m);
  if (li) {
    t.hess += static_cast<double>(grid.symmetric_count()) / n * li->hess;
  } else {
    const Vector f2 = scale * e.f.array().square();
    t.hess += e.inv_grad * f2.asDiagonal() * e.inv_grad.transpose();
  }
  t.hess = (t.hess + t.hess.transpose()).eval() / 2.0;
  return t;
}

struct Objective {
  const SpectralFamily& family;
  const FourierGrid& grid;
  const Vector& spec;
  LogTerm log_term;

  double value(const Vector& theta) const {
    if (!family.admissible(theta)) return kInf;
    const double v = terms_unchecked(family, theta, grid, spec, 0, log_term).value;
    return std::isfinite(v) ? v : kInf;
  }
  WhittleTerms full(const Vector& theta, int order) const {
    return terms_unchecked(family, theta, grid, spec, order, log_term);
  }
};

Vector clip(const Vector& x, const Matrix& box) {
  return x.cwiseMax(box.col(0)).cwiseMin(box.col(1));
}

struct LocalResult {
  Vector theta;
  double value = kInf;
  bool converged = false;
  int iterations = 0;
  double gnorm = kInf;
};

bool small_gradient(const Vector& g, const Vector& x, double tol) {
  return g.norm() <= tol * (1.0 + x.norm());
}

LocalResult newton(const Objective& obj, Vector x, const MinimizeOptions& opt) {
  const Matrix box = obj.family.bounds();
  LocalResult r;
  r.theta = x;
  r.value = obj.value(x);
  if (!std::isfinite(r.value)) return r;
  for (int it = 0; it < opt.max_iterations; ++it) {
    r.iterations = it + 1;
    const WhittleTerms t = obj.full(x, 2);
    r.gnorm = t.grad.norm();
    if (!t.grad.allFinite() || !t.hess.allFinite()) return r;
    if (small_gradient(t.grad, x, opt.gtol)) {
      r.converged = true;
      return r;
    }
    // Modified Newton: reflect negative curvature and floor tiny eigenvalues.
    const Eigen::SelfAdjointEigenSolver<Matrix> es(t.hess);
    Vector ev = es.eigenvalues().cwiseAbs();
    const double floor = std::max(ev.maxCoeff() * 1e-12, 1e-300);
    ev = ev.cwiseMax(floor);
    const Vector dir = -es.eigenvectors() * (es.eigenvectors().transpose() * t.grad).cwiseQuotient(ev);
    const double decrement = -t.grad.dot(dir);

    double step = 1.0;
    bool accepted = false;
    Vector xn;
    double vn = kInf;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      xn = clip(x + step * dir, box);
      vn = obj.value(xn);
      if (std::isfinite(vn) && vn <= r.value + 1e-4 * t.grad.dot(xn - x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // At the roundoff floor the Armijo test is noise; accept the full step if
      // it shrinks the gradient.
      xn = clip(x + dir, box);
      vn = obj.value(xn);
      if (std::isfinite(vn) && decrement <= 1e-10 * (1.0 + std::abs(r.value))) {
        const WhittleTerms tn = obj.full(xn, 1);
        if (tn.grad.norm() < t.grad.norm()) {
          x = xn;
          r.theta = x;
          r.value = vn;
          continue;
        }
      }
      r.converged = small_gradient(t.grad, x, 1e-6);
      return r;
    }
    const bool stalled = (xn - x).norm() <= 1e-15 * (1.0 + x.norm());
    x = xn;
    r.theta = x;
    r.value = vn;
    if (stalled) {
      const WhittleTerms tn = obj.full(x, 1);
      r.gnorm = tn.grad.norm();
      r.converged = small_gradient(tn.grad, x, 1e-6);
      return r;
    }
  }
  const WhittleTerms t = obj.full(x, 1);
  r.gnorm = t.grad.norm();
  r.converged = small_gradient(t.grad, x, opt.gtol);
  return r;
}

// Plain Nelder-Mead on the barrier objective.
Vector nelder_mead(const Objective& obj, const Vector& x0, int max_iter) {
  const Eigen::Index m = x0.size();
  std::vector<Vector> pts(static_cast<std::size_t>(m + 1), x0);
  std::vector<double> val(static_cast<std::size_t>(m + 1));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double h = std::abs(x0[i]) > 1e-3 ? 0.05 * std::abs(x0[i]) : 0.01;
    pts[static_cast<std::size_t>(i + 1)][i] += h;
    if (!std::isfinite(obj.value(pts[static_cast<std::size_t>(i + 1)]))) pts[static_cast<std::size_t>(i + 1)][i] -= 2 * h;
  }
  for (std::size_t i = 0; i < pts.size(); ++i) val[i] = obj.value(pts[i]);
  std::vector<std::size_t> idx(pts.size());
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    const std::size_t best = idx.front();
    const std::size_t worst = idx.back();
    const std::size_t second = idx[idx.size() - 2];
    if (std::isfinite(val[worst]) && std::abs(val[worst] - val[best]) <= 1e-15 * (1.0 + std::abs(val[best]))) break;
    Vector centroid = Vector::Zero(m);
    for (std::size_t i : idx) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= static_cast<double>(m);
    const Vector xr = centroid + (centroid - pts[worst]);
    const double vr = obj.value(xr);
    if (vr < val[best]) {
      const Vector xe = centroid + 2.0 * (centroid - pts[worst]);
      const double ve = obj.value(xe);
      if (ve < vr) {
        pts[worst] = xe;
        val[worst] = ve;
      } else {
        pts[worst] = xr;
        val[worst] = vr;
      }
    } else if (vr < val[second]) {
      pts[worst] = xr;
      val[worst] = vr;
    } else {
      const Vector xc = centroid + 0.5 * (pts[worst] - centroid);
      const double vc = obj.value(xc);
      if (vc < val[worst]) {
        pts[worst] = xc;
        val[worst] = vc;
      } else {
        for (std::size_t i = 0; i < pts.size(); ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
          val[i] = obj.value(pts[i]);
        }
      }
    }
  }
  const auto b = std::min_element(val.begin(), val.end()) - val.begin();
  return pts[static_cast<std::size_t>(b)];
}

ParamEstimate local_fit(const Objective& obj, const Vector& start, const MinimizeOptions& opt) {
  LocalResult r = newton(obj, start, opt);
  std::string method = "newton";
  if (!r.converged) {
    const Vector nm = nelder_mead(obj, std::isfinite(r.value) ? r.theta : start, 4000);
    LocalResult polished = newton(obj, nm, opt);
    polished.iterations += r.iterations;
    if (polished.converged || polished.value < r.value) {
      r = polished;
      method = "nelder-mead";
    }
  }
  ParamEstimate est;
  est.theta = r.theta;
  est.objective = r.value;
  est.converged = r.converged;
  est.iterations = r.iterations;
  est.score_norm = r.gnorm;
  est.method = method;
  return est;
}

}  // namespace

WhittleTerms whittle_terms(const SpectralFamily& family, const Vector& theta,
                           const FourierGrid& grid, const Vector& spec, int order,
                           LogTerm log_term) {
  check_spec(grid, spec);
  family.require_admissible(theta);
  return terms_unchecked(family, theta, grid, spec, order, log_term);
}

double whittle_objective(const SpectralFamily& family, const Vector& theta,
                         const FourierGrid& grid, const Vector& spec, LogTerm log_term) {
  return whittle_terms(family, theta, grid, spec, 0, log_term).value;
}

Vector whittle_score(const SpectralFamily& family, const Vector& theta, const FourierGrid& grid,
                     const Vector& spec, LogTerm log_term) {
  return whittle_terms(family, theta, grid, spec, 1, log_term).grad;
}

Matrix whittle_hessian(const SpectralFamily& family, const Vector& theta,
                       const FourierGrid& grid, const Vector& spec, LogTerm log_term) {
  return whittle_terms(family, theta, grid, spec, 2, log_term).hess;
}

ParamEstimate minimize_whittle(const SpectralFamily& family, const FourierGrid& grid,
                               const Vector& spec, const Vector& theta_init,
                               const MinimizeOptions& options) {
  check_spec(grid, spec);
  family.require_admissible(theta_init);
  const Objective obj{family, grid, spec, options.log_term};

  std::vector<Vector> starts{theta_init};
  if (options.multi_start) {
    if (auto ms = family.moment_start(spec, grid.n())) starts.push_back(*ms);
    starts.push_back(family.box_center());
  }
  std::optional<ParamEstimate> best;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const Vector& s = starts[i];
    if (!family.admissible(s)) continue;
    bool seen = false;
    for (std::size_t k = 0; k < i; ++k) seen = seen || (starts[k] - s).norm() == 0.0;
    if (seen) continue;
    ParamEstimate e = local_fit(obj, s, options);
    const bool better = !best || (e.converged && !best->converged) ||
                        (e.converged == best->converged && e.objective < best->objective);
    if (better) best = std::move(e);
  }
  return *best;
}

ParamEstimate minimize_whittle(const SpectralFamily& family, const FourierGrid& grid,
                               const Vector& spec, const MinimizeOptions& options) {
  Vector start = family.box_center();
  if (auto ms = family.moment_start(spec, grid.n())) start = *ms;
  return minimize_whittle(family, grid, spec, start, options);
}

ParamEstimate minimize_whittle(const SpectralFamily& family, const Periodogram& I,
                               const MinimizeOptions& options) {
  return minimize_whittle(family, I.grid, I.ordinates, options);
}

double ar1_closed_form(const Periodogram& I) {
  const Vector lam = I.grid.positive_frequencies();
  const double den = I.ordinates.sum();
  if (!(den > 0.0)) throw DegenerateInput("periodogram is identically zero");
  return I.ordinates.dot(lam.array().cos().matrix()) / den;
}

ParamEstimate pseudo_true_parameter(const SpectralFamily& family,
                                    const SpectralDensityEstimate& fhat,
                                    const MinimizeOptions& options) {
  return minimize_whittle(family, fhat.grid(), fhat.positive_values(), options);
}

double fejer_kernel(Eigen::Index n, double x) {
  if (n < 1) throw InvalidInput("Fejer kernel needs n >= 1");
  const double nd = static_cast<double>(n);
  const double r = std::remainder(x, kTwoPi);
  const double s = std::sin(r / 2.0);
  if (r == 0.0 || s == 0.0) return nd / kTwoPi;
  const double t = std::sin(nd * r / 2.0);
  return t * t / (kTwoPi * nd * s * s);
}

FamilyPtr borrow(const SpectralFamily& family) {
  return FamilyPtr(std::shared_ptr<void>(), &family);
}

Vector debiased_expected_spectrum(const SpectralFamily& family, const Vector& theta,
                                  const FourierGrid& grid) {
  family.require_admissible(theta);
  const DebiasedFamily db(borrow(family), grid.n());
  const Vector lam = grid.positive_frequencies();
  FamilyEval e;
  db.evaluate(theta, std::span<const double>(lam.data(), static_cast<std::size_t>(lam.size())), 0, e);
  return e.f;
}

double debiased_objective(const SpectralFamily& family, const Vector& theta,
                          const FourierGrid& grid, const Vector& spec) {
  const DebiasedFamily db(borrow(family), grid.n());
  return whittle_objective(db, theta, grid, spec);
}

}  // namespace whittleboot
