#include "whittleboot/oracle.hpp"

#include "whittleboot/quadrature.hpp"

namespace whittleboot {

namespace {

// Integrands are even in lambda: integrate (0, pi) in panels and double.
template <class F>
Vector integrate_symmetric(F f, double tol) {
  constexpr int panels = 8;
  Vector total;
  for (int k = 0; k < panels; ++k) {
    const double a = kPi * k / panels;
    const double b = kPi * (k + 1) / panels;
    Vector part = integrate(f, a, b, tol / panels);
    if (total.size() == 0) {
      total = part;
    } else {
      total += part;
    }
  }
  return 2.0 * total;
}

}  // namespace

OracleMatrices oracle_matrices(const SpectralFamily& family, const Vector& theta, const Density& f,
                               double tol) {
  family.require_admissible(theta);
  const Eigen::Index m = family.dim();
  auto integrand = [&](double lam) {
    FamilyEval e;
    family.evaluate(theta, std::span<const double>(&lam, 1), 2, e);
    const double ft = e.f[0];
    const double fx = f(lam);
    const Vector d = e.inv_grad.col(0);
    const Matrix h = e.hessian_at(0, m);
    // d2 log f_theta = -f_theta d2(1/f_theta) + f_theta^2 d(1/f) d(1/f)^T
    const Matrix w = (fx - ft) * h + ft * ft * d * d.transpose();
    const Vector g = -d / kTwoPi;
    const Matrix v = g * g.transpose() * fx * fx;
    Vector out(2 * m * m);
    out.head(m * m) = Eigen::Map<const Vector>(w.data(), m * m);
    out.tail(m * m) = Eigen::Map<const Vector>(v.data(), m * m);
    return out;
  };
  const Vector r = integrate_symmetric(integrand, tol);
  OracleMatrices o;
  o.W = Eigen::Map<const Matrix>(r.data(), m, m) / kTwoPi;
  o.V1 = Eigen::Map<const Matrix>(r.data() + m * m, m, m) * (4.0 * kPi);
  o.W = (o.W + o.W.transpose()).eval() / 2.0;
  o.V1 = (o.V1 + o.V1.transpose()).eval() / 2.0;
  return o;
}

Matrix oracle_v2_linear(const SpectralFamily& family, const Vector& theta, const Density& f,
                        double eta4, double tol) {
  family.require_admissible(theta);
  auto integrand = [&](double lam) { return Vector(score_vector(family, theta, lam) * f(lam)); };
  const Vector a = integrate_symmetric(integrand, tol);
  return eta4 * a * a.transpose();
}

Matrix asymptotic_covariance(const Matrix& W, const Matrix& V1, const Matrix& V2) {
  const Matrix Winv = W.inverse();
  const Matrix c = Winv * (V1 + V2) * Winv.transpose();
  return (c + c.transpose()) / 2.0;
}

Density family_density(FamilyPtr family, Vector theta) {
  return [family = std::move(family), theta = std::move(theta)](double lam) {
    return family->density(theta, lam);
  };
}

}  // namespace whittleboot
