#pragma once

#include "whittleboot/types.hpp"

#include <array>
#include <cmath>
#include <string>

namespace whittleboot {

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gk15(F& f, double a, double b, Vector& kronrod, Vector& err) {
  const double c = (a + b) / 2.0;
  const double h = (b - a) / 2.0;
  const Vector fc = f(c);
  kronrod = kKronrodWeights[7] * fc;
  Vector gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kKronrodNodes[static_cast<std::size_t>(i)];
    const Vector s = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[static_cast<std::size_t>(i)] * s;
    if (i % 2 == 1) gauss += kGaussWeights[static_cast<std::size_t>(i / 2)] * s;
  }
  kronrod *= h;
  gauss *= h;
  err = (kronrod - gauss).cwiseAbs();
}

template <class F>
Vector adapt(F& f, double a, double b, double tol, int depth, int& evals) {
  Vector k;
  Vector e;
  gk15(f, a, b, k, e);
  evals += 15;
  if (e.maxCoeff() <= tol || depth <= 0) {
    if (e.maxCoeff() > tol) throw NumericFailure("quadrature did not reach tolerance " + std::to_string(tol));
    return k;
  }
  const double m = (a + b) / 2.0;
  return adapt(f, a, m, tol / 2.0, depth - 1, evals) + adapt(f, m, b, tol / 2.0, depth - 1, evals);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) for vector-valued integrands. Absolute
/// tolerance per component over [a, b].
template <class F>
Vector integrate(F f, double a, double b, double tol = 1e-10, int max_depth = 40) {
  int evals = 0;
  return detail::adapt(f, a, b, tol, max_depth, evals);
}

/// Scalar convenience wrapper.
template <class F>
double integrate_scalar(F f, double a, double b, double tol = 1e-10, int max_depth = 40) {
  auto g = [&](double x) {
    Vector v(1);
    v[0] = f(x);
    return v;
  };
  return integrate(g, a, b, tol, max_depth)[0];
}

}  // namespace whittleboot
