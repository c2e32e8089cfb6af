#pragma once

#include "whittleboot/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace whittleboot {

namespace detail {

template <class Derived>
Eigen::SelfAdjointEigenSolver<Matrix> symmetric_eigen(const Eigen::MatrixBase<Derived>& A) {
  if (A.rows() != A.cols()) throw InvalidInput("matrix must be square");
  const Matrix M = A;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InvalidInput("matrix is not symmetric");
  }
  return Eigen::SelfAdjointEigenSolver<Matrix>((M + M.transpose()) / 2.0);
}

}  // namespace detail

/// Symmetric square root; eigenvalues below tol * max are set to 0.
template <class Derived>
Matrix psd_sqrt(const Eigen::MatrixBase<Derived>& A, double tol = 1e-12) {
  const auto es = detail::symmetric_eigen(A);
  const Vector ev = es.eigenvalues();
  const double cut = tol * std::max(ev.maxCoeff(), 0.0);
  const Vector r = ev.unaryExpr([cut](double x) { return x < cut ? 0.0 : std::sqrt(x); });
  const Matrix out = es.eigenvectors() * r.asDiagonal() * es.eigenvectors().transpose();
  return (out + out.transpose()) / 2.0;
}

/// Symmetric inverse square root; eigenvalues below tol * max are raised to it.
template <class Derived>
Matrix psd_inv_sqrt(const Eigen::MatrixBase<Derived>& A, double tol = 1e-12) {
  const auto es = detail::symmetric_eigen(A);
  const Vector ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0)) throw NumericFailure("inverse square root of a matrix with no positive eigenvalue");
  const double cut = tol * top;
  const Vector r = ev.unaryExpr([cut](double x) { return 1.0 / std::sqrt(std::max(x, cut)); });
  const Matrix out = es.eigenvectors() * r.asDiagonal() * es.eigenvectors().transpose();
  return (out + out.transpose()) / 2.0;
}

struct PsdProjection {
  Matrix matrix;
  /// Sum of the magnitudes of the negative eigenvalues that were set to 0.
  double clamped_mass = 0.0;
};

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clamped to 0).
template <class Derived>
PsdProjection psd_project(const Eigen::MatrixBase<Derived>& A) {
  const auto es = detail::symmetric_eigen(A);
  const Vector ev = es.eigenvalues();
  PsdProjection p;
  p.clamped_mass = (-ev).cwiseMax(0.0).sum();
  const Matrix out = es.eigenvectors() * ev.cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
  p.matrix = (out + out.transpose()) / 2.0;
  return p;
}

template <class Derived>
Matrix symmetrize(const Eigen::MatrixBase<Derived>& A) {
  return (A + A.transpose()) / 2.0;
}

}  // namespace whittleboot
