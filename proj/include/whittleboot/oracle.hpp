#pragma once

#include "whittleboot/family.hpp"

#include <functional>

namespace whittleboot {

using Density = std::function<double(double)>;

struct OracleMatrices {
  Matrix W;   // (1/2pi) int [d2 log f_theta + f d2 (1/f_theta)]
  Matrix V1;  // 4 pi int g g^T f^2
};

/// W and V1 over (-pi, pi] by adaptive quadrature.
OracleMatrices oracle_matrices(const SpectralFamily& family, const Vector& theta, const Density& f,
                               double tol = 1e-10);

/// Linear-process V2 = eta4 (int g f)(int g f)^T, eta4 the innovation excess kurtosis.
Matrix oracle_v2_linear(const SpectralFamily& family, const Vector& theta, const Density& f,
                        double eta4, double tol = 1e-10);

/// W^{-1} (V1 + V2) W^{-1}.
Matrix asymptotic_covariance(const Matrix& W, const Matrix& V1, const Matrix& V2);

/// f_theta itself as a Density.
Density family_density(FamilyPtr family, Vector theta);

}  // namespace whittleboot
