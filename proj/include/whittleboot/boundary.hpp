#pragma once

#include "whittleboot/spectral.hpp"
#include "whittleboot/yule_walker.hpp"

namespace whittleboot {

/// J, the prediction-extension term J-hat and J-tilde = J + J-hat at j = 1..N.
/// J-hat is the transform of the AR(p) best linear predictions of X_{n+1}, ...
/// and X_0, X_{-1}, ... in the same e^{-i lambda t} convention as dft().
struct BoundaryDft {
  FourierGrid grid;
  ComplexVector j;
  ComplexVector j_hat;
  ComplexVector j_tilde;
};

BoundaryDft boundary_extension_dft(const TimeSeries& series, const YuleWalkerFit& fit);

/// I-tilde = J-tilde conj(J) / (2 pi n). The real part feeds the objectives.
struct BoundaryPeriodogram {
  FourierGrid grid;
  ComplexVector values;

  [[nodiscard]] Periodogram real_part() const { return {grid, values.real()}; }
};

BoundaryPeriodogram boundary_periodogram(const TimeSeries& series, const YuleWalkerFit& fit);

}  // namespace whittleboot
