#include "whittleboot/boundary.hpp"

namespace whittleboot {

BoundaryDft boundary_extension_dft(const TimeSeries& series, const YuleWalkerFit& fit) {
  const TimeSeries c = series.centered();
  const Vector& x = c.values();
  const Eigen::Index n = c.size();
  const int p = fit.p;
  if (fit.phi.size() != p) throw InvalidInput("Yule-Walker fit has inconsistent order");
  if (2 * p >= n) throw InvalidInput("AR order too large for the series");
  const FourierGrid grid(n);
  const Eigen::Index half = grid.half();
  const ComplexVector full = dft(c);

  BoundaryDft out{grid, full.segment(1, half), ComplexVector::Zero(half), ComplexVector::Zero(half)};
  for (Eigen::Index j = 1; j <= half; ++j) {
    const double lam = grid.frequency(j);
    // Written for the e^{+i lambda t} transform, then conjugated.
    Complex phi_l(1.0, 0.0);
    for (int s = 1; s <= p; ++s) phi_l -= fit.phi[s - 1] * std::polar(1.0, -s * lam);
    Complex head(0.0, 0.0);
    Complex tail(0.0, 0.0);
    for (int l = 1; l <= p; ++l) {
      Complex inner_h(0.0, 0.0);
      Complex inner_t(0.0, 0.0);
      for (int s = 0; s <= p - l; ++s) {
        inner_h += fit.phi[l + s - 1] * std::polar(1.0, -s * lam);
        inner_t += fit.phi[l + s - 1] * std::polar(1.0, (s + 1) * lam);
      }
      head += x[l - 1] * inner_h;
      tail += x[n - l] * inner_t;
    }
    const Complex plus = head / phi_l +
                         std::polar(1.0, static_cast<double>(n) * lam) * tail / std::conj(phi_l);
    out.j_hat[j - 1] = std::conj(plus);
  }
  out.j_tilde = out.j + out.j_hat;
  return out;
}

BoundaryPeriodogram boundary_periodogram(const TimeSeries& series, const YuleWalkerFit& fit) {
  const BoundaryDft d = boundary_extension_dft(series, fit);
  const double scale = 1.0 / (kTwoPi * static_cast<double>(d.grid.n()));
  ComplexVector v = d.j_tilde.cwiseProduct(d.j.conjugate()) * scale;
  if (fit.p == 0) {
    // Exact: J-hat vanishes, keep the ordinates bit-identical to the periodogram.
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = Complex(std::norm(d.j[k]) * scale, 0.0);
  }
  return {d.grid, std::move(v)};
}

}  // namespace whittleboot
