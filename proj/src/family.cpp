#include "whittleboot/family.hpp"

#include "whittleboot/spectral.hpp"
#include "whittleboot/yule_walker.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace whittleboot {

// ---------------------------------------------------------------- base helpers

Vector SpectralFamily::box_center() const {
  const Matrix b = bounds();
  return (b.col(0) + b.col(1)) / 2.0;
}

double SpectralFamily::density(const Vector& theta, double lambda) const {
  FamilyEval e;
  evaluate(theta, std::span<const double>(&lambda, 1), 0, e);
  return e.f[0];
}

Vector SpectralFamily::inverse_gradient(const Vector& theta, double lambda) const {
  FamilyEval e;
  evaluate(theta, std::span<const double>(&lambda, 1), 1, e);
  return e.inv_grad.col(0);
}

Matrix SpectralFamily::inverse_hessian(const Vector& theta, double lambda) const {
  FamilyEval e;
  evaluate(theta, std::span<const double>(&lambda, 1), 2, e);
  return e.hessian_at(0, dim());
}

Vector SpectralFamily::log_gradient(const Vector& theta, double lambda) const {
  FamilyEval e;
  evaluate(theta, std::span<const double>(&lambda, 1), 1, e);
  return -e.f[0] * e.inv_grad.col(0);
}

Matrix SpectralFamily::log_hessian(const Vector& theta, double lambda) const {
  FamilyEval e;
  evaluate(theta, std::span<const double>(&lambda, 1), 2, e);
  const double f = e.f[0];
  const Vector d = e.inv_grad.col(0);
  return -f * Matrix(e.hessian_at(0, dim())) + f * f * d * d.transpose();
}

void SpectralFamily::require_admissible(const Vector& theta) const {
  if (theta.size() != dim()) {
    throw InvalidInput(name() + ": parameter has dimension " + std::to_string(theta.size()) +
                       ", expected " + std::to_string(dim()));
  }
  if (!admissible(theta)) throw DomainError(name() + ": parameter outside the admissible set");
}

// ---------------------------------------------------------------- AR(p)

double ar_min_root_modulus(const Vector& a) {
  const Eigen::Index p = a.size();
  if (p == 0) return std::numeric_limits<double>::infinity();
  if (p == 1) return a[0] == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / std::abs(a[0]);
  // Companion eigenvalues are the reciprocal roots.
  Matrix comp = Matrix::Zero(p, p);
  comp.row(0) = a.transpose();
  comp.bottomLeftCorner(p - 1, p - 1).setIdentity();
  const Eigen::EigenSolver<Matrix> es(comp, false);
  const double r = es.eigenvalues().cwiseAbs().maxCoeff();
  return r == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / r;
}

ARFamily::ARFamily(int p) : p_(p) {
  if (p < 0) throw InvalidInput("AR order must be nonnegative");
}

Matrix ARFamily::bounds() const {
  Matrix b(dim(), 2);
  b(0, 0) = 1e-12;
  b(0, 1) = 1e12;
  // |a_k| <= C(p, k) holds on the whole stationarity region.
  double binom = 1.0;
  for (int k = 1; k <= p_; ++k) {
    binom = binom * (p_ - k + 1) / k;
    b(k, 0) = -binom;
    b(k, 1) = binom;
  }
  return b;
}

bool ARFamily::admissible(const Vector& theta) const {
  if (theta.size() != dim() || !theta.allFinite()) return false;
  const Matrix b = bounds();
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (theta[i] < b(i, 0) || theta[i] > b(i, 1)) return false;
  }
  if (!(theta[0] > 0.0)) return false;
  return ar_min_root_modulus(theta.tail(p_)) > kRootMargin;
}

void ARFamily::evaluate(const Vector& theta, std::span<const double> lambdas, int order,
                        FamilyEval& out) const {
  const auto L = static_cast<Eigen::Index>(lambdas.size());
  const Eigen::Index m = dim();
  const double s2 = theta[0];
  out.f.resize(L);
  if (order >= 1) out.inv_grad.resize(m, L);
  if (order >= 2) out.inv_hess.resize(m * m, L);
  Vector ck(p_ + 1);
  Vector sk(p_ + 1);
  Vector dq(p_);
  for (Eigen::Index i = 0; i < L; ++i) {
    const double lam = lambdas[static_cast<std::size_t>(i)];
    double c = 1.0;
    double s = 0.0;
    for (int k = 1; k <= p_; ++k) {
      ck[k] = std::cos(k * lam);
      sk[k] = std::sin(k * lam);
      c -= theta[k] * ck[k];
      s += theta[k] * sk[k];
    }
    const double q = c * c + s * s;
    out.f[i] = s2 / (kTwoPi * q);
    if (order < 1) continue;
    for (int k = 1; k <= p_; ++k) dq[k - 1] = -2.0 * c * ck[k] + 2.0 * s * sk[k];
    out.inv_grad(0, i) = -kTwoPi * q / (s2 * s2);
    for (int k = 1; k <= p_; ++k) out.inv_grad(k, i) = kTwoPi * dq[k - 1] / s2;
    if (order < 2) continue;
    Eigen::Map<Matrix> h(out.inv_hess.col(i).data(), m, m);
    h(0, 0) = 2.0 * kTwoPi * q / (s2 * s2 * s2);
    for (int k = 1; k <= p_; ++k) {
      h(0, k) = h(k, 0) = -kTwoPi * dq[k - 1] / (s2 * s2);
      for (int l = k; l <= p_; ++l) {
        h(k, l) = h(l, k) = kTwoPi * 2.0 * std::cos((k - l) * lam) / s2;
      }
    }
  }
}

std::optional<LogIntegral> ARFamily::log_integral(const Vector& theta) const {
  // Kolmogorov: (1/2pi) int log f = log(sigma^2 / 2pi) for a causal AR.
  LogIntegral li;
  li.value = std::log(theta[0] / kTwoPi);
  li.grad = Vector::Zero(dim());
  li.grad[0] = 1.0 / theta[0];
  li.hess = Matrix::Zero(dim(), dim());
  li.hess(0, 0) = -1.0 / (theta[0] * theta[0]);
  return li;
}

Vector ARFamily::box_center() const {
  Vector c = Vector::Zero(dim());
  c[0] = 1.0;
  return c;
}

std::optional<Vector> ARFamily::moment_start(const Vector& spec, Eigen::Index n) const {
  const FourierGrid grid(n);
  if (spec.size() != grid.half()) return std::nullopt;
  Vector acov(p_ + 1);
  for (int h = 0; h <= p_; ++h) {
    double sum = 0.0;
    for (Eigen::Index j = 1; j <= grid.half(); ++j) sum += spec[j - 1] * std::cos(h * grid.frequency(j));
    acov[h] = 2.0 * kTwoPi * sum / static_cast<double>(n);
  }
  try {
    const YuleWalkerFit yw = yule_walker_from_acov(acov, p_);
    Vector theta(dim());
    theta[0] = yw.sigma2;
    theta.tail(p_) = yw.phi;
    if (!admissible(theta)) return std::nullopt;
    return theta;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------- debiased

namespace {

Eigen::Index next_pow2(Eigen::Index v) {
  Eigen::Index p = 1;
  while (p < v) p <<= 1;
  return p;
}

// (2pi/M) sum_k phi(omega_k) e^{i h omega_k}, h = 0..n-1; phi even so the sum is real.
Vector autocov_from_samples(const Vector& phi, Eigen::Index n) {
  const Eigen::Index M = phi.size();
  const ComplexVector F =
      fft_forward(std::span<const double>(phi.data(), static_cast<std::size_t>(M)));
  Vector g(n);
  for (Eigen::Index h = 0; h < n; ++h) g[h] = F[h].real() * kTwoPi / static_cast<double>(M);
  return g;
}

bool on_fourier_grid(std::span<const double> lambdas, Eigen::Index n) {
  const FourierGrid grid(n);
  if (static_cast<Eigen::Index>(lambdas.size()) != grid.half()) return false;
  for (Eigen::Index j = 1; j <= grid.half(); ++j) {
    if (std::abs(lambdas[static_cast<std::size_t>(j - 1)] - grid.frequency(j)) > 1e-12) return false;
  }
  return true;
}

// f-bar at the requested frequencies from gamma(0..n-1) via the Fejer-weighted sum.
Vector fejer_sum(const Vector& gamma, std::span<const double> lambdas, bool grid_layout) {
  const Eigen::Index n = gamma.size();
  const auto L = static_cast<Eigen::Index>(lambdas.size());
  const double nd = static_cast<double>(n);
  Vector out(L);
  if (grid_layout) {
    // Fold lags h and h - n onto one length-n transform.
    Vector a(n);
    a[0] = gamma[0];
    for (Eigen::Index r = 1; r < n; ++r) {
      a[r] = (1.0 - r / nd) * gamma[r] + (r / nd) * gamma[n - r];
    }
    const ComplexVector F = fft_forward(std::span<const double>(a.data(), static_cast<std::size_t>(n)));
    for (Eigen::Index j = 0; j < L; ++j) out[j] = F[j + 1].real() / kTwoPi;
    return out;
  }
  for (Eigen::Index i = 0; i < L; ++i) {
    const double lam = lambdas[static_cast<std::size_t>(i)];
    double s = gamma[0];
    for (Eigen::Index h = 1; h < n; ++h) s += 2.0 * (1.0 - h / nd) * gamma[h] * std::cos(h * lam);
    out[i] = s / kTwoPi;
  }
  return out;
}

}  // namespace

DebiasedFamily::DebiasedFamily(FamilyPtr base, Eigen::Index n)
    : base_(std::move(base)), n_(n), quad_(next_pow2(8 * n)) {
  if (!base_) throw InvalidInput("debiased family needs a base family");
  if (n < 4) throw InvalidInput("debiased family needs n >= 4");
}

void DebiasedFamily::evaluate(const Vector& theta, std::span<const double> lambdas, int order,
                              FamilyEval& out) const {
  if (base_->is_flat()) {
    base_->evaluate(theta, lambdas, order, out);
    return;
  }
  const Eigen::Index m = dim();
  const Eigen::Index M = quad_;
  Vector omega(M);
  for (Eigen::Index k = 0; k < M; ++k) omega[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(M);
  FamilyEval be;
  base_->evaluate(theta, std::span<const double>(omega.data(), static_cast<std::size_t>(M)), order, be);

  const bool grid_layout = on_fourier_grid(lambdas, n_);
  const auto L = static_cast<Eigen::Index>(lambdas.size());
  auto smooth = [&](const Vector& phi) { return fejer_sum(autocov_from_samples(phi, n_), lambdas, grid_layout); };

  const Vector fb = smooth(be.f);
  if (!(fb.minCoeff() > 0.0)) throw NumericFailure("debiased density is not positive");
  out.f = fb;
  if (order < 1) return;

  // df = -f^2 d(1/f); d2f = 2 f^3 d(1/f) d(1/f)^T - f^2 d2(1/f).
  const Vector f2 = be.f.array().square();
  Matrix dfb(m, L);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Vector d = -(f2.array() * be.inv_grad.row(r).transpose().array()).matrix();
    dfb.row(r) = smooth(d).transpose();
  }
  out.inv_grad.resize(m, L);
  for (Eigen::Index i = 0; i < L; ++i) out.inv_grad.col(i) = -dfb.col(i) / (fb[i] * fb[i]);
  if (order < 2) return;

  const Vector f3 = f2.cwiseProduct(be.f);
  out.inv_hess.resize(m * m, L);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = r; c < m; ++c) {
      const Vector d = (2.0 * f3.array() * be.inv_grad.row(r).transpose().array() *
                            be.inv_grad.row(c).transpose().array() -
                        f2.array() * be.inv_hess.row(r + c * m).transpose().array())
                           .matrix();
      const Vector s = smooth(d);
      for (Eigen::Index i = 0; i < L; ++i) {
        const double fi = fb[i];
        const double v = 2.0 * dfb(r, i) * dfb(c, i) / (fi * fi * fi) - s[i] / (fi * fi);
        out.inv_hess(r + c * m, i) = v;
        out.inv_hess(c + r * m, i) = v;
      }
    }
  }
}

std::optional<LogIntegral> DebiasedFamily::log_integral(const Vector& theta) const {
  if (base_->is_flat()) return base_->log_integral(theta);
  return std::nullopt;
}

// ---------------------------------------------------------------- helpers

FamilyPtr make_family(const std::string& spec) {
  std::string s;
  for (char ch : spec) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(static_cast<char>(std::tolower(ch)));
  }
  if (s == "white" || s == "wn") return std::make_shared<ARFamily>(0);
  std::string digits;
  if (s.rfind("ar:", 0) == 0) {
    digits = s.substr(3);
  } else if (s.rfind("ar(", 0) == 0 && s.back() == ')') {
    digits = s.substr(3, s.size() - 4);
  } else {
    throw InvalidInput("unknown family '" + spec + "' (expected ar:p)");
  }
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw InvalidInput("bad AR order in family '" + spec + "'");
  }
  return std::make_shared<ARFamily>(std::stoi(digits));
}

Vector score_vector(const SpectralFamily& family, const Vector& theta, double lambda) {
  return -family.inverse_gradient(theta, lambda) / kTwoPi;
}

Matrix score_matrix(const SpectralFamily& family, const Vector& theta,
                    std::span<const double> lambdas) {
  FamilyEval e;
  family.evaluate(theta, lambdas, 1, e);
  return -e.inv_grad / kTwoPi;
}

}  // namespace whittleboot
