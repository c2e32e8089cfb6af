#pragma once

#include "whittleboot/types.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>

namespace whittleboot {

/// Batch evaluation of a family at L frequencies. Derivatives are of 1/f_theta;
/// the second derivative of frequency i is column i of inv_hess, stored as an
/// m x m matrix in column-major order.
struct FamilyEval {
  Vector f;         // L
  Matrix inv_grad;  // m x L
  Matrix inv_hess;  // (m*m) x L

  [[nodiscard]] Eigen::Map<const Matrix> hessian_at(Eigen::Index i, Eigen::Index m) const {
    return {inv_hess.col(i).data(), m, m};
  }
};

/// (1/2pi) * integral of log f_theta over (-pi, pi] and its derivatives.
struct LogIntegral {
  double value = 0.0;
  Vector grad;
  Matrix hess;
};

/// Parametric spectral densities {f_theta : theta in Theta}, Theta a box plus an
/// admissibility predicate.
class SpectralFamily {
 public:
  virtual ~SpectralFamily() = default;

  [[nodiscard]] virtual Eigen::Index dim() const = 0;
  [[nodiscard]] virtual std::string name() const = 0;
  /// m x 2 matrix of (lower, upper) per coordinate.
  [[nodiscard]] virtual Matrix bounds() const = 0;
  [[nodiscard]] virtual bool admissible(const Vector& theta) const = 0;
  /// order 0: f only; 1: plus inv_grad; 2: plus inv_hess.
  virtual void evaluate(const Vector& theta, std::span<const double> lambdas, int order,
                        FamilyEval& out) const = 0;

  /// True when f_theta is constant in lambda for every theta.
  [[nodiscard]] virtual bool is_flat() const { return false; }
  /// Closed form of the log-integral, if the family has one.
  [[nodiscard]] virtual std::optional<LogIntegral> log_integral(const Vector&) const {
    return std::nullopt;
  }
  /// A start inside Theta that does not depend on data.
  [[nodiscard]] virtual Vector box_center() const;
  /// Data-driven start from spectral values on the positive half of the n-grid.
  [[nodiscard]] virtual std::optional<Vector> moment_start(const Vector& spec,
                                                           Eigen::Index n) const {
    (void)spec;
    (void)n;
    return std::nullopt;
  }

  [[nodiscard]] double density(const Vector& theta, double lambda) const;
  /// d/dtheta (1/f_theta)(lambda).
  [[nodiscard]] Vector inverse_gradient(const Vector& theta, double lambda) const;
  [[nodiscard]] Matrix inverse_hessian(const Vector& theta, double lambda) const;
  /// d/dtheta log f_theta and its second derivative, from the inverse derivatives.
  [[nodiscard]] Vector log_gradient(const Vector& theta, double lambda) const;
  [[nodiscard]] Matrix log_hessian(const Vector& theta, double lambda) const;

  void require_admissible(const Vector& theta) const;
};

using FamilyPtr = std::shared_ptr<const SpectralFamily>;

/// theta = (sigma^2, a_1..a_p); f = sigma^2 / (2 pi) |1 - sum a_k e^{-ik lambda}|^{-2}.
/// p = 0 is white noise.
class ARFamily final : public SpectralFamily {
 public:
  explicit ARFamily(int p);

  [[nodiscard]] int order() const { return p_; }
  [[nodiscard]] Eigen::Index dim() const override { return p_ + 1; }
  [[nodiscard]] std::string name() const override { return "ar:" + std::to_string(p_); }
  [[nodiscard]] Matrix bounds() const override;
  /// Inside the box, sigma^2 > 0 and every AR root has modulus > kRootMargin.
  [[nodiscard]] bool admissible(const Vector& theta) const override;
  void evaluate(const Vector& theta, std::span<const double> lambdas, int order,
                FamilyEval& out) const override;
  [[nodiscard]] bool is_flat() const override { return p_ == 0; }
  [[nodiscard]] std::optional<LogIntegral> log_integral(const Vector& theta) const override;
  [[nodiscard]] Vector box_center() const override;
  [[nodiscard]] std::optional<Vector> moment_start(const Vector& spec,
                                                   Eigen::Index n) const override;

  static constexpr double kRootMargin = 1.001;

 private:
  int p_;
};

/// Smallest modulus among the roots of 1 - sum a_k z^k (infinity for p = 0).
double ar_min_root_modulus(const Vector& a);

/// f-bar_theta = Fejer kernel (length n) convolved with the base density, and
/// its derivatives. Flat base families are passed through untouched.
class DebiasedFamily final : public SpectralFamily {
 public:
  DebiasedFamily(FamilyPtr base, Eigen::Index n);

  [[nodiscard]] const SpectralFamily& base() const { return *base_; }
  [[nodiscard]] Eigen::Index sample_size() const { return n_; }
  [[nodiscard]] Eigen::Index quadrature_size() const { return quad_; }

  [[nodiscard]] Eigen::Index dim() const override { return base_->dim(); }
  [[nodiscard]] std::string name() const override { return base_->name() + "+debiased"; }
  [[nodiscard]] Matrix bounds() const override { return base_->bounds(); }
  [[nodiscard]] bool admissible(const Vector& theta) const override {
    return base_->admissible(theta);
  }
  void evaluate(const Vector& theta, std::span<const double> lambdas, int order,
                FamilyEval& out) const override;
  [[nodiscard]] bool is_flat() const override { return base_->is_flat(); }
  [[nodiscard]] std::optional<LogIntegral> log_integral(const Vector& theta) const override;
  [[nodiscard]] Vector box_center() const override { return base_->box_center(); }
  [[nodiscard]] std::optional<Vector> moment_start(const Vector& spec,
                                                   Eigen::Index n) const override {
    return base_->moment_start(spec, n);
  }

 private:
  FamilyPtr base_;
  Eigen::Index n_;
  Eigen::Index quad_;
};

/// Parses "ar:p" (or "ar(p)", "white").
FamilyPtr make_family(const std::string& spec);

/// g_theta(lambda) = -(1/2pi) d/dtheta (1/f_theta)(lambda).
Vector score_vector(const SpectralFamily& family, const Vector& theta, double lambda);
/// Scores at many frequencies: m x L.
Matrix score_matrix(const SpectralFamily& family, const Vector& theta,
                    std::span<const double> lambdas);

}  // namespace whittleboot
