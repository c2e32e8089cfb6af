#include "whittleboot/bootstrap.hpp"

#include "whittleboot/boundary.hpp"
#include "whittleboot/parallel.hpp"
#include "whittleboot/yule_walker.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace whittleboot {

// ---------------------------------------------------------------- config

Variant Variant::parse(const std::string& text) {
  std::string s;
  for (char c : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  auto number = [&](const char* what) {
    try {
      std::size_t used = 0;
      const double v = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(what);
      return v;
    } catch (const std::exception&) {
      throw InvalidInput("variant '" + text + "': bad " + what);
    }
  };
  if (head == "standard" && arg.empty()) return standard();
  if (head == "debiased" && arg.empty()) return debiased();
  if (head == "tapered") {
    const double rho = arg.empty() ? 0.5 : number("taper proportion");
    if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidInput("taper proportion must lie in [0, 1]");
    return tapered(rho);
  }
  if (head == "boundary") {
    if (arg.empty()) return boundary();
    const double p = number("AR order");
    if (p < 0 || p != std::floor(p)) throw InvalidInput("boundary AR order must be a nonnegative integer");
    return boundary(static_cast<int>(p));
  }
  throw InvalidInput("unknown variant '" + text + "'");
}

std::string Variant::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::standard: os << "standard"; break;
    case Kind::debiased: os << "debiased"; break;
    case Kind::tapered:
      os << "tapered:" << (taper.kind == TaperSpec::Kind::rectangular ? 0.0 : taper.proportion);
      break;
    case Kind::boundary:
      os << "boundary";
      if (ar_order) os << ":" << *ar_order;
      break;
  }
  return os.str();
}

Eigen::Index default_block_length(Eigen::Index n) {
  const auto b = static_cast<Eigen::Index>(std::llround(4.0 * std::pow(static_cast<double>(n), 0.25)));
  return std::clamp<Eigen::Index>(b, 4, n);
}

void BootstrapConfig::validate(Eigen::Index n) const {
  const Eigen::Index bb = block_length(n);
  if (bb < 4 || bb > n) {
    throw InvalidInput("block length b=" + std::to_string(bb) + " must lie in [4, " + std::to_string(n) + "]");
  }
  if (B < 100) throw InvalidInput("B must be at least 100, got " + std::to_string(B));
  if (bandwidth && !(*bandwidth > 0.0)) throw InvalidInput("bandwidth must be positive");
  if (!(max_discard_fraction >= 0.0 && max_discard_fraction < 1.0)) {
    throw InvalidInput("max_discard_fraction must lie in [0, 1)");
  }
}

// ---------------------------------------------------------------- replicates

Vector mult_pseudo_periodogram(const Vector& fhat, Rng& rng) {
  std::exponential_distribution<double> exp1(1.0);
  Vector out(fhat.size());
  for (Eigen::Index j = 0; j < fhat.size(); ++j) out[j] = fhat[j] * exp1(rng);
  return out;
}

Matrix v1_star(const SpectralFamily& family, const Vector& theta0, const FourierGrid& grid,
               const Vector& fhat) {
  const Vector lam = grid.positive_frequencies();
  const Matrix g = score_matrix(family, theta0, std::span<const double>(lam.data(), static_cast<std::size_t>(lam.size())));
  const Vector w = fhat.array().square();
  // Mirror symmetry: G(n) counts each positive frequency twice.
  const Matrix v = (2.0 * 8.0 * kPi * kPi / static_cast<double>(grid.n())) * g * w.asDiagonal() * g.transpose();
  return symmetrize(v);
}

Matrix w_star(const SpectralFamily& family, const Vector& theta0, const FourierGrid& grid,
              const Vector& pseudo, LogTerm log_term) {
  return whittle_hessian(family, theta0, grid, pseudo, log_term);
}

namespace {

ParamEstimate refit(const SpectralFamily& family, const FourierGrid& grid, const Vector& spec,
                    const Vector& theta0, LogTerm log_term) {
  MinimizeOptions opt;
  opt.log_term = log_term;
  opt.multi_start = false;
  ParamEstimate e = minimize_whittle(family, grid, spec, theta0, opt);
  if (!e.converged) {
    opt.multi_start = true;
    e = minimize_whittle(family, grid, spec, theta0, opt);
  }
  return e;
}

}  // namespace

ThetaStar bootstrap_theta_star(const SpectralFamily& family, const FourierGrid& grid,
                               const Vector& fhat, const Vector& theta0, Rng& rng,
                               LogTerm log_term) {
  ThetaStar t;
  t.pseudo = mult_pseudo_periodogram(fhat, rng);
  const ParamEstimate e = refit(family, grid, t.pseudo, theta0, log_term);
  t.theta = e.theta;
  t.converged = e.converged;
  return t;
}

Vector z_star(const Matrix& V1, const Matrix& W, const Vector& theta_star, const Vector& theta0,
              Eigen::Index n) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(V1));
  const double lo = es.eigenvalues().minCoeff();
  if (!(lo > 1e-10 * V1.trace())) {
    std::ostringstream os;
    os << "V1* is ill-conditioned: smallest eigenvalue " << lo << " vs trace " << V1.trace();
    throw NumericFailure(os.str());
  }
  const Vector r = es.eigenvalues().cwiseSqrt().cwiseInverse();
  const Matrix inv_sqrt = es.eigenvectors() * r.asDiagonal() * es.eigenvectors().transpose();
  return inv_sqrt * (W * (std::sqrt(static_cast<double>(n)) * (theta_star - theta0)));
}

// ---------------------------------------------------------------- convolved subsampling

SubsampleContext subsample_context(const TimeSeries& series, const SpectralDensityEstimate& fhat,
                                   const SpectralFamily& family, const Vector& theta0,
                                   Eigen::Index b, const std::optional<TaperSpec>& taper) {
  const SubsamplePeriodograms win = subsample_periodograms(series, b, taper);
  SubsampleContext ctx;
  ctx.n = series.size();
  ctx.b = b;
  ctx.k = ctx.n / b;
  ctx.grid = win.grid;
  ctx.fhat = fhat.on_grid(win.grid);
  ctx.ftilde = subsample_mean_spectrum(win).ordinates;
  const double top = ctx.ftilde.maxCoeff();
  if (!(top > 0.0)) throw DegenerateInput("all window periodograms vanish");
  // Same relative floor as f-hat.
  ctx.ftilde = ctx.ftilde.cwiseMax(kSpectralFloor * top);
  ctx.U = win.ordinates * ctx.ftilde.cwiseInverse().asDiagonal();
  const Vector lam = win.grid.positive_frequencies();
  ctx.g = score_matrix(family, theta0, std::span<const double>(lam.data(), static_cast<std::size_t>(lam.size())));
  const Matrix gf = ctx.g * ctx.fhat.asDiagonal();  // m x Nb
  ctx.y = (ctx.U.array() - 1.0).matrix() * gf.transpose();
  return ctx;
}

Vector convolved_m_plus(const SubsampleContext& ctx, Rng& rng) {
  std::uniform_int_distribution<Eigen::Index> pick(0, ctx.y.rows() - 1);
  Vector sum = Vector::Zero(ctx.y.cols());
  for (Eigen::Index l = 0; l < ctx.k; ++l) sum += ctx.y.row(pick(rng)).transpose();
  const double kb = static_cast<double>(ctx.k * ctx.b);
  // Each window contributes (2 pi / b) sum over G(b) = 2 (2 pi / b) y.
  return std::sqrt(kb) / static_cast<double>(ctx.k) * (2.0 * kTwoPi / static_cast<double>(ctx.b)) * sum;
}

Matrix sigma_plus(const SubsampleContext& ctx) {
  const double T = static_cast<double>(ctx.y.rows());
  const Matrix s = (16.0 * kPi * kPi / static_cast<double>(ctx.b)) * (ctx.y.transpose() * ctx.y) / T;
  return symmetrize(s);
}

Matrix c_plus(const SubsampleContext& ctx) {
  const Vector m2 = ctx.U.array().square().colwise().mean().transpose();
  const Vector w = ctx.fhat.array().square() * (m2.array() - 1.0);
  const Matrix c = (16.0 * kPi * kPi / static_cast<double>(ctx.b)) * ctx.g * w.asDiagonal() * ctx.g.transpose();
  return symmetrize(c);
}

Matrix v2_plus(const Matrix& sigma, const Matrix& c) {
  if (sigma.rows() != c.rows() || sigma.cols() != c.cols()) throw InvalidInput("shape mismatch in V2+");
  return symmetrize(sigma - c);
}

// ---------------------------------------------------------------- assembly

Vector assemble_l_star(const Matrix& W, const Matrix& V1, const Matrix& V2, const Vector& z,
                       double* clamped_mass) {
  const Eigen::JacobiSVD<Matrix> svd(W);
  const Vector sv = svd.singularValues();
  const double cond = sv.minCoeff() > 0.0 ? sv.maxCoeff() / sv.minCoeff() : std::numeric_limits<double>::infinity();
  if (!(cond < 1e12)) {
    std::ostringstream os;
    os << "W* is singular (condition number " << cond << ")";
    throw NumericFailure(os.str());
  }
  const PsdProjection p = psd_project(symmetrize(V1 + V2));
  if (clamped_mass) *clamped_mass = p.clamped_mass;
  return W.partialPivLu().solve(psd_sqrt(p.matrix) * z);
}

Matrix w_hat_star(const Matrix& V1, const Matrix& sigma) {
  const Matrix r = psd_sqrt(V1);
  const Matrix S = symmetrize(r * sigma * r);
  return symmetrize(r * psd_inv_sqrt(S) * r);
}

// ---------------------------------------------------------------- distribution

double sample_quantile(std::vector<double> v, double p) {
  if (v.empty()) throw InvalidInput("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("quantile level must lie in [0, 1]");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double BootstrapDistribution::quantile(Eigen::Index coord, double p) const {
  if (coord < 0 || coord >= samples.cols()) throw InvalidInput("coordinate out of range");
  const Vector c = samples.col(coord);
  return sample_quantile(std::vector<double>(c.data(), c.data() + c.size()), p);
}

std::pair<double, double> BootstrapDistribution::percentile_ci(Eigen::Index coord, double level,
                                                               double estimate, Eigen::Index n) const {
  if (!(level > 0.0 && level < 1.0)) throw InvalidInput("confidence level must lie in (0, 1)");
  const double a = (1.0 - level) / 2.0;
  const double rn = std::sqrt(static_cast<double>(n));
  return {estimate - quantile(coord, 1.0 - a) / rn, estimate - quantile(coord, a) / rn};
}

// ---------------------------------------------------------------- pipeline

namespace {

struct Replicate {
  Vector theta;
  Matrix W;
  Vector m_tilde;  // boundary: centered score sum for the empirical V1*
  int discarded = 0;
};

}  // namespace

VariantFit fit_variant(const TimeSeries& series, const FamilyPtr& base_family,
                       const BootstrapConfig& config) {
  if (!base_family) throw InvalidInput("no spectral family given");
  const Eigen::Index n = series.size();
  config.validate(n);
  const Variant& variant = config.variant;
  const TimeSeries centered = series.centered();
  VariantFit v(centered, periodogram(centered));

  v.family = base_family;
  if (variant.kind == Variant::Kind::debiased) v.family = std::make_shared<DebiasedFamily>(base_family, n);
  if (config.log_term == LogTerm::kolmogorov && !v.family->log_integral(v.family->box_center())) {
    throw InvalidInput("log-integral objective is not available for " + v.family->name());
  }

  // f-hat always comes from the untapered periodogram.
  v.bandwidth = config.bandwidth ? *config.bandwidth : cv_bandwidth(v.I, default_bandwidth_grid(n));
  v.fhat = kernel_spectral_estimate(v.I, v.bandwidth);

  MinimizeOptions opt;
  opt.log_term = config.log_term;

  v.data_spec = v.I.ordinates;
  if (variant.kind == Variant::Kind::tapered) {
    v.taper = taper_weights(variant.taper, n);
    v.data_spec = tapered_periodogram(v.x, *v.taper).ordinates;
  } else if (variant.kind == Variant::Kind::boundary) {
    const int p = variant.ar_order ? *variant.ar_order : select_ar_order_aic(v.x, default_max_ar_order(n));
    v.yw = yule_walker(v.x, p);
    v.ar_order = p;
    v.data_spec = boundary_periodogram(v.x, v.yw).real_part().ordinates;
  }
  v.fit = minimize_whittle(*v.family, v.I.grid, v.data_spec, opt);
  v.centre = pseudo_true_parameter(*v.family, *v.fhat, opt);
  return v;
}

BootstrapResult run_hybrid_bootstrap(const TimeSeries& series, const FamilyPtr& base_family,
                                     const BootstrapConfig& config) {
  const VariantFit vf = fit_variant(series, base_family, config);
  const Eigen::Index n = series.size();
  const Variant& variant = config.variant;
  const TimeSeries& x = vf.x;
  const Periodogram& I = vf.I;
  const FourierGrid& grid = I.grid;
  const FamilyPtr& family = vf.family;

  BootstrapResult res;
  BootstrapComponents& comp = res.components;
  comp.n = n;
  comp.bandwidth = vf.bandwidth;
  comp.ar_order = vf.ar_order;
  const SpectralDensityEstimate& fhat = *vf.fhat;
  const Vector fvals = fhat.positive_values();

  MinimizeOptions opt;
  opt.log_term = config.log_term;

  const std::optional<Taper>& taper = vf.taper;
  std::optional<TaperSpec> window_taper;
  if (taper) window_taper = variant.taper;
  const YuleWalkerFit& yw = vf.yw;
  const ParamEstimate& fit = vf.fit;
  comp.theta_hat = fit.theta;

  // Centering.
  const ParamEstimate& centre = vf.centre;
  if (!centre.converged) throw NumericFailure("minimizer of D_n(theta, f-hat) did not converge");
  const Vector theta0 = centre.theta;
  comp.theta0 = theta0;
  const Eigen::Index m = family->dim();

  // Subsampling matrices.
  const Eigen::Index b = config.block_length(n);
  const SubsampleContext ctx = subsample_context(x, fhat, *family, theta0, b, window_taper);
  comp.b = b;
  comp.k = ctx.k;
  comp.b3_over_n = std::pow(static_cast<double>(b), 3) / static_cast<double>(n);
  comp.Sigma_plus = sigma_plus(ctx);
  comp.C_plus = c_plus(ctx);
  comp.V2_plus = v2_plus(comp.Sigma_plus, comp.C_plus);

  if (variant.kind == Variant::Kind::tapered) {
    comp.V1_star = v1_star_tapered(*family, theta0, fhat, *taper);
  } else if (variant.kind != Variant::Kind::boundary) {
    comp.V1_star = v1_star(*family, theta0, grid, fvals);
  }

  // Replicates.
  const auto B = static_cast<std::size_t>(config.B);
  const int max_attempts = std::max(1, static_cast<int>(std::ceil(config.max_discard_fraction * static_cast<double>(B)))) + 1;
  std::vector<Replicate> reps(B);
  const Vector lam = grid.positive_frequencies();
  const Matrix g0 = score_matrix(*family, theta0, std::span<const double>(lam.data(), static_cast<std::size_t>(lam.size())));
  parallel_for(B, [&](std::size_t r) {
    Replicate& rep = reps[r];
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
      Rng rng = stream_rng(config.seed, Stream::replicate, r, static_cast<std::uint64_t>(attempt));
      Vector pseudo;
      switch (variant.kind) {
        case Variant::Kind::standard:
        case Variant::Kind::debiased:
          pseudo = mult_pseudo_periodogram(fvals, rng);
          break;
        case Variant::Kind::tapered:
          pseudo = tapered_pseudo_periodogram(gaussian_pseudo_series(fhat, rng).series, *taper).ordinates;
          break;
        case Variant::Kind::boundary: {
          const TimeSeries xs = gaussian_pseudo_series(fhat, rng).series;
          YuleWalkerFit ys;
          try {
            ys = yule_walker(xs, yw.p);
          } catch (const NumericFailure&) {
            ++rep.discarded;
            continue;
          }
          pseudo = boundary_periodogram(xs, ys).real_part().ordinates;
          break;
        }
      }
      const ParamEstimate e = refit(*family, grid, pseudo, theta0, config.log_term);
      if (!e.converged) {
        ++rep.discarded;
        continue;
      }
      rep.theta = e.theta;
      rep.W = w_star(*family, theta0, grid, pseudo, config.log_term);
      if (variant.kind == Variant::Kind::boundary) {
        rep.m_tilde = (2.0 * kTwoPi / std::sqrt(static_cast<double>(n))) * g0 * (pseudo - fvals);
      }
      return;
    }
    throw NumericFailure("bootstrap replicate " + std::to_string(r) + " failed to converge in " +
                         std::to_string(max_attempts) + " attempts");
  });

  for (const Replicate& rep : reps) comp.discarded += rep.discarded;
  if (static_cast<double>(comp.discarded) > config.max_discard_fraction * static_cast<double>(B)) {
    throw NumericFailure("discarded " + std::to_string(comp.discarded) + " of " + std::to_string(B) +
                         " bootstrap replicates (limit " +
                         std::to_string(config.max_discard_fraction * 100.0) + "%)");
  }

  if (variant.kind == Variant::Kind::boundary) {
    // No closed form: empirical covariance of the replicate score sums.
    Vector mean = Vector::Zero(m);
    for (const Replicate& rep : reps) mean += rep.m_tilde;
    mean /= static_cast<double>(B);
    Matrix cov = Matrix::Zero(m, m);
    for (const Replicate& rep : reps) cov += (rep.m_tilde - mean) * (rep.m_tilde - mean).transpose();
    comp.V1_star = symmetrize(cov / static_cast<double>(B - 1));
  }

  comp.Z_star.resize(static_cast<Eigen::Index>(B), m);
  comp.theta_star.resize(static_cast<Eigen::Index>(B), m);
  res.distribution.samples.resize(static_cast<Eigen::Index>(B), m);
  comp.W_star_mean = Matrix::Zero(m, m);
  double clamped = 0.0;
  for (std::size_t r = 0; r < B; ++r) {
    const Replicate& rep = reps[r];
    const auto i = static_cast<Eigen::Index>(r);
    const Vector z = z_star(comp.V1_star, rep.W, rep.theta, theta0, n);
    comp.Z_star.row(i) = z.transpose();
    comp.theta_star.row(i) = rep.theta.transpose();
    res.distribution.samples.row(i) = assemble_l_star(rep.W, comp.V1_star, comp.V2_plus, z, &clamped).transpose();
    comp.W_star_mean += rep.W;
    const Eigen::JacobiSVD<Matrix> svd(rep.W);
    comp.W_star_max_condition = std::max(comp.W_star_max_condition,
                                         svd.singularValues().maxCoeff() / svd.singularValues().minCoeff());
  }
  comp.W_star_mean /= static_cast<double>(B);
  comp.psd_clamped_mass = clamped;
  if (!res.distribution.samples.allFinite()) throw NumericFailure("non-finite bootstrap draw");
  return res;
}

BootstrapResult run_variant_bootstrap(const TimeSeries& series, const FamilyPtr& family,
                                      const BootstrapConfig& config) {
  if (config.variant.kind == Variant::Kind::standard) {
    throw InvalidInput("run_variant_bootstrap needs a non-standard variant");
  }
  return run_hybrid_bootstrap(series, family, config);
}

}  // namespace whittleboot
