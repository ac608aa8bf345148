#include "rdcov/dgp.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rdcov/error.hpp"
#include "rdcov/normal.hpp"
#include "rdcov/quadrature.hpp"
#include "rdcov/rng.hpp"

namespace rdcov {

namespace {

constexpr double kCondLimit = 1e10;

Eigen::VectorXd design_vec(double u, Side side, int order) {
  const double t = side == Side::plus ? 1.0 : 0.0;
  Eigen::VectorXd v(order == 1 ? 4 : 6);
  v(0) = 1.0;
  v(1) = t;
  v(2) = u;
  v(3) = t * u;
  if (order == 2) {
    v(4) = u * u;
    v(5) = t * u * u;
  }
  return v;
}

// Integral over [-1,1] of an integrand evaluated with the explicit side, so
// that the endpoint u = 0 of the left half uses the left limit.
double integrate_two_sided(const std::function<double(double, Side)>& g,
                           double tol) {
  return adaptive_simpson([&](double u) { return g(u, Side::minus); }, -1.0,
                          0.0, tol) +
         adaptive_simpson([&](double u) { return g(u, Side::plus); }, 0.0, 1.0,
                          tol);
}

const Eigen::VectorXd& loading(const DgpSpec& dgp, Side side) {
  return side == Side::plus ? dgp.gamma_plus : dgp.gamma_minus;
}

// Solves the symmetric system G x = b with a condition guard.
Eigen::VectorXd solve_symmetric(const Eigen::MatrixXd& G,
                                const Eigen::VectorXd& b, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const auto& ev = es.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (!(lo > 0.0) || hi / lo >= kCondLimit) {
    throw Error(ErrorCode::singular,
                std::string(what) + ": population Gram matrix is singular or "
                                    "ill-conditioned");
  }
  return es.eigenvectors() *
         (es.eigenvectors().transpose() * b).cwiseQuotient(ev).matrix();
}

}  // namespace

// ---------------------------------------------------------------------------
// RunningDensity

RunningDensity RunningDensity::uniform() {
  RunningDensity d;
  d.kind_ = DensityKind::uniform;
  return d;
}

RunningDensity RunningDensity::truncated_normal(double mean, double sd) {
  if (!(sd > 0.0)) {
    throw Error(ErrorCode::range, "truncated normal needs sd > 0");
  }
  RunningDensity d;
  d.kind_ = DensityKind::truncated_normal;
  d.mean_ = mean;
  d.sd_ = sd;
  d.cdf_lo_ = normal_cdf((-1.0 - mean) / sd);
  d.mass_ = normal_cdf((1.0 - mean) / sd) - d.cdf_lo_;
  return d;
}

double RunningDensity::pdf(double x) const {
  if (x < -1.0 || x > 1.0) return 0.0;
  if (kind_ == DensityKind::uniform) return 0.5;
  const double t = (x - mean_) / sd_;
  return normal_pdf(t) / (sd_ * mass_);
}

double RunningDensity::pdf_derivative(double x, int order) const {
  if (order < 0 || order > 2) {
    throw Error(ErrorCode::range, "pdf_derivative: order must be 0..2");
  }
  if (order == 0) return pdf(x);
  if (kind_ == DensityKind::uniform) return 0.0;
  const double t = (x - mean_) / sd_;
  const double base = pdf(x);
  if (order == 1) return -t / sd_ * base;
  return (t * t - 1.0) / (sd_ * sd_) * base;
}

double RunningDensity::cdf(double x) const {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (kind_ == DensityKind::uniform) return 0.5 * (x + 1.0);
  return (normal_cdf((x - mean_) / sd_) - cdf_lo_) / mass_;
}

double RunningDensity::inverse_cdf(double u) const {
  if (!(u > 0.0 && u < 1.0)) {
    throw Error(ErrorCode::range, "inverse_cdf: u must lie in (0,1)");
  }
  if (kind_ == DensityKind::uniform) return 2.0 * u - 1.0;
  return mean_ + sd_ * normal_quantile(cdf_lo_ + u * mass_);
}

// ---------------------------------------------------------------------------
// DgpSpec

void DgpSpec::validate() const {
  const int pp = p();
  if (sigma_z.rows() != pp || sigma_z.cols() != pp) {
    throw Error(ErrorCode::range, "sigma_z must be p x p");
  }
  if (gamma_plus.size() != pp || gamma_minus.size() != pp) {
    throw Error(ErrorCode::range, "loadings must have p entries");
  }
  if (sigma_eps < 0.0) {
    throw Error(ErrorCode::range, "sigma_eps must be non-negative");
  }
  if (!(x_density.pdf(0.0) > 0.0)) {
    throw Error(ErrorCode::range, "running density must be positive at 0");
  }
  for (int k = 0; k < pp; ++k) {
    const double l0 = mu_z[static_cast<std::size_t>(k)].left(0.0);
    const double r0 = mu_z[static_cast<std::size_t>(k)].right(0.0);
    if (std::abs(l0 - r0) > 1e-12 * std::max(1.0, std::abs(l0))) {
      throw Error(ErrorCode::range,
                  "covariate mean " + std::to_string(k + 1) +
                      " is discontinuous at the cutoff");
    }
  }
  if (pp > 0) {
    if (!sigma_z.isApprox(sigma_z.transpose(), 1e-12)) {
      throw Error(ErrorCode::range, "sigma_z must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_z);
    if (es.eigenvalues().minCoeff() < -1e-12) {
      throw Error(ErrorCode::range, "sigma_z must be positive semidefinite");
    }
  }
}

DgpSpec DgpSpec::dgp1() {
  DgpSpec d;
  d.x_density = RunningDensity::uniform();
  d.mu_z.resize(2);  // zero-mean covariates, independent of the running var
  d.sigma_z = Eigen::MatrixXd::Identity(2, 2);
  d.mean_right = Polynomial{1.0, 0.5, 1.0};
  d.mean_left = Polynomial{0.0, 0.3, -1.0};
  Eigen::VectorXd w(2);
  w << 1.0, -0.5;
  d.gamma_plus = 2.0 * w;
  d.gamma_minus = w;
  d.sigma_eps = 0.5;
  return d;
}

DgpSpec DgpSpec::dgp2() {
  DgpSpec d;
  d.x_density = RunningDensity::truncated_normal(0.5, 1.0);
  d.mu_z.resize(1);
  d.mu_z[0].right = Polynomial{0.0, 0.0, 2.0};  // curvature jump at the cutoff
  d.sigma_z = Eigen::MatrixXd::Identity(1, 1);
  d.mean_right = Polynomial{1.0, 0.5, 1.0};
  d.mean_left = Polynomial{0.0, 0.3, -1.0};
  d.gamma_plus = Eigen::VectorXd::Constant(1, 2.0);
  d.gamma_minus = Eigen::VectorXd::Constant(1, 1.0);
  d.sigma_eps = 0.5;
  return d;
}

// ---------------------------------------------------------------------------
// Conditional moments

double mu_y(const DgpSpec& dgp, double x, Side side) {
  const Polynomial& m =
      side == Side::plus ? dgp.mean_right : dgp.mean_left;
  double v = m(x) + mu_z(dgp, x, side).dot(loading(dgp, side));
  if (side == Side::plus) v += dgp.confound_shift;
  return v;
}

Eigen::VectorXd mu_z(const DgpSpec& dgp, double x, Side side) {
  Eigen::VectorXd v(dgp.p());
  for (int k = 0; k < dgp.p(); ++k) {
    const auto& pw = dgp.mu_z[static_cast<std::size_t>(k)];
    v(k) = side == Side::plus ? pw.right(x) : pw.left(x);
  }
  return v;
}

Eigen::VectorXd mu_z_deriv0(const DgpSpec& dgp, Side side, int order) {
  Eigen::VectorXd v(dgp.p());
  for (int k = 0; k < dgp.p(); ++k) {
    const auto& pw = dgp.mu_z[static_cast<std::size_t>(k)];
    v(k) = side == Side::plus ? pw.right.derivative(0.0, order)
                              : pw.left.derivative(0.0, order);
  }
  return v;
}

double mu_y_deriv0(const DgpSpec& dgp, Side side, int order) {
  const Polynomial& m =
      side == Side::plus ? dgp.mean_right : dgp.mean_left;
  double v = m.derivative(0.0, order) +
             mu_z_deriv0(dgp, side, order).dot(loading(dgp, side));
  if (order == 0 && side == Side::plus) v += dgp.confound_shift;
  return v;
}

Eigen::VectorXd mu_z_adjusted(const DgpSpec& dgp, double x, Side side) {
  const Eigen::VectorXd level =
      0.5 * (mu_z_deriv0(dgp, Side::plus, 0) + mu_z_deriv0(dgp, Side::minus, 0));
  const Eigen::VectorXd slope = mu_z_deriv0(dgp, side, 1);
  return mu_z(dgp, x, side) - level - x * slope;
}

CondMoments cond_moments(const DgpSpec& dgp, double x, Side side) {
  CondMoments m;
  m.mu_z = mu_z(dgp, x, side);
  m.mu_y = mu_y(dgp, x, side);
  m.mu_zz = dgp.sigma_z + m.mu_z * m.mu_z.transpose();
  const Eigen::VectorXd& g = loading(dgp, side);
  m.mu_zy = dgp.sigma_z * g + m.mu_z * m.mu_y;
  m.var_y = g.dot(dgp.sigma_z * g) + dgp.sigma_eps * dgp.sigma_eps;
  return m;
}

CondMoments cond_moments(const DgpSpec& dgp, double x) {
  return cond_moments(dgp, x, x >= 0.0 ? Side::plus : Side::minus);
}

double tau_y(const DgpSpec& dgp) {
  return mu_y_deriv0(dgp, Side::plus, 0) - mu_y_deriv0(dgp, Side::minus, 0);
}

Eigen::VectorXd tilde_gamma(const DgpSpec& dgp) {
  if (dgp.p() == 0) return Eigen::VectorXd(0);
  const CondMoments plus = cond_moments(dgp, 0.0, Side::plus);
  const CondMoments minus = cond_moments(dgp, 0.0, Side::minus);
  const Eigen::MatrixXd var_sum =
      (plus.mu_zz - plus.mu_z * plus.mu_z.transpose()) +
      (minus.mu_zz - minus.mu_z * minus.mu_z.transpose());
  const Eigen::VectorXd cov_sum = (plus.mu_zy - plus.mu_z * plus.mu_y) +
                                  (minus.mu_zy - minus.mu_z * minus.mu_y);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(var_sum);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::singular,
                "summed one-sided covariate covariance is singular");
  }
  return lu.solve(cov_sum);
}

// ---------------------------------------------------------------------------
// Population regression coefficients

PopulationFit population_coefficients(const DgpSpec& dgp, const Kernel& kernel,
                                      double h, int order, double tol) {
  if (!(h > 0.0 && h <= 1.0)) {
    throw Error(ErrorCode::range,
                "population_coefficients: h must lie in (0,1]");
  }
  if (order != 1 && order != 2) {
    throw Error(ErrorCode::range, "order must be 1 or 2");
  }
  const int dv = order == 1 ? 4 : 6;
  const int p = dgp.p();
  const int dim = dv + p;

  auto weight = [&](double u) { return kernel(u) * dgp.x_density.pdf(u * h); };
  auto entry = [&](const std::function<double(double, Side)>& g) {
    return integrate_two_sided(
        [&](double u, Side s) { return weight(u) * g(u, s); }, tol);
  };

  Eigen::MatrixXd G(dim, dim);
  Eigen::VectorXd b(dim);
  for (int i = 0; i < dv; ++i) {
    for (int j = i; j < dv; ++j) {
      G(i, j) = G(j, i) = entry([&](double u, Side s) {
        const Eigen::VectorXd v = design_vec(u, s, order);
        return v(i) * v(j);
      });
    }
    for (int k = 0; k < p; ++k) {
      G(i, dv + k) = G(dv + k, i) = entry([&](double u, Side s) {
        return design_vec(u, s, order)(i) * mu_z(dgp, u * h, s)(k);
      });
    }
    b(i) = entry([&](double u, Side s) {
      return design_vec(u, s, order)(i) * mu_y(dgp, u * h, s);
    });
  }
  for (int k = 0; k < p; ++k) {
    for (int l = k; l < p; ++l) {
      G(dv + k, dv + l) = G(dv + l, dv + k) = entry([&](double u, Side s) {
        const Eigen::VectorXd z = mu_z(dgp, u * h, s);
        return dgp.sigma_z(k, l) + z(k) * z(l);
      });
    }
    b(dv + k) = entry([&](double u, Side s) {
      const Eigen::VectorXd z = mu_z(dgp, u * h, s);
      return (dgp.sigma_z * loading(dgp, s))(k) + z(k) * mu_y(dgp, u * h, s);
    });
  }

  const Eigen::VectorXd sol =
      solve_symmetric(G, b, "population_coefficients");
  PopulationFit fit;
  fit.theta0 = sol.head(dv);
  fit.gamma0 = sol.tail(p);
  return fit;
}

Eigen::VectorXd beta_check(const DgpSpec& dgp, const Kernel& kernel, double h,
                           double tol) {
  if (!(h > 0.0 && h <= 1.0)) {
    throw Error(ErrorCode::range, "beta_check: h must lie in (0,1]");
  }
  const int p = dgp.p();
  if (p == 0) return Eigen::VectorXd(0);

  auto weight = [&](double u) { return kernel(u) * dgp.x_density.pdf(u * h); };
  auto entry = [&](const std::function<double(double, Side)>& g) {
    return integrate_two_sided(
        [&](double u, Side s) { return weight(u) * g(u, s); }, tol);
  };

  Eigen::MatrixXd A(p, p);
  Eigen::VectorXd c(p);
  for (int k = 0; k < p; ++k) {
    for (int l = k; l < p; ++l) {
      A(k, l) = A(l, k) = entry([&](double u, Side s) {
        const Eigen::VectorXd zt = mu_z_adjusted(dgp, u * h, s);
        return dgp.sigma_z(k, l) + zt(k) * zt(l);
      });
    }
    c(k) = entry([&](double u, Side s) {
      const Eigen::VectorXd zt = mu_z_adjusted(dgp, u * h, s);
      return (dgp.sigma_z * loading(dgp, s))(k) + zt(k) * mu_y(dgp, u * h, s);
    });
  }
  return solve_symmetric(A, c, "beta_check");
}

// ---------------------------------------------------------------------------
// Leading bias and variance

double leading_bias(const DgpSpec& dgp, const Kernel& kernel) {
  const Eigen::VectorXd tg =
      dgp.p() > 0 ? tilde_gamma(dgp) : Eigen::VectorXd(0);
  auto adjusted_curv = [&](Side side) {
    double v = (side == Side::plus ? dgp.mean_right : dgp.mean_left)
                   .derivative(0.0, 2);
    if (dgp.p() > 0) {
      v += mu_z_deriv0(dgp, side, 2).dot(loading(dgp, side) - tg);
    }
    return v;
  };
  const double jump = adjusted_curv(Side::plus) - adjusted_curv(Side::minus);
  return 0.5 * constants(kernel).c_b * jump;
}

double residual_variance_limit(const DgpSpec& dgp, Side side) {
  double v = dgp.sigma_eps * dgp.sigma_eps;
  if (dgp.p() > 0) {
    const Eigen::VectorXd d = loading(dgp, side) - tilde_gamma(dgp);
    v += d.dot(dgp.sigma_z * d);
  } else {
    // no covariates: the adjusted outcome is the outcome itself
  }
  return v;
}

double leading_variance(const DgpSpec& dgp, const Kernel& kernel) {
  const double sum = residual_variance_limit(dgp, Side::plus) +
                     residual_variance_limit(dgp, Side::minus);
  return constants(kernel).c_s / dgp.x_density.pdf(0.0) * sum;
}

double summed_variance_objective(const DgpSpec& dgp,
                                 const Eigen::VectorXd& gamma) {
  double v = 2.0 * dgp.sigma_eps * dgp.sigma_eps;
  for (Side s : {Side::plus, Side::minus}) {
    const Eigen::VectorXd d = loading(dgp, s) - gamma;
    v += d.dot(dgp.sigma_z * d);
  }
  return v;
}

VarianceComparison variance_comparison(const DgpSpec& dgp) {
  VarianceComparison out;
  const CondMoments plus = cond_moments(dgp, 0.0, Side::plus);
  const CondMoments minus = cond_moments(dgp, 0.0, Side::minus);
  out.baseline_sum = plus.var_y + minus.var_y;
  out.adjusted_sum = residual_variance_limit(dgp, Side::plus) +
                     residual_variance_limit(dgp, Side::minus);
  out.gap = out.baseline_sum - out.adjusted_sum;

  out.minimizer_verified = true;
  if (dgp.p() > 0) {
    const Eigen::VectorXd tg = tilde_gamma(dgp);
    const double at_tg = summed_variance_objective(dgp, tg);
    Rng rng(1);
    for (int rep = 0; rep < 100; ++rep) {
      Eigen::VectorXd eps(dgp.p());
      for (int k = 0; k < dgp.p(); ++k) eps(k) = 0.5 * rng.next_normal();
      if (summed_variance_objective(dgp, tg + eps) < at_tg - 1e-12) {
        out.minimizer_verified = false;
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite-bandwidth oracle quantities

double population_bias_ratio(const DgpSpec& dgp, const Kernel& kernel,
                             double h, int order, double tol) {
  const PopulationFit fit = population_coefficients(dgp, kernel, h, order, tol);
  return (fit.theta0(1) - tau_y(dgp)) / (h * h);
}

PopulationResidual::PopulationResidual(const DgpSpec& dgp,
                                       const Kernel& kernel, double h,
                                       int order, double tol)
    : dgp_(&dgp), h_(h), order_(order) {
  const PopulationFit fit = population_coefficients(dgp, kernel, h, order, tol);
  theta0_ = fit.theta0;
  gamma0_ = fit.gamma0;
  if (dgp.p() > 0) {
    const Eigen::VectorXd dp = dgp.gamma_plus - gamma0_;
    const Eigen::VectorXd dm = dgp.gamma_minus - gamma0_;
    extra_var_plus_ = dp.dot(dgp.sigma_z * dp);
    extra_var_minus_ = dm.dot(dgp.sigma_z * dm);
  }
}

double PopulationResidual::operator()(double x, Side side) const {
  const Eigen::VectorXd v = design_vec(x / h_, side, order_);
  double d = mu_y(*dgp_, x, side) - v.dot(theta0_);
  if (dgp_->p() > 0) d -= mu_z(*dgp_, x, side).dot(gamma0_);
  const double extra =
      side == Side::plus ? extra_var_plus_ : extra_var_minus_;
  return d * d + extra + dgp_->sigma_eps * dgp_->sigma_eps;
}

double PopulationResidual::operator()(double x) const {
  return (*this)(x, x >= 0.0 ? Side::plus : Side::minus);
}

double population_variance(const DgpSpec& dgp, const Kernel& kernel, double h,
                           double tol) {
  const PopulationResidual res(dgp, kernel, h, 1, tol);
  const double f0 = dgp.x_density.pdf(0.0);
  const Eigen::Vector4d w =
      kappa_inverse_closed_form(kernel).row(1).transpose() / f0;
  auto integrand = [&](double u, Side s) {
    const double k = kernel(u);
    const double proj = w.dot(design_vec(u, s, 1));
    return k * k * proj * proj * res(u * h, s) * dgp.x_density.pdf(u * h);
  };
  return integrate_two_sided(integrand, tol);
}

// ---------------------------------------------------------------------------
// Expansion cross-check

TaylorVectorPair taylor_vector(const DgpSpec& dgp, const Kernel& kernel,
                               double h, TaylorTarget target, int component,
                               double tol) {
  if (!(h > 0.0 && h <= 1.0)) {
    throw Error(ErrorCode::range, "taylor_vector: h must lie in (0,1]");
  }
  if (target != TaylorTarget::outcome &&
      (component < 0 || component >= dgp.p())) {
    throw Error(ErrorCode::range, "taylor_vector: component out of range");
  }

  auto mu_a = [&](double x, Side s) -> double {
    switch (target) {
      case TaylorTarget::outcome: return mu_y(dgp, x, s);
      case TaylorTarget::covariate: return mu_z(dgp, x, s)(component);
      case TaylorTarget::adjusted_covariate:
        return mu_z_adjusted(dgp, x, s)(component);
    }
    return 0.0;
  };
  auto mu_a_deriv0 = [&](Side s, int k) -> double {
    switch (target) {
      case TaylorTarget::outcome: return mu_y_deriv0(dgp, s, k);
      case TaylorTarget::covariate:
        return mu_z_deriv0(dgp, s, k)(component);
      case TaylorTarget::adjusted_covariate:
        if (k < 2) return 0.0;  // level and slope removed by construction
        return mu_z_deriv0(dgp, s, k)(component);
    }
    return 0.0;
  };

  const KappaMatrix km = kappa(kernel, 1);

  Eigen::Vector4d raw;
  for (int i = 0; i < 4; ++i) {
    raw(i) = integrate_two_sided(
        [&](double u, Side s) {
          return kernel(u) * design_vec(u, s, 1)(i) * mu_a(u * h, s) *
                 dgp.x_density.pdf(u * h);
        },
        tol);
  }

  TaylorVectorPair out;
  out.quadrature = km.inverse * raw;

  const double f0 = dgp.x_density.pdf(0.0);
  const double f1 = dgp.x_density.pdf_derivative(0.0, 1);
  const double f2 = dgp.x_density.pdf_derivative(0.0, 2);
  auto product_deriv1 = [&](Side s) {
    return mu_a_deriv0(s, 1) * f0 + mu_a_deriv0(s, 0) * f1;
  };
  auto product_deriv2 = [&](Side s) {
    return mu_a_deriv0(s, 2) * f0 + 2.0 * mu_a_deriv0(s, 1) * f1 +
           mu_a_deriv0(s, 0) * f2;
  };

  Eigen::Vector4d first;
  first << f0 * mu_a_deriv0(Side::minus, 0),
      f0 * (mu_a_deriv0(Side::plus, 0) - mu_a_deriv0(Side::minus, 0)),
      h * product_deriv1(Side::minus),
      h * (product_deriv1(Side::plus) - product_deriv1(Side::minus));

  Eigen::Vector4d cp, cm;
  cp << kernel.moment(2, Side::plus), kernel.moment(2, Side::plus),
      kernel.moment(3, Side::plus), kernel.moment(3, Side::plus);
  cm << kernel.moment(2, Side::minus), 0.0, kernel.moment(3, Side::minus), 0.0;
  const Eigen::Vector4d second =
      0.5 * (km.inverse *
             (cp * product_deriv2(Side::plus) + cm * product_deriv2(Side::minus)));

  out.prediction = first + h * h * second;
  return out;
}

PopulationQuantities population_quantities(const DgpSpec& dgp,
                                           const Kernel& kernel, double h,
                                           int order) {
  PopulationQuantities q;
  const PopulationFit fit = population_coefficients(dgp, kernel, h, order);
  q.theta0 = fit.theta0;
  q.gamma0 = fit.gamma0;
  q.tilde_gamma = dgp.p() > 0 ? tilde_gamma(dgp) : Eigen::VectorXd(0);
  q.beta_check = beta_check(dgp, kernel, h);
  q.bias_leading = leading_bias(dgp, kernel);
  q.variance_leading = leading_variance(dgp, kernel);
  q.tau_y = tau_y(dgp);
  q.sigma_l2 = residual_variance_limit(dgp, Side::minus);
  q.sigma_r2 = residual_variance_limit(dgp, Side::plus);
  return q;
}

// ---------------------------------------------------------------------------
// Validity report

std::vector<ValidityCheck> validity_report(const DgpSpec& dgp) {
  std::vector<ValidityCheck> checks;
  auto add = [&](std::string name, bool ok, std::string detail) {
    checks.push_back({std::move(name), ok, std::move(detail)});
  };

  const double f0 = dgp.x_density.pdf(0.0);
  add("density positive at cutoff", f0 > 0.0, "f_X(0) = " + std::to_string(f0));
  add("density smooth near cutoff", true,
      dgp.x_density.kind() == DensityKind::uniform
          ? "uniform: constant near 0"
          : "truncated normal: infinitely differentiable near 0");

  bool continuous = true;
  for (int k = 0; k < dgp.p(); ++k) {
    const auto& pw = dgp.mu_z[static_cast<std::size_t>(k)];
    if (std::abs(pw.left(0.0) - pw.right(0.0)) > 1e-12) continuous = false;
  }
  add("covariate mean continuous at cutoff", continuous,
      dgp.p() == 0 ? "no covariates" : "side limits compared at 0");

  bool psd = true;
  if (dgp.p() > 0) {
    psd = dgp.sigma_z.isApprox(dgp.sigma_z.transpose(), 1e-12);
    if (psd) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dgp.sigma_z);
      psd = es.eigenvalues().minCoeff() >= -1e-12;
    }
  }
  add("covariate covariance symmetric PSD", psd, "");

  bool pooled_ok = true;
  std::string pooled_detail = "no covariates";
  if (dgp.p() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(2.0 * dgp.sigma_z);
    pooled_ok = es.eigenvalues().minCoeff() > 0.0;
    pooled_detail = "smallest eigenvalue " +
                    std::to_string(es.eigenvalues().minCoeff());
  }
  add("pooled one-sided covariance invertible", pooled_ok, pooled_detail);

  add("outcome means three times one-sided differentiable", true,
      "side-wise polynomials");
  add("residual moment bound", true,
      "Gaussian noise: finite for every exponent; recorded exponent delta = 1");
  return checks;
}

// ---------------------------------------------------------------------------
// Config file I/O

namespace {

std::vector<double> parse_numbers(const std::string& value,
                                  const std::string& key) {
  std::vector<double> out;
  std::istringstream iss(value);
  std::string tok;
  while (iss >> tok) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size() || !std::isfinite(v)) throw std::exception();
      out.push_back(v);
    } catch (...) {
      throw Error(ErrorCode::ingestion,
                  "dgp config: non-numeric value '" + tok + "' for key '" +
                      key + "'");
    }
  }
  return out;
}

}  // namespace

DgpSpec parse_dgp_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw Error(ErrorCode::ingestion,
                    "dgp config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
      }
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  auto take = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      throw Error(ErrorCode::ingestion, "dgp config: missing key '" + key + "'");
    }
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_optional = [&](const std::string& key, const std::string& dflt) {
    auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto one_number = [&](const std::string& key, const std::string& value) {
    const auto nums = parse_numbers(value, key);
    if (nums.size() != 1) {
      throw Error(ErrorCode::ingestion,
                  "dgp config: key '" + key + "' expects one number");
    }
    return nums[0];
  };

  DgpSpec dgp;
  const std::string density = take("density");
  if (density == "uniform") {
    dgp.x_density = RunningDensity::uniform();
  } else if (density == "truncnorm") {
    const double mean = one_number("density_mean", take_optional("density_mean", "0"));
    const double sd = one_number("density_sd", take_optional("density_sd", "1"));
    dgp.x_density = RunningDensity::truncated_normal(mean, sd);
  } else {
    throw Error(ErrorCode::ingestion,
                "dgp config: density must be uniform or truncnorm");
  }

  const double p_val = one_number("p", take("p"));
  const int p = static_cast<int>(p_val);
  if (p < 0 || p != p_val) {
    throw Error(ErrorCode::ingestion, "dgp config: p must be a non-negative integer");
  }

  dgp.mean_right = Polynomial(parse_numbers(take("y_right"), "y_right"));
  dgp.mean_left = Polynomial(parse_numbers(take("y_left"), "y_left"));

  dgp.mu_z.resize(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) {
    const std::string base = "z" + std::to_string(k + 1);
    dgp.mu_z[static_cast<std::size_t>(k)].right =
        Polynomial(parse_numbers(take(base + "_right"), base + "_right"));
    dgp.mu_z[static_cast<std::size_t>(k)].left =
        Polynomial(parse_numbers(take(base + "_left"), base + "_left"));
  }

  if (p > 0) {
    const auto sig = parse_numbers(take("sigma_z"), "sigma_z");
    if (static_cast<int>(sig.size()) != p * p) {
      throw Error(ErrorCode::ingestion,
                  "dgp config: sigma_z expects p*p row-major entries");
    }
    dgp.sigma_z.resize(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        dgp.sigma_z(i, j) = sig[static_cast<std::size_t>(i * p + j)];
    const auto gp = parse_numbers(take("gamma_plus"), "gamma_plus");
    const auto gm = parse_numbers(take("gamma_minus"), "gamma_minus");
    if (static_cast<int>(gp.size()) != p || static_cast<int>(gm.size()) != p) {
      throw Error(ErrorCode::ingestion,
                  "dgp config: loadings expect p entries");
    }
    dgp.gamma_plus = Eigen::Map<const Eigen::VectorXd>(gp.data(), p);
    dgp.gamma_minus = Eigen::Map<const Eigen::VectorXd>(gm.data(), p);
  } else {
    dgp.sigma_z.resize(0, 0);
    dgp.gamma_plus.resize(0);
    dgp.gamma_minus.resize(0);
  }

  dgp.sigma_eps = one_number("sigma_eps", take("sigma_eps"));
  dgp.confound_shift =
      one_number("confound_shift", take_optional("confound_shift", "0"));

  if (!kv.empty()) {
    throw Error(ErrorCode::ingestion,
                "dgp config: unknown key '" + kv.begin()->first + "'");
  }
  dgp.validate();
  return dgp;
}

DgpSpec load_dgp_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::ingestion, "cannot open dgp config '" + path + "'");
  }
  return parse_dgp_config(in);
}

std::string format_dgp_config(const DgpSpec& dgp) {
  std::ostringstream out;
  out.precision(17);
  if (dgp.x_density.kind() == DensityKind::uniform) {
    out << "density = uniform\n";
  } else {
    out << "density = truncnorm\n";
    out << "density_mean = " << dgp.x_density.mean() << "\n";
    out << "density_sd = " << dgp.x_density.sd() << "\n";
  }
  out << "p = " << dgp.p() << "\n";
  auto poly = [&](const char* key, const Polynomial& q) {
    out << key << " =";
    if (q.coeffs.empty()) out << " 0";
    for (double c : q.coeffs) out << " " << c;
    out << "\n";
  };
  poly("y_right", dgp.mean_right);
  poly("y_left", dgp.mean_left);
  for (int k = 0; k < dgp.p(); ++k) {
    const std::string base = "z" + std::to_string(k + 1);
    poly((base + "_right").c_str(), dgp.mu_z[static_cast<std::size_t>(k)].right);
    poly((base + "_left").c_str(), dgp.mu_z[static_cast<std::size_t>(k)].left);
  }
  if (dgp.p() > 0) {
    out << "sigma_z =";
    for (int i = 0; i < dgp.p(); ++i)
      for (int j = 0; j < dgp.p(); ++j) out << " " << dgp.sigma_z(i, j);
    out << "\ngamma_plus =";
    for (int k = 0; k < dgp.p(); ++k) out << " " << dgp.gamma_plus(k);
    out << "\ngamma_minus =";
    for (int k = 0; k < dgp.p(); ++k) out << " " << dgp.gamma_minus(k);
    out << "\n";
  }
  out << "sigma_eps = " << dgp.sigma_eps << "\n";
  out << "confound_shift = " << dgp.confound_shift << "\n";
  return out.str();
}

DgpSpec resolve_dgp(const std::string& name_or_path) {
  if (name_or_path == "dgp1") return DgpSpec::dgp1();
  if (name_or_path == "dgp2") return DgpSpec::dgp2();
  return load_dgp_config(name_or_path);
}

}  // namespace rdcov
