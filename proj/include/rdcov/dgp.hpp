#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rdcov/kernel.hpp"
#include "rdcov/polynomial.hpp"

namespace rdcov {

enum class DensityKind { uniform, truncated_normal };

// Running-variable density on [-1, 1] with analytic derivatives and an exact
// inverse cdf. Smooth in a neighborhood of the cutoff with positive value
// there, as the asymptotics require.
class RunningDensity {
 public:
  static RunningDensity uniform();
  static RunningDensity truncated_normal(double mean, double sd);

  double pdf(double x) const;
  double pdf_derivative(double x, int order) const;  // order 0..2
  double cdf(double x) const;
  double inverse_cdf(double u) const;

  DensityKind kind() const { return kind_; }
  double mean() const { return mean_; }
  double sd() const { return sd_; }

 private:
  DensityKind kind_ = DensityKind::uniform;
  double mean_ = 0.0;
  double sd_ = 1.0;
  double cdf_lo_ = 0.0;  // untruncated cdf at -1
  double mass_ = 1.0;    // untruncated mass of [-1, 1]
};

// Analytic data-generating process: side-wise polynomial outcome means,
// piecewise-polynomial covariate means continuous at the cutoff, constant
// conditional covariance of the covariates, homoskedastic outcome noise and
// an optional mean shift on the treated side. Every conditional moment it
// implies is available in closed form, which is what makes the deterministic
// population oracle below possible.
struct DgpSpec {
  RunningDensity x_density = RunningDensity::uniform();
  std::vector<PiecewisePolynomial> mu_z;  // one entry per covariate
  Eigen::MatrixXd sigma_z;                // p x p, symmetric PSD
  Polynomial mean_right;                  // structural outcome mean, x >= 0
  Polynomial mean_left;                   // structural outcome mean, x < 0
  Eigen::VectorXd gamma_plus;             // covariate loading, treated side
  Eigen::VectorXd gamma_minus;            // covariate loading, control side
  double sigma_eps = 0.0;
  double confound_shift = 0.0;  // added to the treated-side outcome mean

  int p() const { return static_cast<int>(mu_z.size()); }
  void validate() const;  // throws on violated structural requirements

  // Built-in processes used throughout the verification suites.
  static DgpSpec dgp1();
  static DgpSpec dgp2();
};

// Conditional moments given X = x, approached from the requested side.
struct CondMoments {
  double mu_y = 0.0;
  Eigen::VectorXd mu_z;
  Eigen::MatrixXd mu_zz;
  Eigen::VectorXd mu_zy;
  double var_y = 0.0;
};

CondMoments cond_moments(const DgpSpec& dgp, double x, Side side);
CondMoments cond_moments(const DgpSpec& dgp, double x);  // side by sign of x

// Point evaluations and one-sided derivatives at the cutoff.
double mu_y(const DgpSpec& dgp, double x, Side side);
Eigen::VectorXd mu_z(const DgpSpec& dgp, double x, Side side);
double mu_y_deriv0(const DgpSpec& dgp, Side side, int order);
Eigen::VectorXd mu_z_deriv0(const DgpSpec& dgp, Side side, int order);
// Covariate mean after subtracting its side-wise linearization at the cutoff;
// value and slope vanish at zero from both sides by construction.
Eigen::VectorXd mu_z_adjusted(const DgpSpec& dgp, double x, Side side);

// Jump of the conditional outcome mean at the cutoff.
double tau_y(const DgpSpec& dgp);

// Pooled projection loading: the minimizer of the summed one-sided variance
// of Y - Z'gamma, from the one-sided covariance limits.
Eigen::VectorXd tilde_gamma(const DgpSpec& dgp);

// Population regression coefficients at bandwidth h: the minimizers of the
// expected kernel-weighted squared loss, assembled by quadrature.
struct PopulationFit {
  Eigen::VectorXd theta0;
  Eigen::VectorXd gamma0;
};
PopulationFit population_coefficients(const DgpSpec& dgp, const Kernel& kernel,
                                      double h, int order,
                                      double tol = 1e-10);

// Population projection of the outcome on the adjusted covariates.
Eigen::VectorXd beta_check(const DgpSpec& dgp, const Kernel& kernel, double h,
                           double tol = 1e-10);

// Leading bias constant: c_b/2 times the curvature jump of the adjusted
// outcome mean at the cutoff.
double leading_bias(const DgpSpec& dgp, const Kernel& kernel);

// Leading variance constant: c_s / f_X(0) times the summed one-sided
// residual variances of the adjusted outcome.
double leading_variance(const DgpSpec& dgp, const Kernel& kernel);

// One-sided limits of the residual variance (Side::minus gives the left
// limit sigma_l^2, Side::plus the right limit sigma_r^2).
double residual_variance_limit(const DgpSpec& dgp, Side side);

// Summed one-sided variance of Y - Z'gamma; tilde_gamma minimizes this.
double summed_variance_objective(const DgpSpec& dgp,
                                 const Eigen::VectorXd& gamma);

struct VarianceComparison {
  double adjusted_sum = 0.0;
  double baseline_sum = 0.0;
  double gap = 0.0;
  bool minimizer_verified = false;  // objective at tilde_gamma beats 100
                                    // seeded random perturbations
};
VarianceComparison variance_comparison(const DgpSpec& dgp);

// Finite-bandwidth oracle quantities.
//
// population_bias_ratio: (theta0^(2)(h) - tau_y) / h^2, the exact scaled bias
// of the population coefficient at bandwidth h.
double population_bias_ratio(const DgpSpec& dgp, const Kernel& kernel,
                             double h, int order, double tol = 1e-10);

// Conditional second moment of the population residual at bandwidth h,
// E(r(h)^2 | X = x), evaluated from the population coefficients. Reusable
// across x once constructed.
class PopulationResidual {
 public:
  PopulationResidual(const DgpSpec& dgp, const Kernel& kernel, double h,
                     int order = 1, double tol = 1e-10);
  double operator()(double x, Side side) const;
  double operator()(double x) const;
  const Eigen::VectorXd& theta0() const { return theta0_; }
  const Eigen::VectorXd& gamma0() const { return gamma0_; }

 private:
  const DgpSpec* dgp_;
  double h_;
  int order_;
  Eigen::VectorXd theta0_, gamma0_;
  double extra_var_plus_ = 0.0;   // (gamma_+ - gamma0)' Sigma (gamma_+ - gamma0)
  double extra_var_minus_ = 0.0;
};

// Exact scaled variance of the estimator at bandwidth h: the kernel-weighted
// second moment of w'V r(h) with the population residual, by quadrature.
double population_variance(const DgpSpec& dgp, const Kernel& kernel, double h,
                           double tol = 1e-10);

// Expansion cross-check of the normalized moment vector kappa^{-1} E(K_h V A):
// the quadrature value next to its second-order prediction. The gap is
// O(h^3) in the bandwidth.
enum class TaylorTarget { outcome, covariate, adjusted_covariate };
struct TaylorVectorPair {
  Eigen::Vector4d quadrature;
  Eigen::Vector4d prediction;
};
TaylorVectorPair taylor_vector(const DgpSpec& dgp, const Kernel& kernel,
                               double h, TaylorTarget target,
                               int component = 0, double tol = 1e-10);

// Bundle of the population quantities at a given bandwidth and order.
struct PopulationQuantities {
  Eigen::VectorXd theta0;
  Eigen::VectorXd gamma0;
  Eigen::VectorXd tilde_gamma;
  Eigen::VectorXd beta_check;
  double bias_leading = 0.0;
  double variance_leading = 0.0;
  double tau_y = 0.0;
  double sigma_l2 = 0.0;
  double sigma_r2 = 0.0;
};
PopulationQuantities population_quantities(const DgpSpec& dgp,
                                           const Kernel& kernel, double h,
                                           int order);

// Assumption checklist for a process specification, used by the CLI.
struct ValidityCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};
std::vector<ValidityCheck> validity_report(const DgpSpec& dgp);

// Key-value config file serialization (schema documented in the README).
DgpSpec load_dgp_config(const std::string& path);
DgpSpec parse_dgp_config(std::istream& in);
std::string format_dgp_config(const DgpSpec& dgp);
// "dgp1" / "dgp2" resolve to the built-ins, anything else is read as a path.
DgpSpec resolve_dgp(const std::string& name_or_path);

}  // namespace rdcov
