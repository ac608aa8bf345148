#include "rdcov/kernel.hpp"

#include <cmath>
#include <utility>

#include "rdcov/error.hpp"
#include "rdcov/quadrature.hpp"

namespace rdcov {

namespace {

constexpr double kQuadTol = 1e-10;

void check_alpha(int alpha, int max_alpha, const char* what) {
  if (alpha < 0 || alpha > max_alpha) {
    throw Error(ErrorCode::range, std::string(what) + ": alpha " +
                                      std::to_string(alpha) +
                                      " outside cached range 0.." +
                                      std::to_string(max_alpha));
  }
}

// Closed-form plus-side moments of the built-in kernels.
double builtin_plus_moment(KernelKind kind, int alpha) {
  const double a = static_cast<double>(alpha);
  switch (kind) {
    case KernelKind::triangular:
      // int_0^1 (1-u) u^a du
      return 1.0 / ((a + 1.0) * (a + 2.0));
    case KernelKind::epanechnikov:
      // 3/4 int_0^1 (1-u^2) u^a du
      return 1.5 / ((a + 1.0) * (a + 3.0));
    case KernelKind::uniform:
      return 0.5 / (a + 1.0);
    case KernelKind::custom:
      break;
  }
  throw Error(ErrorCode::numerical, "no closed form for custom kernel");
}

double builtin_plus_sq_moment(KernelKind kind, int alpha) {
  const double a = static_cast<double>(alpha);
  switch (kind) {
    case KernelKind::triangular:
      // int_0^1 (1-u)^2 u^a du
      return 2.0 / ((a + 1.0) * (a + 2.0) * (a + 3.0));
    case KernelKind::epanechnikov:
      // 9/16 int_0^1 (1-u^2)^2 u^a du
      return 4.5 / ((a + 1.0) * (a + 3.0) * (a + 5.0));
    case KernelKind::uniform:
      return 0.25 / (a + 1.0);
    case KernelKind::custom:
      break;
  }
  throw Error(ErrorCode::numerical, "no closed form for custom kernel");
}

}  // namespace

Kernel::Kernel(KernelKind kind, std::string name,
               std::function<double(double)> evaluator)
    : kind_(kind), name_(std::move(name)), evaluator_(std::move(evaluator)) {
  if (kind_ == KernelKind::custom) validate_custom();
  cache_moments();
}

Kernel Kernel::triangular() {
  return Kernel(KernelKind::triangular, "triangular", {});
}

Kernel Kernel::epanechnikov() {
  return Kernel(KernelKind::epanechnikov, "epanechnikov", {});
}

Kernel Kernel::uniform() { return Kernel(KernelKind::uniform, "uniform", {}); }

Kernel Kernel::custom(std::function<double(double)> evaluator) {
  if (!evaluator) {
    throw Error(ErrorCode::invalid_kernel, "custom kernel needs an evaluator");
  }
  return Kernel(KernelKind::custom, "custom", std::move(evaluator));
}

Kernel Kernel::from_name(std::string_view name) {
  if (name == "triangular") return triangular();
  if (name == "epanechnikov") return epanechnikov();
  if (name == "uniform") return uniform();
  throw Error(ErrorCode::usage,
              "unknown kernel '" + std::string(name) +
                  "' (choose triangular, epanechnikov or uniform)");
}

double Kernel::operator()(double u) const {
  if (std::abs(u) > 1.0) return 0.0;
  switch (kind_) {
    case KernelKind::triangular:
      return 1.0 - std::abs(u);
    case KernelKind::epanechnikov:
      return 0.75 * (1.0 - u * u);
    case KernelKind::uniform:
      return 0.5;
    case KernelKind::custom: {
      const double w = evaluator_(u);
      if (!std::isfinite(w) || w < 0.0) {
        throw Error(ErrorCode::invalid_kernel,
                    "custom kernel returned a negative or non-finite weight");
      }
      return w;
    }
  }
  return 0.0;
}

void Kernel::validate_custom() const {
  // Semantic requirements, enforced computationally: non-negative and
  // symmetric on a 10^4-point grid, unit integral by quadrature.
  const int grid_n = 10000;
  for (int i = 0; i <= grid_n; ++i) {
    const double u = -1.0 + 2.0 * static_cast<double>(i) / grid_n;
    const double w = evaluator_(u);
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::invalid_kernel,
                  "custom kernel is negative or non-finite at u=" +
                      std::to_string(u));
    }
    const double wm = evaluator_(-u);
    if (std::abs(w - wm) > 1e-12 * std::max(1.0, std::abs(w))) {
      throw Error(ErrorCode::invalid_kernel,
                  "custom kernel is not symmetric at u=" + std::to_string(u));
    }
  }
  const double total = integrate_split_at_zero(
      [this](double u) { return evaluator_(u); }, kQuadTol);
  if (std::abs(total - 1.0) > 1e-10) {
    throw Error(ErrorCode::invalid_kernel,
                "custom kernel integrates to " + std::to_string(total) +
                    ", not 1");
  }
}

void Kernel::cache_moments() {
  for (int a = 0; a <= max_alpha; ++a) {
    if (kind_ == KernelKind::custom) {
      k_plus_[a] = adaptive_simpson(
          [this, a](double u) { return evaluator_(u) * std::pow(u, a); }, 0.0,
          1.0, kQuadTol);
      k_minus_[a] = adaptive_simpson(
          [this, a](double u) { return evaluator_(u) * std::pow(u, a); }, -1.0,
          0.0, kQuadTol);
    } else {
      k_plus_[a] = builtin_plus_moment(kind_, a);
      k_minus_[a] = (a % 2 == 0) ? k_plus_[a] : -k_plus_[a];
    }
    k_full_[a] = k_plus_[a] + k_minus_[a];
  }
  for (int a = 0; a <= max_sq_alpha; ++a) {
    if (kind_ == KernelKind::custom) {
      auto sq = [this, a](double u) {
        const double w = evaluator_(u);
        return w * w * std::pow(u, a);
      };
      ksq_plus_[a] = adaptive_simpson(sq, 0.0, 1.0, kQuadTol);
      ksq_minus_[a] = adaptive_simpson(sq, -1.0, 0.0, kQuadTol);
    } else {
      ksq_plus_[a] = builtin_plus_sq_moment(kind_, a);
      ksq_minus_[a] = (a % 2 == 0) ? ksq_plus_[a] : -ksq_plus_[a];
    }
  }
}

double Kernel::moment(int alpha, Side side) const {
  check_alpha(alpha, max_alpha, "moment");
  switch (side) {
    case Side::plus: return k_plus_[alpha];
    case Side::minus: return k_minus_[alpha];
    case Side::full: return k_full_[alpha];
  }
  return 0.0;
}

double Kernel::sq_moment(int alpha, Side side) const {
  check_alpha(alpha, max_sq_alpha, "sq_moment");
  switch (side) {
    case Side::plus: return ksq_plus_[alpha];
    case Side::minus: return ksq_minus_[alpha];
    case Side::full:
      throw Error(ErrorCode::range, "sq_moment: side must be plus or minus");
  }
  return 0.0;
}

KappaMatrix kappa(const Kernel& kernel, int order) {
  if (order != 1 && order != 2) {
    throw Error(ErrorCode::range, "kappa: order must be 1 or 2");
  }
  const int dim = order == 1 ? 4 : 6;
  // Row/column layout follows the design row (1, T, u, Tu[, u^2, Tu^2]):
  // even positions hold full moments, odd positions plus-side moments, and
  // the treated rows repeat the plus-side values.
  Eigen::MatrixXd m(dim, dim);
  auto full = [&](int a) { return kernel.moment(a, Side::full); };
  auto plus = [&](int a) { return kernel.moment(a, Side::plus); };
  for (int i = 0; i < dim; ++i) {
    const int ai = i / 2;          // power of u carried by row i
    const bool ti = (i % 2) == 1;  // row i carries the treatment indicator
    for (int j = 0; j < dim; ++j) {
      const int a = ai + j / 2;
      const bool one_sided = ti || (j % 2) == 1;
      m(i, j) = one_sided ? plus(a) : full(a);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::singular, "kappa matrix is singular");
  }
  KappaMatrix result;
  result.entries = std::move(m);
  result.inverse = lu.inverse();
  result.det = lu.determinant();
  result.order = order;
  return result;
}

Eigen::Matrix4d kappa_inverse_closed_form(const Kernel& kernel) {
  const double k1 = kernel.moment(1, Side::plus);
  const double k2 = kernel.moment(2, Side::plus);
  const double scale = 1.0 / (k1 * k1 - 0.5 * k2);  // nonzero: Jensen gap
  Eigen::Matrix4d m;
  m << -k2, k2, -k1, k1,
       k2, -2.0 * k2, k1, 0.0,
       -k1, k1, -0.5, 0.5,
       k1, 0.0, 0.5, -1.0;
  return scale * m;
}

KernelConstants constants(const Kernel& kernel) {
  const double k1 = kernel.moment(1, Side::plus);
  const double k2 = kernel.moment(2, Side::plus);
  const double k3 = kernel.moment(3, Side::plus);
  const double k4 = kernel.moment(4, Side::plus);
  const double q0 = kernel.sq_moment(0, Side::plus);
  const double q1 = kernel.sq_moment(1, Side::plus);
  const double q2 = kernel.sq_moment(2, Side::plus);
  const double denom = k2 - 2.0 * k1 * k1;  // positive by the Jensen gap
  KernelConstants c;
  c.a1 = (2.0 * k2 * k2 - 2.0 * k1 * k3) / denom;
  c.a2 = (k3 - 2.0 * k1 * k2) / denom;
  c.b1 = (2.0 * k2 * k3 - 2.0 * k1 * k4) / denom;
  c.b2 = (k4 - 2.0 * k1 * k3) / denom;
  c.c_b = c.a1;  // the defining formulas coincide
  const double d = k1 * k1 - 0.5 * k2;
  c.c_s = (q0 * k2 * k2 + q2 * k1 * k1 - 2.0 * q1 * k2 * k1) / (d * d);
  return c;
}

}  // namespace rdcov
