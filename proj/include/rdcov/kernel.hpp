#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <string>
#include <string_view>

namespace rdcov {

enum class KernelKind { triangular, epanechnikov, uniform, custom };
enum class Side { minus, plus, full };

// A symmetric probability kernel supported on [-1, 1]. One-sided moments
//   K_+^(a) = int_0^1 K(u) u^a du,   K_-^(a) = int_{-1}^0 K(u) u^a du
// are cached at construction for a = 0..6, and the squared-kernel moments
// (K^2)_+/-^(a) for a = 0..2. Built-in kernels use closed forms; custom
// kernels are validated numerically and integrated by adaptive Simpson
// (absolute tolerance 1e-10, split at the kink in 0).
class Kernel {
 public:
  static constexpr int max_alpha = 6;
  static constexpr int max_sq_alpha = 2;

  static Kernel triangular();    // K(u) = 1 - |u|
  static Kernel epanechnikov();  // K(u) = 3/4 (1 - u^2)
  static Kernel uniform();       // K(u) = 1/2
  static Kernel custom(std::function<double(double)> evaluator);
  static Kernel from_name(std::string_view name);

  // K(u); zero for |u| > 1. Symmetric by construction.
  double operator()(double u) const;

  double moment(int alpha, Side side) const;     // alpha in 0..6
  double sq_moment(int alpha, Side side) const;  // alpha in 0..2, plus/minus

  KernelKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  Kernel(KernelKind kind, std::string name,
         std::function<double(double)> evaluator);
  void validate_custom() const;
  void cache_moments();

  KernelKind kind_;
  std::string name_;
  std::function<double(double)> evaluator_;  // custom only
  std::array<double, max_alpha + 1> k_plus_{};
  std::array<double, max_alpha + 1> k_minus_{};
  std::array<double, max_alpha + 1> k_full_{};
  std::array<double, max_sq_alpha + 1> ksq_plus_{};
  std::array<double, max_sq_alpha + 1> ksq_minus_{};
};

// The kernel moment matrix normalizing the local design's population Gram
// matrix, together with its numerical inverse and determinant. Order 1 is
// the 4x4 layout for (1, T, u, Tu); order 2 the 6x6 layout that appends
// (u^2, Tu^2).
struct KappaMatrix {
  Eigen::MatrixXd entries;
  Eigen::MatrixXd inverse;
  double det = 0.0;
  int order = 1;
};

KappaMatrix kappa(const Kernel& kernel, int order);

// Explicit inverse of the order-1 kappa matrix, scaled by
// 1 / ((K_+^(1))^2 - K_+^(2)/2).
Eigen::Matrix4d kappa_inverse_closed_form(const Kernel& kernel);

// Kernel-dependent constants: c_b multiplies the leading curvature-jump
// bias term, c_s the summed one-sided residual variances; a1..b2 are the
// coefficients of the first- and second-order density corrections.
struct KernelConstants {
  double c_b = 0.0;
  double c_s = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
};

KernelConstants constants(const Kernel& kernel);

}  // namespace rdcov
