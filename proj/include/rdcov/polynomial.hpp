#pragma once

#include <vector>

namespace rdcov {

// Polynomial with ascending coefficients: c[0] + c[1] x + c[2] x^2 + ...
struct Polynomial {
  std::vector<double> coeffs;

  Polynomial() = default;
  Polynomial(std::initializer_list<double> c) : coeffs(c) {}
  explicit Polynomial(std::vector<double> c) : coeffs(std::move(c)) {}

  double operator()(double x) const {
    double v = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
    return v;
  }

  // Value of the k-th derivative at x.
  double derivative(double x, int k) const {
    double v = 0.0;
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= k; --i) {
      double fac = 1.0;
      for (int j = 0; j < k; ++j) fac *= static_cast<double>(i - j);
      v = v * x + fac * coeffs[static_cast<std::size_t>(i)];
    }
    return v;
  }
};

// Piecewise polynomial in the running variable; the right branch applies for
// x >= 0, matching the treatment convention at the cutoff.
struct PiecewisePolynomial {
  Polynomial left, right;

  double operator()(double x) const { return x >= 0.0 ? right(x) : left(x); }
};

}  // namespace rdcov
