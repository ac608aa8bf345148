#pragma once

namespace rdcov {

// Standard normal density, cdf and quantile. The quantile uses Acklam's
// rational approximation (relative error below 1.2e-9), so no statistical
// table dependency is needed anywhere.
double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);  // p in (0,1); range error otherwise

}  // namespace rdcov
