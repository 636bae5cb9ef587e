#pragma once

namespace sigfilter {

// Density of the standard normal distribution.
double std_normal_pdf(double x);

// Distribution function Phi of the standard normal. Absolute error below
// 1e-12 over the full double range. Throws std::domain_error on non-finite
// input.
double std_normal_cdf(double x);

// Quantile (inverse of std_normal_cdf) for p in (0,1). Satisfies
// std_normal_cdf(std_normal_quantile(p)) = p to better than 1e-9.
// Throws std::domain_error outside the open interval.
double std_normal_quantile(double p);

}  // namespace sigfilter
