#pragma once

namespace sigfilter {

// Regularized incomplete beta function I_x(a, b), a,b > 0, x in [0,1].
double incomplete_beta(double a, double b, double x);

// Central Student-t density and distribution function, df >= 1.
double student_t_pdf(double x, double df);
double student_t_cdf(double x, double df);

// Quantile of the central t distribution, p in (0,1).
double student_t_quantile(double p, double df);

// Distribution function of the noncentral t with noncentrality ncp,
// evaluated by the Poisson-weighted incomplete-beta series. Absolute error
// below 1e-6 (typically ~1e-12) for |ncp| <= 34; beyond that an asymptotic
// normal approximation takes over, where the exact value is already within
// 1e-6 of 0 or 1 for any |x| of practical size.
double noncentral_t_cdf(double x, double df, double ncp);

}  // namespace sigfilter
