#pragma once

namespace sigfilter {

// Density of the one-sided p-value random variable at p in (0,1), given the
// true standardized effect delta: phi(Z_p - delta)/phi(Z_p), where Z_p is the
// (1-p)th standard-normal percentile. Equals 1 identically when delta = 0.
double p_value_pdf(double p, double delta);

// Distribution function of the p-value random variable: 1 - Phi(Z_p - delta),
// defined on the closed interval [0,1].
double p_value_cdf(double p, double delta);

// One-sided p-value from an observed z statistic (alternative mu > mu0):
// p = 1 - Phi(z).
double p_from_z_one_sided(double z);

// Two-sided p-value, 2*(1 - Phi(|z|)) clipped to [0,1]. Kept as a separately
// named variant; never substituted for the one-sided form.
double p_from_z_two_sided(double z);

// Post-hoc power estimated from an observed z statistic (one-sided test at
// level alpha): 1 - Phi(z_alpha - z_obs). Strictly increasing in z_obs and
// exactly 0.5 at z_obs = z_alpha.
double power_from_z(double z_obs, double alpha);

// Two-sided analogue evaluated at the observed |z|:
// 1 - Phi(z_{alpha/2} - |z|) + Phi(-z_{alpha/2} - |z|).
double power_from_z_two_sided(double z_obs, double alpha);

}  // namespace sigfilter
