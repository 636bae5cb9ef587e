#include "sigfilter/pvalue.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sigfilter/normal.hpp"

namespace sigfilter {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::domain_error(std::string(what) + ": non-finite input");
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must be in (0,1)");
}

// Z_p, the (1-p)th standard-normal percentile. Evaluated by symmetry for
// small p, where forming 1 - p directly would round to 1.
double upper_quantile(double p) {
  return (p <= 0.5) ? -std_normal_quantile(p) : std_normal_quantile(1.0 - p);
}

}  // namespace

double p_value_pdf(double p, double delta) {
  require_finite(delta, "p_value_pdf");
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("p_value_pdf: p must be in (0,1)");
  // phi(Z_p - delta)/phi(Z_p) = exp(Z_p*delta - delta^2/2), stable in the
  // tails where the two densities individually underflow.
  const double zp = upper_quantile(p);
  return std::exp(zp * delta - 0.5 * delta * delta);
}

double p_value_cdf(double p, double delta) {
  require_finite(delta, "p_value_cdf");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("p_value_cdf: p must be in [0,1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const double zp = upper_quantile(p);
  // 1 - Phi(zp - delta), evaluated as Phi(delta - zp) to keep tail accuracy
  return std_normal_cdf(delta - zp);
}

double p_from_z_one_sided(double z) {
  require_finite(z, "p_from_z_one_sided");
  return std_normal_cdf(-z);  // 1 - Phi(z) without cancellation
}

double p_from_z_two_sided(double z) {
  require_finite(z, "p_from_z_two_sided");
  const double p = 2.0 * std_normal_cdf(-std::fabs(z));
  return std::clamp(p, 0.0, 1.0);
}

double power_from_z(double z_obs, double alpha) {
  require_finite(z_obs, "power_from_z");
  require_alpha(alpha);
  const double z_alpha = std_normal_quantile(1.0 - alpha);
  return std_normal_cdf(z_obs - z_alpha);  // 1 - Phi(z_alpha - z_obs)
}

double power_from_z_two_sided(double z_obs, double alpha) {
  require_finite(z_obs, "power_from_z_two_sided");
  require_alpha(alpha);
  const double z_half = std_normal_quantile(1.0 - 0.5 * alpha);
  const double a = std::fabs(z_obs);
  return std_normal_cdf(a - z_half) + std_normal_cdf(-z_half - a);
}

}  // namespace sigfilter
