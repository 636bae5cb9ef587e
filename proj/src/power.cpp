#include "sigfilter/power.hpp"

#include <cmath>

#include "sigfilter/normal.hpp"
#include "sigfilter/student_t.hpp"

namespace sigfilter {

double exact_t_power(const EffectScenario& scenario, const TestSpec& spec) {
  scenario.validate();
  spec.validate();
  if (spec.family == TestFamily::z)
    throw std::domain_error("exact_t_power: requires a t family (use z_test_power)");
  if (scenario.n < 2) throw std::domain_error("exact_t_power: n must be >= 2");

  const double df = scenario.n - 1;
  const double ncp = scenario.delta(spec.mu0);
  switch (spec.sidedness) {
    case Sidedness::one_sided_gt: {
      const double crit = student_t_quantile(1.0 - spec.alpha, df);
      return 1.0 - noncentral_t_cdf(crit, df, ncp);
    }
    case Sidedness::one_sided_lt: {
      const double crit = student_t_quantile(1.0 - spec.alpha, df);
      return noncentral_t_cdf(-crit, df, ncp);
    }
    case Sidedness::two_sided: {
      const double crit = student_t_quantile(1.0 - 0.5 * spec.alpha, df);
      return (1.0 - noncentral_t_cdf(crit, df, ncp)) + noncentral_t_cdf(-crit, df, ncp);
    }
  }
  throw std::domain_error("exact_t_power: unknown sidedness");
}

double z_test_power(double delta, double alpha, Sidedness sidedness) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("z_test_power: alpha must be in (0,1)");
  if (!std::isfinite(delta)) throw std::domain_error("z_test_power: non-finite delta");
  switch (sidedness) {
    case Sidedness::one_sided_gt: {
      const double z_alpha = std_normal_quantile(1.0 - alpha);
      return std_normal_cdf(delta - z_alpha);
    }
    case Sidedness::one_sided_lt: {
      const double z_alpha = std_normal_quantile(1.0 - alpha);
      return std_normal_cdf(-z_alpha - delta);
    }
    case Sidedness::two_sided: {
      const double z_half = std_normal_quantile(1.0 - 0.5 * alpha);
      return std_normal_cdf(delta - z_half) + std_normal_cdf(-z_half - delta);
    }
  }
  throw std::domain_error("z_test_power: unknown sidedness");
}

}  // namespace sigfilter
