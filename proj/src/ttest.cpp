#include "sigfilter/ttest.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sigfilter/student_t.hpp"

namespace sigfilter {

void TestSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("TestSpec: alpha must be in (0,1)");
  if (!std::isfinite(mu0)) throw std::domain_error("TestSpec: mu0 must be finite");
}

double EffectScenario::delta(double mu0) const {
  return (mu - mu0) * std::sqrt(static_cast<double>(n)) / sigma;
}

void EffectScenario::validate() const {
  if (!std::isfinite(mu)) throw std::domain_error("EffectScenario: mu must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::domain_error("EffectScenario: sigma must be positive");
  if (n < 1) throw std::domain_error("EffectScenario: n must be positive");
}

TestResult paired_t_test(std::span<const double> diffs, const TestSpec& spec) {
  spec.validate();
  if (spec.family == TestFamily::z)
    throw std::domain_error("paired_t_test: z family has no sample test here");
  const int n = static_cast<int>(diffs.size());
  if (n < 2) throw std::domain_error("paired_t_test: need at least 2 observations");

  double mean = 0.0;
  for (double d : diffs) {
    if (!std::isfinite(d)) throw std::domain_error("paired_t_test: non-finite observation");
    mean += d;
  }
  mean /= n;
  double ss = 0.0;
  for (double d : diffs) {
    const double c = d - mean;
    ss += c * c;
  }
  const double sd = std::sqrt(ss / (n - 1));
  if (!(sd > 0.0)) throw degenerate_sample_error("paired_t_test: zero sample variance");

  TestResult r;
  r.n = n;
  r.df = n - 1;
  r.effect = mean;
  r.sd = sd;
  r.se = sd / std::sqrt(static_cast<double>(n));
  r.t_stat = (mean - spec.mu0) / r.se;
  switch (spec.sidedness) {
    case Sidedness::one_sided_gt:
      r.p_value = 1.0 - student_t_cdf(r.t_stat, r.df);
      break;
    case Sidedness::one_sided_lt:
      r.p_value = student_t_cdf(r.t_stat, r.df);
      break;
    case Sidedness::two_sided:
      r.p_value = std::clamp(2.0 * (1.0 - student_t_cdf(std::fabs(r.t_stat), r.df)), 0.0, 1.0);
      break;
  }
  return r;
}

double ks_uniform_distance(std::span<const double> pvals) {
  if (pvals.empty()) throw std::domain_error("ks_uniform_distance: empty sample");
  std::vector<double> xs(pvals.begin(), pvals.end());
  for (double x : xs) {
    if (!(x >= 0.0 && x <= 1.0))
      throw std::domain_error("ks_uniform_distance: values must lie in [0,1]");
  }
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double above = (i + 1) / n - xs[i];
    const double below = xs[i] - i / n;
    dist = std::max({dist, above, below});
  }
  return dist;
}

}  // namespace sigfilter
