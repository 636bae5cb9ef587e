#include "sigfilter/filter_sim.hpp"

#include <cmath>
#include <limits>

#include "sigfilter/normal.hpp"
#include "sigfilter/power.hpp"
#include "sigfilter/pvalue.hpp"
#include "sigfilter/rng.hpp"
#include "sigfilter/student_t.hpp"

namespace sigfilter {

namespace {

constexpr std::int64_t kBlockSize = 4096;

struct BlockTally {
  std::int64_t published = 0;
  double sum_abs_effect = 0.0;
  std::int64_t sign_errors = 0;
  double sum_est_power = 0.0;
  double min_est_power = std::numeric_limits<double>::infinity();
};

// Post-hoc estimator applied to the observed statistic (t treated as z).
double estimated_power(double stat, const TestSpec& spec) {
  switch (spec.sidedness) {
    case Sidedness::one_sided_gt:
      return power_from_z(stat, spec.alpha);
    case Sidedness::one_sided_lt:
      return power_from_z(-stat, spec.alpha);
    case Sidedness::two_sided:
      return power_from_z_two_sided(stat, spec.alpha);
  }
  return 0.0;
}

bool is_significant(double stat, double crit, Sidedness sidedness) {
  switch (sidedness) {
    case Sidedness::one_sided_gt:
      return stat >= crit;
    case Sidedness::one_sided_lt:
      return stat <= -crit;
    case Sidedness::two_sided:
      return std::fabs(stat) >= crit;
  }
  return false;
}

}  // namespace

void FilterSimConfig::validate() const {
  scenario.validate();
  spec.validate();
  if (n_sims < 1) throw std::domain_error("FilterSimConfig: n_sims must be >= 1");
  if (spec.family != TestFamily::z && scenario.n < 2)
    throw std::domain_error("FilterSimConfig: t families need n >= 2");
}

FilterReport simulate_filter(const FilterSimConfig& config, ExecPolicy policy) {
  config.validate();
  const EffectScenario& sc = config.scenario;
  const TestSpec& spec = config.spec;
  const bool z_family = spec.family == TestFamily::z;
  const double sqrt_n = std::sqrt(static_cast<double>(sc.n));

  const double crit =
      z_family ? std_normal_quantile(1.0 - (spec.sidedness == Sidedness::two_sided
                                                ? 0.5 * spec.alpha
                                                : spec.alpha))
               : student_t_quantile(1.0 - (spec.sidedness == Sidedness::two_sided
                                               ? 0.5 * spec.alpha
                                               : spec.alpha),
                                    sc.n - 1);

  // Reference direction for sign errors; at mu == mu0 the positive direction
  // is the reference, which makes the null-case rate the fraction of
  // negative published effects.
  const double true_diff = sc.mu - spec.mu0;
  const double ref_sign = (true_diff < 0.0) ? -1.0 : 1.0;

  const std::int64_t blocks = block_count(config.n_sims, kBlockSize);
  std::vector<BlockTally> tally(blocks);

  for_each_block(config.n_sims, kBlockSize, policy,
                 [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
                   RngStream rng = RngStream::derive(config.seed, "filter-sim", b);
                   BlockTally& t = tally[b];
                   for (std::int64_t k = begin; k < end; ++k) {
                     double sum = 0.0, sumsq = 0.0;
                     for (int i = 0; i < sc.n; ++i) {
                       const double x = rng.normal(sc.mu, sc.sigma);
                       sum += x;
                       sumsq += x * x;
                     }
                     const double mean = sum / sc.n;
                     double stat;
                     if (z_family) {
                       stat = (mean - spec.mu0) * sqrt_n / sc.sigma;
                     } else {
                       const double ss = sumsq - sc.n * mean * mean;
                       const double sd = std::sqrt(std::max(0.0, ss) / (sc.n - 1));
                       if (!(sd > 0.0))
                         throw degenerate_sample_error("simulate_filter: zero-variance sample");
                       stat = (mean - spec.mu0) * sqrt_n / sd;
                     }
                     if (!is_significant(stat, crit, spec.sidedness)) continue;
                     ++t.published;
                     t.sum_abs_effect += std::fabs(mean - spec.mu0);
                     if ((mean - spec.mu0) * ref_sign < 0.0) ++t.sign_errors;
                     const double est = estimated_power(stat, spec);
                     t.sum_est_power += est;
                     t.min_est_power = std::min(t.min_est_power, est);
                   }
                 });

  BlockTally total;
  for (const BlockTally& t : tally) {  // fixed order: independent of workers
    total.published += t.published;
    total.sum_abs_effect += t.sum_abs_effect;
    total.sign_errors += t.sign_errors;
    total.sum_est_power += t.sum_est_power;
    total.min_est_power = std::min(total.min_est_power, t.min_est_power);
  }

  FilterReport report;
  report.n_sims = config.n_sims;
  report.n_published = total.published;
  report.true_power = z_family ? z_test_power(sc.delta(spec.mu0), spec.alpha, spec.sidedness)
                               : exact_t_power(sc, spec);
  report.publication_rate = static_cast<double>(total.published) / config.n_sims;
  report.mc_se_publication_rate =
      std::sqrt(report.publication_rate * (1.0 - report.publication_rate) / config.n_sims);
  if (total.published > 0) {
    report.mean_published_abs_effect = total.sum_abs_effect / total.published;
    if (true_diff != 0.0)
      report.exaggeration_ratio = *report.mean_published_abs_effect / std::fabs(true_diff);
    report.sign_error_rate = static_cast<double>(total.sign_errors) / total.published;
    report.mean_estimated_power_published = total.sum_est_power / total.published;
    report.min_estimated_power_published = total.min_est_power;
    report.pii_vs_true = *report.mean_estimated_power_published / report.true_power;
  }
  return report;
}

double pii_lower_bound(double true_power, double alpha, const TestSpec& spec) {
  spec.validate();
  (void)alpha;  // the z-based bound G_{Z_alpha}(alpha) = 0.5 holds at any level
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("pii_lower_bound: alpha must be in (0,1)");
  if (!(true_power > 0.0 && true_power <= 1.0))
    throw std::domain_error("pii_lower_bound: true_power must be in (0,1]");
  return 0.5 / true_power;
}

std::vector<std::pair<double, double>> power_curve(double alpha, std::span<const double> z_grid) {
  std::vector<std::pair<double, double>> out;
  out.reserve(z_grid.size());
  double prev = -std::numeric_limits<double>::infinity();
  for (double z : z_grid) {
    if (!std::isfinite(z)) throw std::domain_error("power_curve: non-finite grid point");
    if (z < prev) throw std::domain_error("power_curve: grid must be sorted");
    prev = z;
    out.emplace_back(z, power_from_z(z, alpha));
  }
  return out;
}

}  // namespace sigfilter
