#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigfilter/meta_analysis.hpp"
#include "sigfilter/parallel.hpp"
#include "sigfilter/ttest.hpp"

namespace sigfilter {

// Gamma distribution of study precisions (1/variance, unit 1/log-ms^2).
struct GammaSpec {
  double shape = 1.0;  // alpha
  double rate = 1.0;   // beta

  double mean() const { return shape / rate; }
  double variance() const { return shape / (rate * rate); }
  double sd() const;
};

// Moment matching: E = shape/rate, Var = shape/rate^2, so rate = mean/sd^2
// and shape = mean * rate. Round trips exactly up to floating rounding.
GammaSpec gamma_from_moments(double mean, double sd);

// Monte Carlo distribution of exact t-test power at one sample size.
struct PowerDistribution {
  int sample_size = 0;
  double alpha = 0.05;
  std::vector<double> power_samples;
  double mean_power = 0.0;
  double q2_5 = 0.0;
  double q50 = 0.0;
  double q97_5 = 0.0;
  Histogram hist;  // fixed bins of width 0.02 over [0,1]
};

// Draws (effect, precision) pairs -- effect ~ Normal(effect_mean,
// effect_sd^2), precision ~ precision_model (or the fixed point value, a
// degenerate test mode) -- converts precision to an SD, and evaluates the
// exact t power at the |effect|. The (effect, precision) stream depends only
// on (seed, draw index), so runs at different sample sizes share draws
// (common random numbers) and results are identical for any worker count.
PowerDistribution sample_power_distribution(double effect_mean, double effect_sd,
                                            const GammaSpec& precision_model, int n,
                                            std::int64_t draws, const TestSpec& spec,
                                            std::uint64_t seed,
                                            ExecPolicy policy = ExecPolicy::parallel,
                                            std::optional<double> fixed_precision = {});

// Variant that draws the effect from a pool of posterior draws instead of a
// normal summary (propagates posterior skew).
PowerDistribution sample_power_distribution_from_pool(std::span<const double> effect_pool,
                                                      const GammaSpec& precision_model, int n,
                                                      std::int64_t draws, const TestSpec& spec,
                                                      std::uint64_t seed,
                                                      ExecPolicy policy = ExecPolicy::parallel);

// Ratio of one study's power estimate to the Monte Carlo power distribution.
struct PiiDistribution {
  std::string study_id;
  int sample_size = 0;
  double study_power = 0.0;
  std::vector<double> ratio_samples;
  double ci_2_5 = 0.0;
  double ci_97_5 = 0.0;
  std::int64_t n_excluded = 0;  // power samples at or below 1e-12
};

PiiDistribution pii_distribution(double study_power, const PowerDistribution& power_dist,
                                 std::string study_id = {});

// Exact two-route power of one published study: the t power evaluated at the
// magnitude of its observed effect with its own sd and n.
double study_power_estimate(const StudySummary& study, const TestSpec& spec);

}  // namespace sigfilter
