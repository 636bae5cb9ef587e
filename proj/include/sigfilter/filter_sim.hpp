#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sigfilter/parallel.hpp"
#include "sigfilter/ttest.hpp"

namespace sigfilter {

// Ground-truth scenario for the publication-filter experiment: every
// simulated study draws n values from Normal(mu, sigma^2), tests them under
// spec, and is "published" iff significant.
struct FilterSimConfig {
  EffectScenario scenario;
  TestSpec spec;
  std::int64_t n_sims = 100000;
  std::uint64_t seed = 0;

  void validate() const;
};

// Consequences of publishing only significant results. The published-
// conditional fields are absent (not NaN) when nothing was published, and
// exaggeration_ratio is additionally absent when the true effect equals mu0.
struct FilterReport {
  double true_power = 0.0;
  double publication_rate = 0.0;
  double mc_se_publication_rate = 0.0;
  std::int64_t n_sims = 0;
  std::int64_t n_published = 0;
  std::optional<double> mean_published_abs_effect;
  std::optional<double> exaggeration_ratio;               // Type M
  std::optional<double> sign_error_rate;                  // Type S, among published
  std::optional<double> mean_estimated_power_published;   // post-hoc estimator
  std::optional<double> min_estimated_power_published;
  std::optional<double> pii_vs_true;
};

FilterReport simulate_filter(const FilterSimConfig& config,
                             ExecPolicy policy = ExecPolicy::parallel);

// Lower bound on the published-conditional power estimate divided by the true
// power, for one-sided z-family filtering: every published z is at least
// z_alpha, where the post-hoc estimate is exactly 0.5, so the ratio is at least
// 0.5 / true_power. For t families the same number is reported as an
// approximate bound (the t critical value exceeds z_alpha).
double pii_lower_bound(double true_power, double alpha, const TestSpec& spec);

// Post-hoc power (one-sided estimator) along a sorted grid of observed
// z values. Throws std::domain_error if the grid is unsorted or non-finite.
std::vector<std::pair<double, double>> power_curve(double alpha, std::span<const double> z_grid);

}  // namespace sigfilter
