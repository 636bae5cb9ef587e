#pragma once

#include <span>
#include <stdexcept>

namespace sigfilter {

enum class TestFamily { z, one_sample_t, paired_t };
enum class Sidedness { one_sided_gt, one_sided_lt, two_sided };

// Description of the hypothesis test applied to each comparison: family,
// sidedness, Type I error level, and the null value (log ms).
struct TestSpec {
  TestFamily family = TestFamily::paired_t;
  Sidedness sidedness = Sidedness::two_sided;
  double alpha = 0.05;
  double mu0 = 0.0;

  void validate() const;
};

struct TestResult {
  double t_stat = 0.0;
  int df = 0;
  double effect = 0.0;  // mean of differences, log ms
  double se = 0.0;
  double sd = 0.0;
  int n = 0;
  double p_value = 1.0;
};

// Ground-truth generating process for one study: true effect, true SD of one
// difference score, and sample size.
struct EffectScenario {
  double mu = 0.0;
  double sigma = 1.0;
  int n = 2;

  // True standardized effect (mu - mu0) * sqrt(n) / sigma.
  double delta(double mu0) const;
  void validate() const;
};

// Zero-variance sample: no test statistic exists.
struct degenerate_sample_error : std::domain_error {
  using std::domain_error::domain_error;
};

// Paired/one-sample t-test on difference scores. Throws std::domain_error for
// fewer than two observations and degenerate_sample_error when all values
// coincide.
TestResult paired_t_test(std::span<const double> diffs, const TestSpec& spec);

// Sup-norm distance between the empirical CDF of pvals and the Uniform(0,1)
// CDF. Values must lie in [0,1].
double ks_uniform_distance(std::span<const double> pvals);

}  // namespace sigfilter
