#pragma once

#include "sigfilter/ttest.hpp"

namespace sigfilter {

// Exact power of the one-sample/paired t-test under EffectScenario, using the
// noncentral t distribution with ncp = (mu - mu0) sqrt(n) / sigma. Two-sided
// power sums both rejection tails. Requires n >= 2 and a t family.
double exact_t_power(const EffectScenario& scenario, const TestSpec& spec);

// Power of the z test with known sigma at standardized effect delta.
double z_test_power(double delta, double alpha, Sidedness sidedness);

}  // namespace sigfilter
