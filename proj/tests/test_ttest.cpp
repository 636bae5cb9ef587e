#include <doctest.h>

#include <cmath>
#include <vector>

#include "sigfilter/rng.hpp"
#include "sigfilter/ttest.hpp"

using namespace sigfilter;

namespace {
const TestSpec kTwoSided{TestFamily::paired_t, Sidedness::two_sided, 0.05, 0.0};
}

TEST_SUITE("ttest") {

TEST_CASE("hand-computed example {0,1,2}") {
  // mean 1, sd 1, se 1/sqrt(3), t = sqrt(3); two-sided p from df=2 closed
  // form: 2*(1 - (1/2 + t/(2 sqrt(2+t^2)))) = 0.2254033...
  const std::vector<double> diffs{0.0, 1.0, 2.0};
  const TestResult r = paired_t_test(diffs, kTwoSided);
  CHECK(r.effect == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.sd == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.se == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r.t_stat == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r.df == 2);
  CHECK(r.p_value == doctest::Approx(0.22540333075851657).epsilon(1e-12));
}

TEST_CASE("antisymmetric sample has zero effect and p = 1") {
  const std::vector<double> diffs{-0.7, 0.7, -2.1, 2.1};
  const TestResult r = paired_t_test(diffs, kTwoSided);
  CHECK(r.effect == 0.0);
  CHECK(r.t_stat == 0.0);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("TestResult invariants hold on random samples") {
  RngStream rng(99);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 40);
    std::vector<double> diffs(n);
    for (double& d : diffs) d = rng.normal(0.3, 1.7);
    TestSpec spec = kTwoSided;
    spec.mu0 = (rep % 3 == 0) ? 0.1 : 0.0;
    const TestResult r = paired_t_test(diffs, spec);
    CHECK(r.se == doctest::Approx(r.sd / std::sqrt(static_cast<double>(r.n))).epsilon(1e-12));
    CHECK(r.t_stat == doctest::Approx((r.effect - spec.mu0) / r.se).epsilon(1e-12));
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
    CHECK(r.df == n - 1);
  }
}

TEST_CASE("one-sided p-values are coherent") {
  const std::vector<double> diffs{0.4, 1.2, 0.9, 1.4, 0.2};
  TestSpec gt = kTwoSided;
  gt.sidedness = Sidedness::one_sided_gt;
  TestSpec lt = kTwoSided;
  lt.sidedness = Sidedness::one_sided_lt;
  const double p_gt = paired_t_test(diffs, gt).p_value;
  const double p_lt = paired_t_test(diffs, lt).p_value;
  CHECK(p_gt + p_lt == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p_gt < 0.5);  // positive sample mean
}

TEST_CASE("degenerate and domain errors") {
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  CHECK_THROWS_AS(paired_t_test(zeros, kTwoSided), degenerate_sample_error);
  const std::vector<double> single{1.0};
  CHECK_THROWS_AS(paired_t_test(single, kTwoSided), std::domain_error);
  TestSpec bad = kTwoSided;
  bad.alpha = 0.0;
  const std::vector<double> ok{0.0, 1.0};
  CHECK_THROWS_AS(paired_t_test(ok, bad), std::domain_error);
}

TEST_CASE("ks distance: single point and evenly spaced grids") {
  const std::vector<double> one{0.5};
  CHECK(ks_uniform_distance(one) == doctest::Approx(0.5).epsilon(1e-15));

  std::vector<double> spaced;
  const int m = 10;
  for (int i = 0; i < m; ++i) spaced.push_back((2.0 * i + 1.0) / (2.0 * m));
  CHECK(ks_uniform_distance(spaced) == doctest::Approx(0.05).epsilon(1e-14));
}

TEST_CASE("ks distance stays in [0,1] and rejects bad input") {
  RngStream rng(5);
  std::vector<double> xs(1000);
  for (double& x : xs) x = rng.uniform01();
  const double d = ks_uniform_distance(xs);
  CHECK(d >= 0.0);
  CHECK(d <= 1.0);
  const std::vector<double> bad{0.2, 1.2};
  CHECK_THROWS_AS(ks_uniform_distance(bad), std::domain_error);
  CHECK_THROWS_AS(ks_uniform_distance(std::vector<double>{}), std::domain_error);
}

// Encodes the appendix claim: under a point null with continuous data the
// p-value is Uniform(0,1). 1e5 simulated null paired t-tests must pass the
// KS bound at the alpha = 0.01 critical value 1.63/sqrt(N).
TEST_CASE("simulated null p-values are uniform (KS bound)") {
  constexpr int kSims = 100000;
  constexpr int kN = 36;
  std::vector<double> pvals(kSims);
  RngStream rng(314159);
  std::vector<double> diffs(kN);
  for (int s = 0; s < kSims; ++s) {
    for (double& d : diffs) d = rng.normal();
    pvals[s] = paired_t_test(diffs, kTwoSided).p_value;
  }
  CHECK(ks_uniform_distance(pvals) <= 1.63 / std::sqrt(static_cast<double>(kSims)));
}

}  // TEST_SUITE
