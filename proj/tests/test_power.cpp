#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "sigfilter/parallel.hpp"
#include "sigfilter/power.hpp"
#include "sigfilter/rng.hpp"
#include "sigfilter/student_t.hpp"
#include "sigfilter/ttest.hpp"

using namespace sigfilter;

namespace {
const TestSpec kOneSided{TestFamily::one_sample_t, Sidedness::one_sided_gt, 0.05, 0.0};
const TestSpec kTwoSided{TestFamily::paired_t, Sidedness::two_sided, 0.05, 0.0};
}

TEST_SUITE("power") {

TEST_CASE("exact power: published example and frozen values") {
  // 0.14539388732620787 frozen from an independent noncentral-t evaluation
  // computed before the build; the published 15% rounding sits within 0.005.
  const double p = exact_t_power({0.1, 1.0, 36}, kOneSided);
  CHECK(std::fabs(p - 0.15) <= 0.005);
  CHECK(p == doctest::Approx(0.14539388732620787).epsilon(1e-10));
  CHECK(exact_t_power({0.055, 0.1, 32}, kTwoSided) ==
        doctest::Approx(0.85396890742992380).epsilon(1e-9));
}

TEST_CASE("size under the null") {
  for (double alpha : {0.01, 0.05, 0.2}) {
    for (int n : {2, 5, 36, 100}) {
      TestSpec two = kTwoSided;
      two.alpha = alpha;
      CHECK(std::fabs(exact_t_power({0.0, 1.3, n}, two) - alpha) <= 1e-6);
      TestSpec one = kOneSided;
      one.alpha = alpha;
      CHECK(std::fabs(exact_t_power({0.0, 0.7, n}, one) - alpha) <= 1e-6);
      TestSpec lt = kOneSided;
      lt.alpha = alpha;
      lt.sidedness = Sidedness::one_sided_lt;
      CHECK(std::fabs(exact_t_power({0.0, 0.7, n}, lt) - alpha) <= 1e-6);
    }
  }
}

TEST_CASE("power at least the size, nondecreasing in n and |mu|") {
  double prev = 0.0;
  for (int n = 10; n <= 200; n += 5) {
    const double p = exact_t_power({0.05, 0.2, n}, kTwoSided);
    CHECK(p >= kTwoSided.alpha - 1e-12);
    CHECK(p >= prev - 1e-12);
    prev = p;
  }
  prev = 0.0;
  for (double mu = 0.0; mu <= 0.2; mu += 0.005) {
    const double p = exact_t_power({mu, 0.2, 30}, kTwoSided);
    CHECK(p >= prev - 1e-12);
    prev = p;
  }
}

// Independent route: simulate 1e6 paired t-tests and compare rejection rate.
TEST_CASE("exact power matches a simulation oracle within 3 MC SEs") {
  const EffectScenario sc{0.055, 0.1, 32};
  const double exact = exact_t_power(sc, kTwoSided);
  constexpr std::int64_t kSims = 1000000;
  constexpr std::int64_t kBlock = 16384;
  const double crit = student_t_quantile(1.0 - 0.5 * kTwoSided.alpha, sc.n - 1);

  const std::int64_t blocks = block_count(kSims, kBlock);
  std::vector<std::int64_t> hits(blocks, 0);
  for_each_block(kSims, kBlock, ExecPolicy::parallel,
                 [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
                   RngStream rng = RngStream::derive(777, "power-oracle", b);
                   std::int64_t h = 0;
                   for (std::int64_t k = begin; k < end; ++k) {
                     double sum = 0.0, sumsq = 0.0;
                     for (int i = 0; i < sc.n; ++i) {
                       const double x = rng.normal(sc.mu, sc.sigma);
                       sum += x;
                       sumsq += x * x;
                     }
                     const double mean = sum / sc.n;
                     const double sd =
                         std::sqrt(std::max(0.0, sumsq - sc.n * mean * mean) / (sc.n - 1));
                     const double t = mean * std::sqrt(static_cast<double>(sc.n)) / sd;
                     if (std::fabs(t) >= crit) ++h;
                   }
                   hits[b] = h;
                 });
  std::int64_t total = 0;
  for (std::int64_t h : hits) total += h;
  const double p_hat = static_cast<double>(total) / kSims;
  const double se = std::sqrt(p_hat * (1.0 - p_hat) / kSims);
  CHECK(std::fabs(exact - p_hat) <= 3.0 * se);
}

TEST_CASE("z-test power identities") {
  CHECK(z_test_power(0.0, 0.05, Sidedness::one_sided_gt) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(z_test_power(0.0, 0.05, Sidedness::two_sided) == doctest::Approx(0.05).epsilon(1e-12));
  // one-sided z power at delta = z_alpha is exactly 1 - Phi(0) = 0.5
  CHECK(z_test_power(1.6448536269514722, 0.05, Sidedness::one_sided_gt) ==
        doctest::Approx(0.5).epsilon(1e-10));
  CHECK(z_test_power(-1.0, 0.05, Sidedness::one_sided_lt) ==
        z_test_power(1.0, 0.05, Sidedness::one_sided_gt));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(exact_t_power({0.1, 1.0, 1}, kOneSided), std::domain_error);
  TestSpec z = kOneSided;
  z.family = TestFamily::z;
  CHECK_THROWS_AS(exact_t_power({0.1, 1.0, 36}, z), std::domain_error);
  CHECK_THROWS_AS(exact_t_power({0.1, -1.0, 36}, kOneSided), std::domain_error);
  CHECK_THROWS_AS(z_test_power(0.0, 0.0, Sidedness::two_sided), std::domain_error);
}

}  // TEST_SUITE
