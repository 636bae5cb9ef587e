#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sigfilter/parallel.hpp"
#include "sigfilter/rng.hpp"
#include "sigfilter/student_t.hpp"

using namespace sigfilter;

TEST_SUITE("student_t") {

TEST_CASE("central t cdf against frozen reference values") {
  // Frozen from an independent incomplete-beta implementation evaluated
  // before the build.
  CHECK(student_t_cdf(0.0, 10) == 0.5);
  CHECK(student_t_cdf(1.0, 5) == doctest::Approx(0.81839126617543870).epsilon(1e-12));
  CHECK(student_t_cdf(2.0, 30) == doctest::Approx(0.97268747751850851).epsilon(1e-12));
  CHECK(student_t_cdf(-1.5, 7) == doctest::Approx(0.088649243494985010).epsilon(1e-12));
  CHECK(student_t_cdf(3.5, 2) == doctest::Approx(0.96358632497276529).epsilon(1e-12));
  CHECK(student_t_cdf(0.5, 1) == doctest::Approx(0.64758361765043326).epsilon(1e-12));
}

TEST_CASE("df=2 closed form: F(t) = 1/2 + t / (2 sqrt(2 + t^2))") {
  for (double t : {-3.0, -0.7, 0.0, 0.4, 1.9, 5.0}) {
    const double expected = 0.5 + t / (2.0 * std::sqrt(2.0 + t * t));
    CHECK(student_t_cdf(t, 2) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("quantile inverts the cdf") {
  CHECK(student_t_quantile(0.95, 35) == doctest::Approx(1.6895724577802655).epsilon(1e-10));
  CHECK(student_t_quantile(0.975, 31) == doctest::Approx(2.0395134463964077).epsilon(1e-10));
  CHECK(student_t_quantile(0.5, 12) == 0.0);
  for (double df : {1.0, 4.0, 35.0, 200.0}) {
    for (double p : {0.01, 0.2, 0.5, 0.9, 0.999}) {
      CHECK(student_t_cdf(student_t_quantile(p, df), df) == doctest::Approx(p).epsilon(1e-10));
    }
  }
}

TEST_CASE("noncentral cdf: central symmetry at ncp=0") {
  CHECK(noncentral_t_cdf(0.0, 10, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("noncentral cdf against frozen reference values") {
  // Frozen from an independent series implementation evaluated before the
  // build; absolute agreement far below the documented 1e-6.
  CHECK(noncentral_t_cdf(1.7, 30, 0.6) == doctest::Approx(0.85562881061188590).epsilon(1e-9));
  CHECK(noncentral_t_cdf(2.0, 40, 2.8) == doctest::Approx(0.21386815769220757).epsilon(1e-9));
  CHECK(noncentral_t_cdf(1.0, 5, 1.5) == doctest::Approx(0.29967516104596026).epsilon(1e-9));
  CHECK(noncentral_t_cdf(-2.0, 20, -1.0) == doctest::Approx(0.17612673270890644).epsilon(1e-9));
  CHECK(noncentral_t_cdf(2.5, 60, 2.0) == doctest::Approx(0.68340877544938240).epsilon(1e-9));
  CHECK(noncentral_t_cdf(0.5, 3, 2.2) == doctest::Approx(0.043976154476887120).epsilon(1e-9));
  CHECK(noncentral_t_cdf(4.0, 12, 3.0) == doctest::Approx(0.76093311443964540).epsilon(1e-9));
  CHECK(noncentral_t_cdf(-1.0, 8, 1.0) == doctest::Approx(0.027810284396875440).epsilon(1e-9));
  // the exact-power case-study point: 1 - CDF(1.6896; 35, 0.6) ~ 0.145
  CHECK(noncentral_t_cdf(1.6896, 35, 0.6) == doctest::Approx(0.85461208326903).epsilon(1e-9));
  CHECK(1.0 - noncentral_t_cdf(1.6896, 35, 0.6) == doctest::Approx(0.15).epsilon(0.04));
}

TEST_CASE("noncentral cdf agrees with the central cdf at ncp=0") {
  for (double df : {1.0, 3.0, 10.0, 35.0, 120.0}) {
    for (double x = -6.0; x <= 6.0; x += 0.25) {
      CHECK(std::fabs(noncentral_t_cdf(x, df, 0.0) - student_t_cdf(x, df)) <= 1e-8);
    }
  }
}

TEST_CASE("noncentral cdf is monotone in x") {
  for (double ncp : {-2.0, 0.0, 0.6, 2.8}) {
    double prev = 0.0;
    for (double x = -8.0; x <= 8.0; x += 0.05) {
      const double v = noncentral_t_cdf(x, 25, ncp);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

// Spec-mandated simulation oracle: 1e7 draws of (Z + ncp)/sqrt(chi2_df/df),
// independent of the series implementation.
TEST_CASE("noncentral cdf matches the Monte Carlo oracle within 3 MC SEs") {
  struct Point {
    double x, df, ncp;
  };
  const Point points[] = {{1.7, 30, 0.6}, {2.0, 40, 2.8}};
  constexpr std::int64_t kDraws = 10000000;
  constexpr std::int64_t kBlock = 65536;

  for (const Point& pt : points) {
    const std::int64_t blocks = block_count(kDraws, kBlock);
    std::vector<std::int64_t> hits(blocks, 0);
    for_each_block(kDraws, kBlock, ExecPolicy::parallel,
                   [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
                     RngStream rng = RngStream::derive(2024, "nct-oracle", b);
                     std::int64_t h = 0;
                     for (std::int64_t k = begin; k < end; ++k) {
                       const double z = rng.normal();
                       const double chi2_over_df = rng.gamma(pt.df / 2.0, pt.df / 2.0);
                       const double t = (z + pt.ncp) / std::sqrt(chi2_over_df);
                       if (t <= pt.x) ++h;
                     }
                     hits[b] = h;
                   });
    std::int64_t total = 0;
    for (std::int64_t h : hits) total += h;
    const double p_hat = static_cast<double>(total) / kDraws;
    const double se = std::sqrt(p_hat * (1.0 - p_hat) / kDraws);
    CHECK(std::fabs(noncentral_t_cdf(pt.x, pt.df, pt.ncp) - p_hat) <= 3.0 * se);
  }
}

TEST_CASE("incomplete beta edge cases and symmetry") {
  CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  for (double x = 0.05; x < 1.0; x += 0.1) {
    CHECK(incomplete_beta(2.5, 0.5, x) + incomplete_beta(0.5, 2.5, 1.0 - x) ==
          doctest::Approx(1.0).epsilon(1e-13));
  }
  // I_x(1, b) = 1 - (1-x)^b
  CHECK(incomplete_beta(1.0, 4.0, 0.3) ==
        doctest::Approx(1.0 - std::pow(0.7, 4.0)).epsilon(1e-13));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(student_t_cdf(0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(student_t_quantile(0.0, 10), std::domain_error);
  CHECK_THROWS_AS(noncentral_t_cdf(1.0, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(noncentral_t_cdf(std::nan(""), 10, 0.0), std::domain_error);
  CHECK_THROWS_AS(incomplete_beta(-1.0, 1.0, 0.5), std::domain_error);
}

}  // TEST_SUITE
