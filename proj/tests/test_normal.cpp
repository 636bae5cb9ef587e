#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sigfilter/normal.hpp"

using namespace sigfilter;

// Expected values frozen from an arbitrary-precision erf oracle
// (40-digit series evaluation, rounded to double).

TEST_SUITE("normal") {

TEST_CASE("cdf at zero is exactly one half") { CHECK(std_normal_cdf(0.0) == 0.5); }

TEST_CASE("cdf matches the erf oracle") {
  CHECK(std_normal_cdf(1.6449) == doctest::Approx(0.95000478253165370).epsilon(1e-12));
  CHECK(std_normal_cdf(0.3) == doctest::Approx(0.61791142218895264).epsilon(1e-13));
  CHECK(std_normal_cdf(1.0) == doctest::Approx(0.84134474606854295).epsilon(1e-13));
  CHECK(std_normal_cdf(2.5) == doctest::Approx(0.99379033467422386).epsilon(1e-13));
  // spec pins 1.6449 -> 0.95 at 1e-4
  CHECK(std_normal_cdf(1.6449) == doctest::Approx(0.95).epsilon(1e-4));
}

TEST_CASE("symmetry: Phi(-x) + Phi(x) = 1") {
  for (double x : {0.3, 1.0, 2.5}) {
    CHECK(std_normal_cdf(-x) + std_normal_cdf(x) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("cdf is monotone on a grid") {
  double prev = -1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double x = -10.0 + i * 0.01;
    const double v = std_normal_cdf(x);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("quantile matches the oracle") {
  CHECK(std_normal_quantile(0.5) == 0.0);
  CHECK(std_normal_quantile(0.95) == doctest::Approx(1.6448536269514722).epsilon(1e-12));
  CHECK(std_normal_quantile(0.95) == doctest::Approx(1.6449).epsilon(1e-4));
  CHECK(std_normal_quantile(0.99) == doctest::Approx(2.3263478740408411).epsilon(1e-12));
  CHECK(std_normal_quantile(0.975) == doctest::Approx(1.9599639845400542).epsilon(1e-12));
  CHECK(std_normal_quantile(0.3) == doctest::Approx(-0.52440051270804078).epsilon(1e-12));
  CHECK(std_normal_quantile(0.999) == doctest::Approx(3.0902323061678135).epsilon(1e-12));
}

TEST_CASE("cdf/quantile round trip within 1e-9 across (1e-8, 1-1e-8)") {
  for (double p : {0.01, 0.3, 0.999}) {
    CHECK(std::fabs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-9);
  }
  // log-spaced sweep into both tails plus a uniform sweep of the bulk
  for (int k = 1; k <= 800; ++k) {
    const double p = std::exp(std::log(1e-8) * k / 800.0);
    CHECK(std::fabs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-9);
    CHECK(std::fabs(std_normal_cdf(std_normal_quantile(1.0 - p)) - (1.0 - p)) <= 1e-9);
  }
  for (int k = 1; k < 1000; ++k) {
    const double p = k / 1000.0;
    CHECK(std::fabs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-9);
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(std_normal_cdf(std::nan("")), std::domain_error);
  CHECK_THROWS_AS(std_normal_cdf(INFINITY), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(-0.2), std::domain_error);
  CHECK_THROWS_AS(std_normal_pdf(std::nan("")), std::domain_error);
}

}  // TEST_SUITE
