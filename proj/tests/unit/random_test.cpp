// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "shotnoise/random.hpp"

using shotnoise::Rng;

namespace {

struct Moments {
  double mean;
  double variance;
};

Moments poisson_moments(double rate, int n, std::uint64_t seed) {
  Rng rng(seed, 7);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = static_cast<double>(rng.poisson(rate));
    sum += k;
    sum_sq += k * k;
  }
  const double mean = sum / n;
  return {mean, sum_sq / n - mean * mean};
}

}  // namespace

TEST_CASE("uniform01 stays in [0,1) and fills the interval") {
  Rng rng(1234, 0);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 1e-4);
  CHECK(hi > 1.0 - 1e-4);
}

TEST_CASE("streams are reproducible and distinct") {
  Rng a(99, 5), b(99, 5), c(99, 6);
  for (int i = 0; i < 16; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    CHECK(va != c.next_u64());
  }
}

TEST_CASE("poisson mean zero and negative mean") {
  Rng rng(3, 0);
  CHECK(rng.poisson(0.0) == 0);
  CHECK_THROWS_AS((void)rng.poisson(-1.0), std::invalid_argument);
}

TEST_CASE("poisson moments match at small mean (Knuth branch)") {
  const int n = 100000;
  const auto m = poisson_moments(4.0, n, 11);
  const double sigma_mean = std::sqrt(4.0 / n);
  CHECK(std::abs(m.mean - 4.0) < 3.5 * sigma_mean);
  // Var(s^2) for Poisson ~ (lambda + 2 lambda^2)/n
  const double sigma_var = std::sqrt((4.0 + 2.0 * 16.0) / n);
  CHECK(std::abs(m.variance - 4.0) < 3.5 * sigma_var);
}

TEST_CASE("poisson moments match at large mean (PTRS branch)") {
  const int n = 100000;
  const double lambda = 35.0;
  const auto m = poisson_moments(lambda, n, 13);
  CHECK(std::abs(m.mean - lambda) < 3.5 * std::sqrt(lambda / n));
  const double sigma_var =
      std::sqrt((lambda + 2.0 * lambda * lambda) / n);
  CHECK(std::abs(m.variance - lambda) < 3.5 * sigma_var);
}

TEST_CASE("poisson tail probabilities match the exact pmf at the switch") {
  // P(X <= k) for lambda near the Knuth/PTRS boundary, both sides.
  for (const double lambda : {29.5, 31.0}) {
    const int n = 60000;
    Rng rng(17, 21);
    const std::int64_t k_probe = static_cast<std::int64_t>(lambda);
    int below = 0;
    for (int i = 0; i < n; ++i) {
      if (rng.poisson(lambda) <= k_probe) ++below;
    }
    double cdf = 0.0;
    for (std::int64_t k = 0; k <= k_probe; ++k) {
      cdf += std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
    }
    const double se = std::sqrt(cdf * (1.0 - cdf) / n);
    CHECK(std::abs(static_cast<double>(below) / n - cdf) < 4.0 * se);
  }
}
