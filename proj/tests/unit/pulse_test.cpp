// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "shotnoise/pulse.hpp"
#include "shotnoise/random.hpp"
#include "support/oracles.hpp"

using shotnoise::effective_support;
using shotnoise::eval_pulse;
using shotnoise::level_duration;
using shotnoise::level_duration_slope;
using shotnoise::peak;
using shotnoise::PulseShape;

namespace {

PulseShape random_shape(shotnoise::Rng& rng) {
  if (rng.uniform01() < 0.5) {
    return PulseShape::pure_exp(rng.uniform(0.5, 5.0), rng.uniform(0.5, 3.0));
  }
  return PulseShape::gamma_exp(rng.uniform(0.5, 5.0), rng.uniform(0.5, 3.0),
                               rng.uniform(0.5, 5.0));
}

}  // namespace

TEST_CASE("eval_pulse evaluates the profile formulas") {
  const auto gamma = PulseShape::gamma_exp(2.0, 1.0, 1.0);
  CHECK(eval_pulse(gamma, 0.0) == 0.0);
  CHECK(eval_pulse(gamma, -0.5) == 0.0);
  CHECK(eval_pulse(gamma, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-14));

  const auto pure = PulseShape::pure_exp(1.0, 1.0);
  CHECK(eval_pulse(pure, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(eval_pulse(pure, 0.0) == 1.0);
}

TEST_CASE("pulse parameters are validated") {
  CHECK_THROWS_AS((void)PulseShape::pure_exp(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)PulseShape::pure_exp(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)PulseShape::gamma_exp(1.0, 1.0, -2.0),
                  std::invalid_argument);
}

TEST_CASE("peak location and value") {
  const auto pure = PulseShape::pure_exp(3.0, 2.0);
  CHECK(peak(pure).tau == 0.0);
  CHECK(peak(pure).value == 3.0);

  const auto gamma = PulseShape::gamma_exp(1.0, 1.0, 1.0);
  CHECK(peak(gamma).tau == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(peak(gamma).value == doctest::Approx(0.25).epsilon(1e-14));

  // grid-search cross-check on a lopsided shape
  const auto fast_rise = PulseShape::gamma_exp(5.0, 1.0, 5.0);
  CHECK(peak(fast_rise).tau ==
        doctest::Approx(std::log(6.0) / 5.0).epsilon(1e-12));
  double best = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    best = std::max(best, eval_pulse(fast_rise, 2.0 * i / 200000.0));
  }
  CHECK(peak(fast_rise).value == doctest::Approx(best).epsilon(1e-8));
}

TEST_CASE("effective_support brackets the tail at the truncation level") {
  const auto pure = PulseShape::pure_exp(1.0, 1.0);
  const auto support = effective_support(pure, std::exp(-10.0));
  CHECK(support.t_lo == 0.0);
  CHECK(support.t_hi == doctest::Approx(10.0).epsilon(1e-12));

  const auto gamma = PulseShape::gamma_exp(2.0, 1.0, 1.0);
  const auto gs = effective_support(gamma, 1e-8);
  CHECK(eval_pulse(gamma, gs.t_hi) == doctest::Approx(1e-8).epsilon(1e-6));
  // dense scan: F < eps beyond t_hi
  for (int i = 0; i <= 1000; ++i) {
    const double t = gs.t_hi * (1.0 + 1e-6) + 0.05 * i;
    CHECK(eval_pulse(gamma, t) < 1e-8);
  }

  CHECK_THROWS_AS((void)effective_support(PulseShape::pure_exp(1.0, 2.0), 1.0),
                  std::invalid_argument);
}

TEST_CASE("level_duration closed form and edge cases") {
  const auto pure = PulseShape::pure_exp(1.0, 1.0);
  CHECK(level_duration(pure, std::exp(-2.0)) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(level_duration(pure, 2.0) == 0.0);  // above the peak

  const auto gamma = PulseShape::gamma_exp(2.0, 1.0, 1.0);
  CHECK(level_duration(gamma, 2.0 * peak(gamma).value) == 0.0);
  CHECK_THROWS_AS((void)level_duration(gamma, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)level_duration(gamma, -1.0), std::invalid_argument);
}

TEST_CASE("level_duration agrees with the indicator-quadrature oracle") {
  const auto gamma = PulseShape::gamma_exp(2.0, 1.0, 1.0);
  auto gamma_profile = [&](double t) { return eval_pulse(gamma, t); };
  for (const double level : {0.1, 0.02, 0.4, 0.49}) {
    const double t_end = effective_support(gamma, level * 0.5).t_hi * 1.1;
    const double oracle = shotnoise::testing::indicator_duration(
        gamma_profile, 0.0, t_end, level, 1000000);
    CHECK(std::abs(level_duration(gamma, level) - oracle) < 1e-6);
  }

  // scan starts at the onset: the profile jumps there rather than crossing
  const auto pure = PulseShape::pure_exp(1.5, 2.0);
  auto pure_profile = [&](double t) { return eval_pulse(pure, t); };
  for (const double level : {0.1, 0.7, 1.2}) {
    const double t_end = effective_support(pure, level * 0.5).t_hi * 1.1;
    const double oracle = shotnoise::testing::indicator_duration(
        pure_profile, 0.0, t_end, level, 1000000);
    CHECK(std::abs(level_duration(pure, level) - oracle) < 1e-6);
  }
}

TEST_CASE("level_duration is nonincreasing in the level") {
  shotnoise::Rng rng(2024, 1);
  for (int rep = 0; rep < 100; ++rep) {
    const auto shape = random_shape(rng);
    const double pk = peak(shape).value;
    double f1 = rng.uniform(0.0, 1.0) * pk;
    double f2 = rng.uniform(0.0, 1.0) * pk;
    if (f1 <= 0.0 || f2 <= 0.0) continue;
    if (f1 > f2) std::swap(f1, f2);
    CHECK(level_duration(shape, f1) >= level_duration(shape, f2));
  }
}

TEST_CASE("tail law: duration approaches the log formula well below peak") {
  shotnoise::Rng rng(77, 3);
  for (int rep = 0; rep < 40; ++rep) {
    const auto shape = random_shape(rng);
    const double pk = peak(shape).value;
    for (const double frac : {1e-2, 1e-3, 1e-4}) {
      const double level = pk * frac;
      const double duration = level_duration(shape, level);
      const double log_form =
          -std::log(level / shape.amp_scale) / shape.decay_rate;
      CHECK(std::abs(duration - log_form) <= 0.05 * duration);
    }
  }
}

TEST_CASE("level_duration_slope matches a finite difference of the duration") {
  const auto gamma = PulseShape::gamma_exp(3.0, 2.0, 1.5);
  for (const double level : {0.01, 0.1, 0.3, 0.6}) {
    if (level >= peak(gamma).value) continue;
    const double h = 1e-7 * level;
    const double fd = (level_duration(gamma, level + h) -
                       level_duration(gamma, level - h)) /
                      (2.0 * h);
    CHECK(level_duration_slope(gamma, level) ==
          doctest::Approx(fd).epsilon(1e-4));
  }
  // above the peak the duration is identically zero
  CHECK(level_duration_slope(gamma, 2.0 * peak(gamma).value) == 0.0);
}

TEST_CASE("pulse integral is finite and stable under grid refinement") {
  const auto gamma = PulseShape::gamma_exp(2.0, 1.0, 1.0);
  auto profile = [&](double t) { return eval_pulse(gamma, t); };
  const double upper = effective_support(gamma, 1e-12).t_hi;
  const double coarse = shotnoise::testing::simpson(profile, 0.0, upper, 2000);
  const double fine = shotnoise::testing::simpson(profile, 0.0, upper, 4000);
  CHECK(std::abs(coarse - fine) < 1e-7);
  // exact: C * (1/a - 1/(a+d)) = 2 * (1 - 1/2) = 1
  CHECK(fine == doctest::Approx(1.0).epsilon(1e-8));
}
