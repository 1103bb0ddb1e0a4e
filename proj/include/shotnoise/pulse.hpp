// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace shotnoise {

// Built-in pulse profile families. Both rise (instantly or smoothly) and then
// decay exponentially, so F(tau) ~ amp_scale * exp(-decay_rate * tau) far
// into the tail.
enum class PulseFamily {
  kGammaExp,  // C * exp(-a*tau) * (1 - exp(-d*tau)),  tau >= 0
  kPureExp,   // C * exp(-a*tau),                      tau >= 0
};

// Immutable parametric pulse profile. The pulse starts at tau = -onset and is
// identically zero before that; built-in factories use onset = 0, anchoring
// the pulse at its own start rather than at its maximum (a pure time shift,
// so level durations are unaffected).
struct PulseShape {
  PulseFamily family = PulseFamily::kPureExp;
  double amp_scale = 1.0;   // C, amplitude units
  double decay_rate = 1.0;  // a, 1/time
  double rise_rate = 1.0;   // d, 1/time (kGammaExp only)
  double onset = 0.0;       // b, time before the profile clock's zero

  static PulseShape gamma_exp(double amp_scale, double decay_rate,
                              double rise_rate);
  static PulseShape pure_exp(double amp_scale, double decay_rate);
};

// Throws std::invalid_argument when a parameter violates its constraint.
void validate(const PulseShape& shape);

// F(tau); total function, zero before onset. Always >= 0.
double eval_pulse(const PulseShape& shape, double tau);

// dF/dtau where F is differentiable (tau past onset).
double eval_pulse_slope(const PulseShape& shape, double tau);

struct PulsePeak {
  double tau = 0.0;    // location of the maximum
  double value = 0.0;  // F at the maximum
};
PulsePeak peak(const PulseShape& shape);

struct Support {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double length() const { return t_hi - t_lo; }
};

// Smallest interval outside of which F < eps. t_lo is the onset; t_hi is the
// level-eps crossing on the decaying tail, found by bisection.
// Requires 0 < eps < peak value.
Support effective_support(const PulseShape& shape, double eps);

// Lebesgue measure of { tau : F(tau) >= level }. Nonincreasing in the level,
// zero above the peak. For kPureExp this is log(C/level)/a in closed form;
// for kGammaExp the two crossings are bisected on the rising and falling
// branches.
double level_duration(const PulseShape& shape, double level);

// d(level_duration)/d(level), <= 0. Computed through the crossing times:
// the derivative of a crossing is 1/F'(t) there. Returns 0 at or above the
// peak; levels within ~1e-12 of the peak are clamped away from it to keep
// the (integrable) divergence finite.
double level_duration_slope(const PulseShape& shape, double level);

}  // namespace shotnoise
