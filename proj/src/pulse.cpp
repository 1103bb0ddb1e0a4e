// SPDX-License-Identifier: Apache-2.0
#include "shotnoise/pulse.hpp"

#include <cmath>
#include <stdexcept>

namespace shotnoise {

namespace {

// Profile on its own clock (t = tau + onset, pulse starts at t = 0).
double eval_base(const PulseShape& s, double t) {
  if (t < 0.0) return 0.0;
  switch (s.family) {
    case PulseFamily::kPureExp:
      return s.amp_scale * std::exp(-s.decay_rate * t);
    case PulseFamily::kGammaExp:
      return s.amp_scale * std::exp(-s.decay_rate * t) *
             (-std::expm1(-s.rise_rate * t));
  }
  return 0.0;
}

double eval_base_slope(const PulseShape& s, double t) {
  switch (s.family) {
    case PulseFamily::kPureExp:
      return -s.decay_rate * s.amp_scale * std::exp(-s.decay_rate * t);
    case PulseFamily::kGammaExp: {
      const double a = s.decay_rate;
      const double d = s.rise_rate;
      const double rise = -std::expm1(-d * t);  // 1 - e^{-dt}
      return s.amp_scale * std::exp(-a * t) *
             (d * std::exp(-d * t) - a * rise);
    }
  }
  return 0.0;
}

double peak_time_base(const PulseShape& s) {
  if (s.family == PulseFamily::kPureExp) return 0.0;
  return std::log1p(s.rise_rate / s.decay_rate) / s.rise_rate;
}

// Bisection for eval_base(t) == level on a monotone branch; runs the bracket
// down to machine resolution, well inside the 1e-10 relative tolerance
// budgeted for crossing solves.
double bisect_crossing(const PulseShape& s, double lo, double hi, double level,
                       bool increasing) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const bool above = eval_base(s, mid) >= level;
    if (above == increasing) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// First point past the peak with eval_base < level (bracket for bisection).
double bracket_tail(const PulseShape& s, double level) {
  const double t_pk = peak_time_base(s);
  double hi = t_pk + 1.0 / s.decay_rate;
  while (eval_base(s, hi) >= level) {
    hi += (hi - t_pk) + 1.0 / s.decay_rate;
  }
  return hi;
}

}  // namespace

PulseShape PulseShape::gamma_exp(double amp_scale, double decay_rate,
                                 double rise_rate) {
  PulseShape s{PulseFamily::kGammaExp, amp_scale, decay_rate, rise_rate, 0.0};
  validate(s);
  return s;
}

PulseShape PulseShape::pure_exp(double amp_scale, double decay_rate) {
  PulseShape s{PulseFamily::kPureExp, amp_scale, decay_rate, 1.0, 0.0};
  validate(s);
  return s;
}

void validate(const PulseShape& s) {
  if (!(s.amp_scale > 0.0)) {
    throw std::invalid_argument("pulse amp_scale must be positive");
  }
  if (!(s.decay_rate > 0.0)) {
    throw std::invalid_argument("pulse decay_rate must be positive");
  }
  if (s.family == PulseFamily::kGammaExp && !(s.rise_rate > 0.0)) {
    throw std::invalid_argument("pulse rise_rate must be positive");
  }
  if (!(s.onset >= 0.0)) {
    throw std::invalid_argument("pulse onset must be nonnegative");
  }
}

double eval_pulse(const PulseShape& s, double tau) {
  return eval_base(s, tau + s.onset);
}

double eval_pulse_slope(const PulseShape& s, double tau) {
  const double t = tau + s.onset;
  if (t < 0.0) return 0.0;
  return eval_base_slope(s, t);
}

PulsePeak peak(const PulseShape& s) {
  const double t_pk = peak_time_base(s);
  return {t_pk - s.onset, eval_base(s, t_pk)};
}

Support effective_support(const PulseShape& s, double eps) {
  const PulsePeak pk = peak(s);
  if (!(eps > 0.0)) {
    throw std::invalid_argument("truncation level must be positive");
  }
  if (eps >= pk.value) {
    throw std::invalid_argument("truncation level above peak");
  }
  double t_hi;
  if (s.family == PulseFamily::kPureExp) {
    t_hi = std::log(s.amp_scale / eps) / s.decay_rate;
  } else {
    const double t_pk = peak_time_base(s);
    t_hi = bisect_crossing(s, t_pk, bracket_tail(s, eps), eps,
                           /*increasing=*/false);
  }
  return {-s.onset, t_hi - s.onset};
}

double level_duration(const PulseShape& s, double level) {
  if (!(level > 0.0)) {
    throw std::invalid_argument("level must be positive");
  }
  const PulsePeak pk = peak(s);
  if (level >= pk.value) return 0.0;
  if (s.family == PulseFamily::kPureExp) {
    return std::log(s.amp_scale / level) / s.decay_rate;
  }
  const double t_pk = peak_time_base(s);
  const double t_left = bisect_crossing(s, 0.0, t_pk, level,
                                        /*increasing=*/true);
  const double t_right = bisect_crossing(s, t_pk, bracket_tail(s, level),
                                         level, /*increasing=*/false);
  return t_right - t_left;
}

double level_duration_slope(const PulseShape& s, double level) {
  if (!(level > 0.0)) {
    throw std::invalid_argument("level must be positive");
  }
  const PulsePeak pk = peak(s);
  if (level >= pk.value) return 0.0;
  if (s.family == PulseFamily::kPureExp) {
    return level >= s.amp_scale ? 0.0 : -1.0 / (s.decay_rate * level);
  }
  const double clamped = std::min(level, pk.value * (1.0 - 1e-12));
  const double t_pk = peak_time_base(s);
  const double t_left = bisect_crossing(s, 0.0, t_pk, clamped,
                                        /*increasing=*/true);
  const double t_right = bisect_crossing(s, t_pk, bracket_tail(s, clamped),
                                         clamped, /*increasing=*/false);
  return 1.0 / eval_base_slope(s, t_right) - 1.0 / eval_base_slope(s, t_left);
}

}  // namespace shotnoise
