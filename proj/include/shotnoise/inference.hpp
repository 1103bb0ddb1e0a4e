// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <vector>

#include "shotnoise/process.hpp"

namespace shotnoise {

// Right-continuous empirical null frequency G(x) = (#zeros + #{0 < A_i <= x})
// divided by the total count. Zeros sit in the denominator and in the count
// below every positive x, but are never placed on the log axis.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(const SampleSet& samples);

  double value(double x) const;
  std::int64_t n_total() const { return n_total_; }
  std::int64_t n_zero() const { return n_zero_; }
  const Eigen::ArrayXd& positives() const { return positives_; }

  // Empirical quantile of the positive samples, p in [0, 1].
  double positive_quantile(double p) const;

 private:
  Eigen::ArrayXd positives_;  // sorted ascending
  std::int64_t n_total_ = 0;
  std::int64_t n_zero_ = 0;
};

// Detection-threshold view: G is only observable at or above the threshold.
// Queries below it throw; the values themselves are untouched.
class CensoredCdf {
 public:
  CensoredCdf(const EmpiricalCdf& source, double threshold);

  double value(double x) const;
  double threshold() const { return threshold_; }
  const EmpiricalCdf& source() const { return source_; }

 private:
  const EmpiricalCdf& source_;
  double threshold_;
};

struct PowerLawFit {
  double exponent = 0.0;       // fitted slope of log G vs log x
  double log_intercept = 0.0;  // fitted intercept
  double window_lo = 0.0;
  double window_hi = 0.0;
  int n_points = 0;
  double rms_residual = 0.0;  // in log G units
  // 95% bootstrap percentile interval on the exponent (NaN when skipped).
  double ci_lo = std::numeric_limits<double>::quiet_NaN();
  double ci_hi = std::numeric_limits<double>::quiet_NaN();
};

// Ordinary least squares of log G on log x over given points; no bootstrap.
PowerLawFit fit_log_points(const Eigen::ArrayXd& log_x,
                           const Eigen::ArrayXd& log_g);

// OLS of log G(x_k) on log x_k over a geometric grid of n_grid points
// spanning [x_lo, x_hi], with a percentile bootstrap CI on the exponent
// from `bootstrap_reps` resamples of the underlying amplitudes (pass 0 to
// skip the bootstrap).
//
// Requires threshold <= x_lo < x_hi and n_grid >= 5. Throws
// std::runtime_error "no mass in fit window" when G(x_lo) = 0 and
// "flat fit window" when G is constant across the grid.
PowerLawFit fit_power_law(const CensoredCdf& view, double x_lo, double x_hi,
                          int n_grid = 25, int bootstrap_reps = 200,
                          std::uint64_t seed = 0x5EEDF17EDull);

// Power-law prediction exp(log_intercept + exponent * log x), clamped to
// [0, 1]. Requires x > 0.
double extrapolate(const PowerLawFit& fit, double x);

// Default fit window: [threshold, min(25% quantile of positives, cap)].
// The cap should be the smallest pulse peak level when the generating
// process is known; the constant-kernel power law can fail above it.
struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
};
FitWindow default_fit_window(
    const EmpiricalCdf& ecdf, double threshold,
    double cap = std::numeric_limits<double>::infinity());

struct ProbeRow {
  double x = 0.0;
  double extrapolated = 0.0;
  double empirical = 0.0;  // uncensored hold-out value
  double rel_error = 0.0;
};

// End-to-end censored extrapolation: censor at the threshold, fit on the
// default window, extrapolate to each probe (all strictly below the
// threshold) and compare against the uncensored empirical CDF.
std::vector<ProbeRow> extrapolation_report(
    const SampleSet& samples, double threshold,
    const std::vector<double>& probes,
    double cap = std::numeric_limits<double>::infinity(), int n_grid = 25,
    std::uint64_t seed = 0x5EEDF17EDull);

// Longest contiguous span of `log_x` on which a windowed local slope of
// log G stays within a relative band (max <= (1 + band) * min). Used for
// log-log linearity diagnostics; returns the span length in log units.
double longest_stable_slope_span(const Eigen::ArrayXd& log_x,
                                 const Eigen::ArrayXd& log_g,
                                 double window_halfwidth = 0.25,
                                 double band = 0.15);

}  // namespace shotnoise
