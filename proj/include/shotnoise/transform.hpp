// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shotnoise/process.hpp"

namespace shotnoise {

// Rate-weighted total level duration tau(F) = sum_i rate_i * duration_i(F).
// Nonincreasing in F, zero above the largest pulse peak. Requires F > 0.
double tau_weighted(const ProcessConfig& config, double level);

// Convolution kernel Q(F) = -F * tau'(F), evaluated by central finite
// difference with relative step 1e-6. tau is kinked at pulse peak levels,
// so a level within the stencil of a peak uses the one-sided-from-below
// difference instead. Tends to q_constant as F -> 0+.
double q_kernel(const ProcessConfig& config, double level);

// Small-amplitude limit of the kernel, sum_i rate_i / decay_rate_i, exact
// for exponential-tail pulse families.
double q_constant(const ProcessConfig& config);

// Laplace transform w(alpha) = E[exp(-alpha * A)] of the truncated process,
// computed from the level-duration measure: w = exp(-J) with
//   J = integral over F in (eps, max peak) of (1 - e^{-alpha F}) (-tau'(F)).
// The integral is taken in u = log F, split at each pulse peak level (where
// -tau' has an integrable divergence) and evaluated by adaptive quadrature
// to absolute tolerance 1e-9 on J.
double analytic_laplace(const ProcessConfig& config, double alpha);

struct McLaplace {
  double value = 0.0;
  double std_error = 0.0;
};

// Sample mean and standard error of exp(-alpha * A_i).
McLaplace mc_laplace(const SampleSet& samples, double alpha);

}  // namespace shotnoise
