// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include "shotnoise/process.hpp"

namespace shotnoise {

// Numerical amplitude density on a uniform grid, with an analytic power-law
// head on (0, seed_radius]:
//   rho(A) = head_coefficient * A^(head_exponent - 1),  0 < A <= seed_radius,
// grid values at A_j = j * step for j = 1..N beyond that, and a zero atom
// (no covering pulse) folded into the normalization.
struct DensityGrid {
  double step = 0.0;
  Eigen::ArrayXd values;  // rho at A_j = (j+1) * step, j = 0..N-1
  double head_exponent = 0.0;     // Q
  double head_coefficient = 0.0;  // K
  double seed_radius = 0.0;       // 10 * step
  double zero_atom = 0.0;         // p0

  double a_max() const { return step * static_cast<double>(values.size()); }
  double a_at(Eigen::Index j) const {
    return step * static_cast<double>(j + 1);
  }
  // rho at any point in (0, a_max]: head formula below seed_radius, linear
  // interpolation between grid nodes above it.
  double rho_at(double x) const;
};

// Solves A rho(A) = integral_0^A Q(F) rho(A-F) dF by forward marching.
//
// The head on (0, 10h] is seeded with the scale-free solution A^(Q-1) of the
// constant-kernel equation; the march uses the trapezoid rule away from the
// seed region and exact power-law cell integrals inside it, so the (0, h)
// endpoint needs no special casing even when Q < 1. Everything is rescaled
// at the end so zero_atom + total continuous mass = 1.
//
// Requires step <= a_max / 1000. Throws std::runtime_error when the density
// has not decayed by a_max ("increase a_max").
DensityGrid solve_density(const ProcessConfig& config, double step,
                          double a_max);

// G(x) = zero_atom + integral of rho up to x (exact head integral plus
// trapezoid partial sums). Requires 0 <= x <= a_max.
double cdf_from_density(const DensityGrid& grid, double x);

// Max relative defect of the solved grid against an independent midpoint
// discretization of the convolution (half-step kernel nodes, interpolated
// density). Sensitive to both solver bugs and discretization error, and
// first-order in the step for the latter.
double residual_check(const DensityGrid& grid, const ProcessConfig& config);

}  // namespace shotnoise
