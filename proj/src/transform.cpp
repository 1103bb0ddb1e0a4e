// SPDX-License-Identifier: Apache-2.0
#include "shotnoise/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "shotnoise/quadrature.hpp"

namespace shotnoise {

double tau_weighted(const ProcessConfig& config, double level) {
  if (!(level > 0.0)) {
    throw std::invalid_argument("level must be positive");
  }
  double total = 0.0;
  for (const PulseType& type : config.types()) {
    total += type.rate * level_duration(type.shape, level);
  }
  return total;
}

double q_kernel(const ProcessConfig& config, double level) {
  if (!(level > 0.0)) {
    throw std::invalid_argument("level must be positive");
  }
  if (level > config.max_peak()) return 0.0;

  constexpr double kRelStep = 1e-6;
  bool near_kink = false;
  for (const PulseType& type : config.types()) {
    const double pk = peak(type.shape).value;
    if (std::abs(level - pk) <= 2.0 * kRelStep * level) {
      near_kink = true;
      break;
    }
  }
  const double h = kRelStep * level;
  if (near_kink) {
    // one-sided from below keeps the stencil off the kink
    return -level *
           (tau_weighted(config, level) - tau_weighted(config, level - 2.0 * h)) /
           (2.0 * h);
  }
  return -(tau_weighted(config, level + h) - tau_weighted(config, level - h)) /
         (2.0 * kRelStep);
}

double q_constant(const ProcessConfig& config) {
  double total = 0.0;
  for (const PulseType& type : config.types()) {
    total += type.rate / type.shape.decay_rate;
  }
  return total;
}

double analytic_laplace(const ProcessConfig& config, double alpha) {
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("alpha must be nonnegative");
  }
  if (alpha == 0.0) return 1.0;

  // -tau'(F), from the per-type crossing-time derivatives.
  auto density_of_levels = [&config](double level) {
    double total = 0.0;
    for (const PulseType& type : config.types()) {
      total -= type.rate * level_duration_slope(type.shape, level);
    }
    return total;
  };
  auto integrand = [&](double u) {
    const double level = std::exp(u);
    return -std::expm1(-alpha * level) * density_of_levels(level) * level;
  };

  // Split at each peak level: -tau' jumps there and carries an integrable
  // inverse-square-root divergence on the approach from below. Every
  // segment therefore ends at a peak; substituting u = b - v^2 turns the
  // 1/sqrt(b - u) behavior into a bounded integrand.
  std::vector<double> cuts;
  cuts.push_back(std::log(config.truncation_eps()));
  for (const PulseType& type : config.types()) {
    const double u_pk = std::log(peak(type.shape).value);
    if (u_pk > cuts.front()) cuts.push_back(u_pk);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double tol = 1e-9 / static_cast<double>(cuts.size());
  double exponent = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double b = cuts[i + 1];
    const double v_max = std::sqrt(b - cuts[i]);
    exponent += integrate_adaptive(
                    [&](double v) { return 2.0 * v * integrand(b - v * v); },
                    0.0, v_max, tol)
                    .value;
  }
  return std::exp(-exponent);
}

McLaplace mc_laplace(const SampleSet& samples, double alpha) {
  const auto n = samples.amplitudes.size();
  if (n == 0) {
    throw std::invalid_argument("mc_laplace: empty sample set");
  }
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("alpha must be nonnegative");
  }
  const Eigen::ArrayXd values = (-alpha * samples.amplitudes).exp();
  const double mean = values.mean();
  if (n == 1) return {mean, 0.0};
  const double variance =
      (values - mean).square().sum() / static_cast<double>(n - 1);
  return {mean, std::sqrt(variance / static_cast<double>(n))};
}

}  // namespace shotnoise
