// SPDX-License-Identifier: Apache-2.0
#include "shotnoise/density.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "shotnoise/quadrature.hpp"
#include "shotnoise/transform.hpp"

namespace shotnoise {

namespace {

// tau'(F) is kinked at every pulse peak level and -tau' diverges like an
// inverse square root below gamma-family peaks, so the kernel enters the
// march through per-cell moments (product integration): smooth cells from
// sided endpoint evaluations, cells at or just below a peak by adaptive
// quadrature with the square-root substitution.

double q_kernel_sided(const ProcessConfig& config, double level, bool below) {
  constexpr double kRelStep = 1e-6;
  const double h = kRelStep * level;
  const double a = below ? level - 2.0 * h : level;
  const double b = below ? level : level + 2.0 * h;
  if (a <= 0.0) return q_constant(config);
  return -level * (tau_weighted(config, b) - tau_weighted(config, a)) /
         (2.0 * h);
}

std::vector<double> peak_levels(const ProcessConfig& config) {
  std::vector<double> peaks;
  for (const PulseType& type : config.types()) {
    peaks.push_back(peak(type.shape).value);
  }
  std::sort(peaks.begin(), peaks.end());
  peaks.erase(std::unique(peaks.begin(), peaks.end()), peaks.end());
  return peaks;
}

// Zeroth and first moments of Q over one cell: I0 = integral of Q,
// I1 = integral of Q * (F - lo). The product rule pairs these with a
// density that is linear across the cell, which keeps the mass AND the
// placement of an inverse-square-root kernel spike exact.
struct CellMoments {
  double mass = 0.0;   // I0
  double tilt = 0.0;   // I1 / step, in [0, mass]
};

// Kernel through the crossing-time form of tau' rather than the finite
// difference: the FD stencil smears the peak divergence over its own
// width, which would leave a step-independent mass error around peaks.
double kernel_exact_at(const ProcessConfig& config, double level) {
  if (level <= 0.0) return q_constant(config);
  double slope_sum = 0.0;
  for (const PulseType& type : config.types()) {
    slope_sum -= type.rate * level_duration_slope(type.shape, level);
  }
  return level * slope_sum;
}

// Adaptive moments over [a, b] with weight (F - lo); the substitution
// F = b - v^2 absorbs a divergence at the right endpoint.
void kernel_moments_exact(const ProcessConfig& config, double a, double b,
                          double lo, double step, CellMoments& out) {
  if (b <= a) return;
  const double v_max = std::sqrt(b - a);
  auto q_at = [&](double v) { return kernel_exact_at(config, b - v * v); };
  out.mass += integrate_adaptive([&](double v) { return 2.0 * v * q_at(v); },
                                 0.0, v_max, 1e-11 * std::max(1.0, b - a))
                  .value;
  out.tilt +=
      integrate_adaptive(
          [&](double v) { return 2.0 * v * q_at(v) * (b - v * v - lo); },
          0.0, v_max, 1e-11 * std::max(1.0, b - a))
          .value /
      step;
}

struct KernelCells {
  // weights for the density values at the cell's F-endpoints:
  // contribution of cell k = w_lo[k] * rho(A - lo_k) + w_hi[k] * rho(A - hi_k)
  Eigen::ArrayXd w_lo;
  Eigen::ArrayXd w_hi;
  double mass(Eigen::Index k) const { return w_lo[k] + w_hi[k]; }

  // linear reconstruction Q(u) = a + b (u - u_lo) over the matching u-cell,
  // from the moments; endpoints are positive iff the cell is tilt-balanced
  double lin_a(Eigen::Index k, double step) const {
    return (4.0 * w_hi[k] - 2.0 * w_lo[k]) / step;
  }
  double lin_b(Eigen::Index k, double step) const {
    return 6.0 * (w_lo[k] - w_hi[k]) / (step * step);
  }
  bool balanced(Eigen::Index k) const {
    const double m = mass(k);
    return std::abs(w_hi[k] - 0.5 * m) <= 0.1 * m;
  }
};

// Integrals of the power interpolant through (u_lo, rho_lo), (u_hi, rho_hi):
//   p0 = integral of rho over the cell
//   p1 = integral of rho * (u - u_lo) over the cell
// Exact whenever rho is a pure power of u, second-order accurate otherwise,
// and always positive; this is what keeps a singular A^(Q-1) head from
// biasing the march (a chord systematically overshoots a convex power).
struct DensityCellMoments {
  double p0 = 0.0;
  double p1 = 0.0;
};

DensityCellMoments power_cell_moments(double u_lo, double u_hi, double rho_lo,
                                      double rho_hi) {
  DensityCellMoments out;
  const double ratio = u_hi / u_lo;
  const double log_ratio = std::log(ratio);
  const double beta = std::log(rho_hi / rho_lo) / log_ratio;
  auto power_integral = [&](double order) {
    // integral of (u/u_lo)^beta * u^(order-1) du over the cell, / u_lo^(order-1)
    const double exponent = beta + order;
    if (std::abs(exponent) < 1e-8) {
      return u_lo * log_ratio * (1.0 + 0.5 * exponent * log_ratio);
    }
    return u_lo * (std::pow(ratio, exponent) - 1.0) / exponent;
  };
  out.p0 = rho_lo * power_integral(1.0);
  out.p1 = rho_lo * u_lo * power_integral(2.0) - u_lo * out.p0;
  return out;
}

// Direct product integral of Q(a - u) * rho(u) over a low-u cell, needed
// where a kernel jump or spike meets the (possibly singular) density head:
// the two-point forms place the kernel mass half a cell wrong there, and
// because the equation is homogeneous the resulting one-off error at
// A = peak + O(seed) would persist as a permanent offset of the whole tail.
// The substitution u = w^2 bounds a u^(Q-1) head for any Q > 0; the kernel
// jump locations a - P split the range so they sit on segment boundaries.
template <typename RhoFn>
double singular_product_integral(const ProcessConfig& config, double a,
                                 double u_lo, double u_hi, RhoFn&& rho_fn) {
  std::vector<double> cuts{u_lo};
  for (const PulseType& type : config.types()) {
    const double u_peak = a - peak(type.shape).value;
    if (u_peak > u_lo && u_peak < u_hi) cuts.push_back(u_peak);
  }
  cuts.push_back(u_hi);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double w_lo = std::sqrt(cuts[s]);
    const double w_hi = std::sqrt(cuts[s + 1]);
    total += integrate_adaptive(
                 [&](double w) {
                   const double u = w * w;
                   return 2.0 * w * kernel_exact_at(config, a - u) * rho_fn(u);
                 },
                 w_lo, w_hi, 1e-12)
                 .value;
  }
  return total;
}

KernelCells kernel_cells(const ProcessConfig& config, double step,
                         Eigen::Index count) {
  const std::vector<double> peaks = peak_levels(config);
  const double max_peak = peaks.back();
  KernelCells cells;
  cells.w_lo.setZero(count);
  cells.w_hi.setZero(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    const double lo = step * static_cast<double>(k);
    const double hi = lo + step;
    if (lo >= max_peak) continue;

    // the kernel grows like 1/sqrt(P - F) below each peak P, so a linear
    // endpoint model overshoots badly for cells within a band below it;
    // those cells (and any containing a peak) get adaptive exact moments
    bool needs_exact = false;
    for (const double pk : peaks) {
      if (pk > lo && pk <= hi + 16.0 * step) needs_exact = true;
    }
    CellMoments moments;
    if (needs_exact) {
      double left = lo;
      for (const double pk : peaks) {
        if (pk > lo && pk < hi) {
          kernel_moments_exact(config, left, pk, lo, step, moments);
          left = pk;
        }
      }
      kernel_moments_exact(config, left, hi, lo, step, moments);
    } else {
      const double q_lo =
          lo == 0.0 ? q_constant(config) : q_kernel_sided(config, lo, false);
      const double q_hi = q_kernel_sided(config, hi, true);
      // linear kernel across the cell
      moments.mass = 0.5 * step * (q_lo + q_hi);
      moments.tilt = step * (q_lo / 6.0 + q_hi / 3.0);
    }
    moments.mass = std::max(0.0, moments.mass);
    moments.tilt = std::clamp(moments.tilt, 0.0, moments.mass);
    // rho(A - F) is linear in F across the cell:
    //   integral Q(F) rho(A-F) dF = (I0 - I1/h) rho(A-lo) + (I1/h) rho(A-hi)
    cells.w_lo[k] = moments.mass - moments.tilt;
    cells.w_hi[k] = moments.tilt;
  }
  return cells;
}

}  // namespace

double DensityGrid::rho_at(double x) const {
  if (x <= 0.0 || x > a_max()) return 0.0;
  if (x <= seed_radius) {
    return head_coefficient * std::pow(x, head_exponent - 1.0);
  }
  const auto n = values.size();
  const double position = x / step;  // in units of grid index + 1
  const auto k = static_cast<Eigen::Index>(position);
  if (k >= n) return values[n - 1];
  // near the seed the density is still power-like and a chord would bias
  // reads of a singular head; interpolate in log-log there
  if (x < 20.0 * seed_radius && values[k - 1] > 0.0 && values[k] > 0.0) {
    const double u_k = step * static_cast<double>(k);
    const double frac_log =
        std::log(x / u_k) / std::log((u_k + step) / u_k);
    return values[k - 1] *
           std::pow(values[k] / values[k - 1], frac_log);
  }
  const double frac = position - static_cast<double>(k);
  return values[k - 1] + frac * (values[k] - values[k - 1]);
}

DensityGrid solve_density(const ProcessConfig& config, double step,
                          double a_max) {
  if (!(step > 0.0) || !(a_max > 0.0)) {
    throw std::invalid_argument("step and a_max must be positive");
  }
  if (step > a_max / 1000.0) {
    throw std::invalid_argument("step must be at most a_max / 1000");
  }
  const auto n = static_cast<Eigen::Index>(std::llround(a_max / step));
  const double q_const = q_constant(config);
  if (q_const >= 20.0) {
    throw std::runtime_error(
        "kernel limit too large for the forward march; refine the model");
  }

  constexpr Eigen::Index kSeedNodes = 10;
  const KernelCells cell = kernel_cells(config, step, n);

  // Provisional head coefficient 1; the overall scale is fixed at the end.
  Eigen::ArrayXd rho(n);
  for (Eigen::Index j = 0; j < kSeedNodes; ++j) {
    rho[j] = std::pow(step * static_cast<double>(j + 1), q_const - 1.0);
  }

  // Exact integrals of u^(Q-1) and u^Q over the seed cells.
  std::array<double, kSeedNodes + 1> power_table{};
  std::array<double, kSeedNodes + 1> power_table_1{};
  for (Eigen::Index m = 0; m <= kSeedNodes; ++m) {
    const double u = step * static_cast<double>(m);
    power_table[m] = std::pow(u, q_const) / q_const;
    power_table_1[m] = std::pow(u, q_const + 1.0) / (q_const + 1.0);
  }

  // Per-cell density moments (power interpolant through the node pair),
  // built as the march fills the nodes in.
  Eigen::ArrayXd rho_p0(n), rho_p1(n);
  rho_p0.setConstant(std::numeric_limits<double>::quiet_NaN());
  rho_p1.setConstant(std::numeric_limits<double>::quiet_NaN());
  auto fill_density_moments = [&](Eigen::Index m) {
    // u-cell m spans [m*step, (m+1)*step]; node values rho_m, rho_{m+1}
    if (rho[m - 1] > 0.0 && rho[m] > 0.0) {
      const auto moments = power_cell_moments(
          step * static_cast<double>(m), step * static_cast<double>(m + 1),
          rho[m - 1], rho[m]);
      rho_p0[m] = moments.p0;
      rho_p1[m] = moments.p1;
    }
  };

  for (Eigen::Index j = kSeedNodes; j < n; ++j) {
    // index convention: rho[j] sits at A = (j+1) * step. In the convolution
    // integral over u = A - F, the u-cell [m*step, (m+1)*step) maps to the
    // F-cell with index c = node-m-1 and reversed orientation.
    const Eigen::Index node = j + 1;

    // head cells m = 0..9: kernel reconstructed linearly in u from its cell
    // moments, density integrated exactly as the seeded power; a cell whose
    // kernel is jump-tilted gets the full adaptive product integral instead
    const double a_j = step * static_cast<double>(node);
    double head_part = 0.0;
    for (Eigen::Index m = 0; m < kSeedNodes; ++m) {
      const Eigen::Index c = node - m - 1;
      if (cell.mass(c) == 0.0) continue;
      if (cell.balanced(c)) {
        const double u_m = step * static_cast<double>(m);
        const double dp0 = power_table[m + 1] - power_table[m];
        const double dp1 =
            power_table_1[m + 1] - power_table_1[m] - u_m * dp0;
        head_part += cell.lin_a(c, step) * dp0 + cell.lin_b(c, step) * dp1;
      } else {
        const double u_lo = step * static_cast<double>(m);
        head_part += singular_product_integral(
            config, a_j, u_lo, u_lo + step,
            [&](double u) { return std::pow(u, q_const - 1.0); });
      }
    }

    // grid cells: kernel by exact moments; density by the power
    // interpolant where the kernel is tilt-balanced, node endpoints at
    // jump/spike cells
    double grid_part = 0.0;
    for (Eigen::Index m = kSeedNodes; m <= node - 2; ++m) {
      const Eigen::Index c = node - m - 1;
      if (cell.balanced(c) && std::isfinite(rho_p0[m])) {
        grid_part +=
            cell.lin_a(c, step) * rho_p0[m] + cell.lin_b(c, step) * rho_p1[m];
      } else {
        grid_part += cell.w_lo[c] * rho[m] + cell.w_hi[c] * rho[m - 1];
      }
    }
    grid_part += cell.w_hi[0] * rho[node - 2];  // known part of the last cell

    const double denom = a_j - cell.w_lo[0];
    rho[j] = std::max(0.0, (head_part + grid_part) / denom);
    fill_density_moments(j);
  }

  // Continuous mass: exact head integral plus grid trapezoid.
  const double head_mass = power_table[kSeedNodes];  // already u^Q / Q
  double grid_mass = 0.5 * (rho[kSeedNodes - 1] + rho[n - 1]);
  for (Eigen::Index j = kSeedNodes; j + 1 < n; ++j) grid_mass += rho[j];
  grid_mass *= step;
  const double total = head_mass + grid_mass;

  // The grid must reach far enough that the density has died out.
  const Eigen::Index tail_start = n - std::max<Eigen::Index>(1, n / 20);
  double tail_mass = 0.5 * (rho[tail_start] + rho[n - 1]);
  for (Eigen::Index j = tail_start + 1; j + 1 < n; ++j) tail_mass += rho[j];
  tail_mass *= step;
  if (!(total > 0.0) || !std::isfinite(total) || tail_mass > 1e-4 * total) {
    throw std::runtime_error(
        "density mass not resolved on [0, a_max]; increase a_max");
  }

  DensityGrid grid;
  grid.step = step;
  grid.head_exponent = q_const;
  grid.seed_radius = step * static_cast<double>(kSeedNodes);
  grid.zero_atom = config.zero_atom();
  const double scale = (1.0 - grid.zero_atom) / total;
  grid.head_coefficient = scale;
  grid.values = rho * scale;
  return grid;
}

double cdf_from_density(const DensityGrid& grid, double x) {
  const double a_max = grid.a_max();
  if (!(x >= 0.0)) {
    throw std::invalid_argument("cdf argument must be nonnegative");
  }
  if (x > a_max * (1.0 + 1e-12)) {
    throw std::invalid_argument("cdf argument above the solved grid");
  }
  x = std::min(x, a_max);
  const double q = grid.head_exponent;
  if (x <= grid.seed_radius) {
    return std::min(
        1.0, grid.zero_atom + grid.head_coefficient * std::pow(x, q) / q);
  }
  double mass = grid.head_coefficient * std::pow(grid.seed_radius, q) / q;
  const auto k = static_cast<Eigen::Index>(x / grid.step);  // full nodes <= x
  constexpr Eigen::Index kSeedNodes = 10;
  double trapz = 0.0;
  for (Eigen::Index node = kSeedNodes; node < k; ++node) {
    trapz += 0.5 * (grid.values[node - 1] + grid.values[node]);
  }
  mass += trapz * grid.step;
  const double a_k = grid.step * static_cast<double>(k);
  if (x > a_k) {
    mass += 0.5 * (grid.values[k - 1] + grid.rho_at(x)) * (x - a_k);
  }
  return std::min(1.0, grid.zero_atom + mass);
}

double residual_check(const DensityGrid& grid, const ProcessConfig& config) {
  const auto n = grid.values.size();
  const double h = grid.step;
  // Same exact kernel cell moments at half resolution, with the density
  // read through its interpolant at the half-step points: an independent
  // discretization of the convolution.
  const KernelCells half = kernel_cells(config, 0.5 * h, 2 * n);

  constexpr Eigen::Index kSeedNodes = 10;
  const double q = grid.head_exponent;
  const double k_head = grid.head_coefficient;
  double worst = 0.0;
  for (Eigen::Index j = kSeedNodes; j < n; ++j) {
    const Eigen::Index node = j + 1;
    const double a_j = h * static_cast<double>(node);
    double integral = 0.0;
    for (Eigen::Index i = 0; i < 2 * node; ++i) {
      const double f_lo = static_cast<double>(i) * 0.5 * h;
      const double u_hi = a_j - f_lo;
      const double u_lo = u_hi - 0.5 * h;
      if (half.mass(i) == 0.0) continue;
      if (u_hi <= grid.seed_radius * (1.0 + 1e-12)) {
        // the density here is the power head, singular at u -> 0; pair the
        // kernel's linear reconstruction with exact power integrals, or
        // integrate the product directly when the kernel is jump-tilted
        if (half.balanced(i)) {
          const double dp0 =
              k_head * (std::pow(u_hi, q) - std::pow(u_lo, q)) / q;
          const double dp1 = k_head *
                                 (std::pow(u_hi, q + 1.0) -
                                  std::pow(u_lo, q + 1.0)) /
                                 (q + 1.0) -
                             u_lo * dp0;
          integral += half.lin_a(i, 0.5 * h) * dp0 +
                      half.lin_b(i, 0.5 * h) * dp1;
        } else {
          integral += singular_product_integral(
              config, a_j, u_lo, u_hi, [&](double u) {
                return k_head * std::pow(u, q - 1.0);
              });
        }
        continue;
      }
      if (u_lo < grid.seed_radius && !half.balanced(i)) {
        // straddling cell with a jump-tilted kernel
        integral += singular_product_integral(
            config, a_j, u_lo, u_hi,
            [&grid](double u) { return grid.rho_at(u); });
        continue;
      }
      integral += half.w_lo[i] * grid.rho_at(u_hi) +
                  half.w_hi[i] * grid.rho_at(u_lo);
    }
    const double lhs = a_j * grid.values[j];
    const double defect = std::abs(lhs - integral) / (lhs + 1e-12);
    worst = std::max(worst, defect);
  }
  return worst;
}

}  // namespace shotnoise
