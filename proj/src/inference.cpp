// SPDX-License-Identifier: Apache-2.0
#include "shotnoise/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "shotnoise/random.hpp"

namespace shotnoise {

EmpiricalCdf::EmpiricalCdf(const SampleSet& samples) {
  n_total_ = samples.amplitudes.size();
  if (n_total_ == 0) {
    throw std::invalid_argument("empirical CDF needs at least one sample");
  }
  std::vector<double> positives;
  positives.reserve(static_cast<std::size_t>(n_total_));
  for (Eigen::Index i = 0; i < samples.amplitudes.size(); ++i) {
    const double a = samples.amplitudes[i];
    if (a < 0.0) {
      throw std::invalid_argument("amplitudes must be nonnegative");
    }
    if (a > 0.0) positives.push_back(a);
  }
  n_zero_ = n_total_ - static_cast<std::int64_t>(positives.size());
  std::sort(positives.begin(), positives.end());
  positives_.resize(static_cast<Eigen::Index>(positives.size()));
  std::copy(positives.begin(), positives.end(), positives_.data());
}

double EmpiricalCdf::value(double x) const {
  if (x < 0.0) return 0.0;
  const double* begin = positives_.data();
  const double* end = begin + positives_.size();
  const auto below = std::upper_bound(begin, end, x) - begin;
  return static_cast<double>(n_zero_ + below) / static_cast<double>(n_total_);
}

double EmpiricalCdf::positive_quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("quantile level must be in [0, 1]");
  }
  if (positives_.size() == 0) {
    throw std::runtime_error("no positive samples");
  }
  const auto idx = static_cast<Eigen::Index>(
      p * static_cast<double>(positives_.size() - 1));
  return positives_[idx];
}

CensoredCdf::CensoredCdf(const EmpiricalCdf& source, double threshold)
    : source_(source), threshold_(threshold) {
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("detection threshold must be positive");
  }
}

double CensoredCdf::value(double x) const {
  if (x < threshold_) {
    throw std::invalid_argument("below detection threshold");
  }
  return source_.value(x);
}

PowerLawFit fit_log_points(const Eigen::ArrayXd& log_x,
                           const Eigen::ArrayXd& log_g) {
  const auto n = log_x.size();
  if (n < 2 || log_g.size() != n) {
    throw std::invalid_argument("fit needs >= 2 matched points");
  }
  if (log_g.maxCoeff() == log_g.minCoeff()) {
    throw std::runtime_error("flat fit window");
  }
  const double mean_x = log_x.mean();
  const double mean_g = log_g.mean();
  const Eigen::ArrayXd dx = log_x - mean_x;
  const double var_x = dx.square().sum();
  if (!(var_x > 0.0)) {
    throw std::invalid_argument("fit grid points must be distinct");
  }
  const double slope = (dx * (log_g - mean_g)).sum() / var_x;
  const double intercept = mean_g - slope * mean_x;
  const Eigen::ArrayXd residual = log_g - intercept - slope * log_x;
  PowerLawFit fit;
  fit.exponent = slope;
  fit.log_intercept = intercept;
  fit.window_lo = std::exp(log_x.minCoeff());
  fit.window_hi = std::exp(log_x.maxCoeff());
  fit.n_points = static_cast<int>(n);
  fit.rms_residual = std::sqrt(residual.square().mean());
  return fit;
}

namespace {

Eigen::ArrayXd geometric_grid(double lo, double hi, int count) {
  Eigen::ArrayXd grid(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (int k = 0; k < count; ++k) {
    grid[k] = std::log(lo) + step * static_cast<double>(k);
  }
  return grid;
}

}  // namespace

PowerLawFit fit_power_law(const CensoredCdf& view, double x_lo, double x_hi,
                          int n_grid, int bootstrap_reps, std::uint64_t seed) {
  if (!(x_lo >= view.threshold())) {
    throw std::invalid_argument("fit window must start at or above threshold");
  }
  if (!(x_lo < x_hi)) {
    throw std::invalid_argument("fit window must have x_lo < x_hi");
  }
  if (n_grid < 5) {
    throw std::invalid_argument("fit grid needs at least 5 points");
  }
  if (!(view.value(x_lo) > 0.0)) {
    throw std::runtime_error("no mass in fit window");
  }

  const Eigen::ArrayXd log_grid = geometric_grid(x_lo, x_hi, n_grid);
  Eigen::ArrayXd log_g(n_grid);
  const auto n_total = view.source().n_total();
  std::vector<std::int64_t> cumulative(static_cast<std::size_t>(n_grid));
  for (int k = 0; k < n_grid; ++k) {
    // exp(log x_lo) can land an ulp under the threshold; pin the endpoint
    const double x = k == 0 ? x_lo : std::exp(log_grid[k]);
    const double g = view.value(x);
    cumulative[static_cast<std::size_t>(k)] =
        std::llround(g * static_cast<double>(n_total));
    log_g[k] = std::log(g);
  }
  PowerLawFit fit = fit_log_points(log_grid, log_g);

  if (bootstrap_reps > 0) {
    // Resample the amplitudes as the fit sees them: the grid evaluations
    // depend on the data only through the bin counts between grid points,
    // so n iid draws bucketed by the empirical bin masses have exactly the
    // law of a resample of the raw amplitudes.
    std::vector<double> bucket_cdf(static_cast<std::size_t>(n_grid));
    for (int k = 0; k < n_grid; ++k) {
      bucket_cdf[static_cast<std::size_t>(k)] =
          static_cast<double>(cumulative[static_cast<std::size_t>(k)]) /
          static_cast<double>(n_total);
    }
    Rng rng(seed, 0xB007ull);
    std::vector<double> exponents;
    exponents.reserve(static_cast<std::size_t>(bootstrap_reps));
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n_grid));
    std::vector<double> xs, gs;
    for (int rep = 0; rep < bootstrap_reps; ++rep) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::int64_t i = 0; i < n_total; ++i) {
        const double u = rng.uniform01();
        const auto bucket = static_cast<std::size_t>(
            std::lower_bound(bucket_cdf.begin(), bucket_cdf.end(), u) -
            bucket_cdf.begin());
        if (bucket < counts.size()) ++counts[bucket];
      }
      xs.clear();
      gs.clear();
      std::int64_t running = 0;
      for (int k = 0; k < n_grid; ++k) {
        running += counts[static_cast<std::size_t>(k)];
        if (running > 0) {
          xs.push_back(log_grid[k]);
          gs.push_back(std::log(static_cast<double>(running) /
                                static_cast<double>(n_total)));
        }
      }
      if (xs.size() < 2) continue;
      const auto m = static_cast<Eigen::Index>(xs.size());
      Eigen::Map<const Eigen::ArrayXd> lx(xs.data(), m);
      Eigen::Map<const Eigen::ArrayXd> lg(gs.data(), m);
      try {
        exponents.push_back(fit_log_points(lx, lg).exponent);
      } catch (const std::runtime_error&) {
        // degenerate replicate (flat window); skip
      }
    }
    if (exponents.size() >= 20) {
      std::sort(exponents.begin(), exponents.end());
      const auto m = exponents.size();
      auto percentile = [&](double p) {
        const double pos = p * static_cast<double>(m - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const auto hi = std::min(lo + 1, m - 1);
        const double frac = pos - static_cast<double>(lo);
        return exponents[lo] + frac * (exponents[hi] - exponents[lo]);
      };
      fit.ci_lo = percentile(0.025);
      fit.ci_hi = percentile(0.975);
    }
  }
  return fit;
}

double extrapolate(const PowerLawFit& fit, double x) {
  if (!(x > 0.0)) {
    throw std::invalid_argument("extrapolation point must be positive");
  }
  const double g = std::exp(fit.log_intercept + fit.exponent * std::log(x));
  return std::clamp(g, 0.0, 1.0);
}

FitWindow default_fit_window(const EmpiricalCdf& ecdf, double threshold,
                             double cap) {
  const double hi = std::min(ecdf.positive_quantile(0.25), cap);
  if (!(threshold < hi)) {
    throw std::runtime_error(
        "default fit window is empty: threshold at or above the window cap");
  }
  return {threshold, hi};
}

std::vector<ProbeRow> extrapolation_report(const SampleSet& samples,
                                           double threshold,
                                           const std::vector<double>& probes,
                                           double cap, int n_grid,
                                           std::uint64_t seed) {
  for (const double x : probes) {
    if (!(x > 0.0) || !(x < threshold)) {
      throw std::invalid_argument(
          "probes must be strictly below the detection threshold");
    }
  }
  std::vector<ProbeRow> rows;
  if (probes.empty()) return rows;

  const EmpiricalCdf ecdf(samples);
  const CensoredCdf view(ecdf, threshold);
  const FitWindow window = default_fit_window(ecdf, threshold, cap);
  const PowerLawFit fit =
      fit_power_law(view, window.lo, window.hi, n_grid, 200, seed);
  rows.reserve(probes.size());
  for (const double x : probes) {
    ProbeRow row;
    row.x = x;
    row.extrapolated = extrapolate(fit, x);
    row.empirical = ecdf.value(x);
    row.rel_error = row.empirical > 0.0
                        ? std::abs(row.extrapolated - row.empirical) /
                              row.empirical
                        : std::numeric_limits<double>::infinity();
    rows.push_back(row);
  }
  return rows;
}

double longest_stable_slope_span(const Eigen::ArrayXd& log_x,
                                 const Eigen::ArrayXd& log_g,
                                 double window_halfwidth, double band) {
  const auto n = log_x.size();
  if (n < 3 || log_g.size() != n) return 0.0;

  // Windowed local slopes at each interior point.
  std::vector<double> centers, slopes;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> xs, gs;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(log_x[j] - log_x[i]) <= window_halfwidth) {
        xs.push_back(log_x[j]);
        gs.push_back(log_g[j]);
      }
    }
    if (xs.size() < 3) continue;
    const auto m = static_cast<Eigen::Index>(xs.size());
    Eigen::Map<const Eigen::ArrayXd> lx(xs.data(), m);
    Eigen::Map<const Eigen::ArrayXd> lg(gs.data(), m);
    try {
      slopes.push_back(fit_log_points(lx, lg).exponent);
      centers.push_back(log_x[i]);
    } catch (const std::runtime_error&) {
      // flat window: skip this center
    }
  }

  double best = 0.0;
  const auto m = slopes.size();
  for (std::size_t lo = 0; lo < m; ++lo) {
    double smin = slopes[lo];
    double smax = slopes[lo];
    for (std::size_t hi = lo; hi < m; ++hi) {
      smin = std::min(smin, slopes[hi]);
      smax = std::max(smax, slopes[hi]);
      if (smin <= 0.0 || smax > (1.0 + band) * smin) break;
      best = std::max(best, centers[hi] - centers[lo]);
    }
  }
  return best;
}

}  // namespace shotnoise
