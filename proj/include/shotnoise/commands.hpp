// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shotnoise/config.hpp"
#include "shotnoise/density.hpp"
#include "shotnoise/inference.hpp"
#include "shotnoise/process.hpp"

namespace shotnoise {

// Subcommand drivers shared by the CLI binary and the integration tests.
// Each writes plot-ready CSV into run.out_dir and returns what it wrote.

std::filesystem::path run_simulate(const RunConfig& run, int threads = 1,
                                   SamplerKind sampler = SamplerKind::kReduced);

// Monte Carlo vs quadrature check of the generating-function identity,
// one row per alpha: alpha,w_mc,w_mc_stderr,w_analytic,abs_diff,sigma_ratio.
std::filesystem::path run_verify(
    const RunConfig& run,
    const std::vector<double>& alphas = {0.1, 0.5, 1.0, 2.0, 5.0},
    int threads = 1);

struct DensityOptions {
  std::optional<double> step;
  std::optional<double> a_max;
};
std::filesystem::path run_density(const RunConfig& run,
                                  const DensityOptions& options = {});

struct FitOutput {
  PowerLawFit fit;
  std::filesystem::path points_csv;
  std::filesystem::path summary_csv;
};
FitOutput run_fit(const RunConfig& run, int threads = 1);

std::filesystem::path run_extrapolate(const RunConfig& run,
                                      const std::vector<double>& probes,
                                      int threads = 1);

// Reproduction scenario: ten gamma_exp pulse types with amplitude scales
// uniform on (1,5), decay rates on (1,3), rise rates on (1,5), all arrival
// rates 1, truncated so every pulse lives within 10 time units of onset.
// Parameters are drawn once from the seed; 1000-run and 100000-run sample
// sets are written as log G vs log x tables together with the fitted and
// theoretical small-amplitude exponents.
struct DemoOutput {
  double q_theory = 0.0;
  PowerLawFit fit_large;        // fit at n = 100000
  double stable_span = 0.0;     // log-length of the slope-stable region
  std::filesystem::path lnln_csv;
  std::filesystem::path lnln_small_csv;
  std::filesystem::path summary_csv;
  std::filesystem::path pulses_csv;
};
DemoOutput run_paper_demo(std::uint64_t seed, const std::string& out_dir,
                          int threads = 1);

// Default a_max for the density solver: mean + 12 standard deviations of
// the total amplitude, from the moment formulas of the pulse integrals.
double default_density_extent(const ProcessConfig& config);

}  // namespace shotnoise
