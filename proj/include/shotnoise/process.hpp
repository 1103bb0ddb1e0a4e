// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "shotnoise/pulse.hpp"
#include "shotnoise/random.hpp"

namespace shotnoise {

class Rng;

// One pulse species: a profile plus its Poisson arrival rate.
struct PulseType {
  PulseShape shape;
  double rate = 1.0;  // q, pulses per unit time
};

// Full superposition model. Pulses of each type arrive as a Poisson stream
// with the given rate; placements are uniform on (-half_window, half_window)
// and the total amplitude is read off at t = 0. Tails are truncated at the
// absolute level truncation_eps, which makes supports finite and the window
// construction exact: any half_window larger than every truncated support
// reproduces the infinite-window law at the observation instant.
class ProcessConfig {
 public:
  ProcessConfig(std::vector<PulseType> types, double half_window,
                double truncation_eps, std::uint64_t seed);

  const std::vector<PulseType>& types() const { return types_; }
  double half_window() const { return half_window_; }
  double truncation_eps() const { return eps_; }
  std::uint64_t seed() const { return seed_; }

  // Truncated support of type i (level truncation_eps).
  const Support& support(std::size_t i) const { return supports_[i]; }

  // Probability that no truncated pulse covers the observation instant,
  // exp(-sum_i rate_i * support_i.length()).
  double zero_atom() const { return zero_atom_; }

  // Expected number of pulses covering t = 0, sum_i rate_i * length_i.
  double covering_intensity() const { return covering_intensity_; }

  double min_peak() const { return min_peak_; }
  double max_peak() const { return max_peak_; }

  // Nonfatal constructor diagnostics (e.g. zero-atom mass above 1%).
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Stable identifier of the generating configuration.
  std::uint64_t digest() const { return digest_; }

 private:
  std::vector<PulseType> types_;
  double half_window_;
  double eps_;
  std::uint64_t seed_;
  std::vector<Support> supports_;
  double zero_atom_ = 0.0;
  double covering_intensity_ = 0.0;
  double min_peak_ = 0.0;
  double max_peak_ = 0.0;
  std::vector<std::string> warnings_;
  std::uint64_t digest_ = 0;
};

// Amplitudes from repeated steady-state observations. Zeros are stored
// inline and also counted; they are legitimate observations (no covering
// pulse) even though log-log fitting must skip them.
struct SampleSet {
  Eigen::ArrayXd amplitudes;
  std::int64_t n_zero = 0;
  std::uint64_t config_digest = 0;
};

enum class SamplerKind {
  kNaive,    // literal construction: place every pulse in the window
  kReduced,  // equivalent in law: draw only the pulses covering t = 0
};

// Poisson(2 * half_window * rate) placement count for one type.
std::int64_t sample_pulse_count(double rate, double half_window, Rng& rng);

// One draw of the total amplitude at t = 0.
double sample_amplitude(const ProcessConfig& config, Rng& rng,
                        SamplerKind kind = SamplerKind::kReduced);

// n_runs independent draws. Bit-reproducible for a fixed config seed
// regardless of n_threads: run i always uses the stream (seed, i).
SampleSet simulate(const ProcessConfig& config, std::int64_t n_runs,
                   SamplerKind kind = SamplerKind::kReduced,
                   int n_threads = 1);

}  // namespace shotnoise
