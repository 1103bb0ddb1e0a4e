// SPDX-License-Identifier: Apache-2.0
#include "shotnoise/process.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>

namespace shotnoise {

namespace {

std::uint64_t fnv1a(std::uint64_t hash, const char* data, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) {
    hash ^= static_cast<unsigned char>(data[i]);
    hash *= 0x100000001B3ull;
  }
  return hash;
}

std::uint64_t fnv1a_value(std::uint64_t hash, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g;", v);
  return fnv1a(hash, buf, static_cast<std::size_t>(n));
}

}  // namespace

ProcessConfig::ProcessConfig(std::vector<PulseType> types, double half_window,
                             double truncation_eps, std::uint64_t seed)
    : types_(std::move(types)),
      half_window_(half_window),
      eps_(truncation_eps),
      seed_(seed) {
  if (types_.empty()) {
    throw std::invalid_argument("process needs at least one pulse type");
  }
  if (!(half_window_ > 0.0)) {
    throw std::invalid_argument("half_window must be positive");
  }
  if (!(eps_ > 0.0)) {
    throw std::invalid_argument("eps must be positive");
  }

  min_peak_ = std::numeric_limits<double>::infinity();
  max_peak_ = 0.0;
  double max_support = 0.0;
  for (const PulseType& type : types_) {
    validate(type.shape);
    if (!(type.rate > 0.0)) {
      throw std::invalid_argument("pulse rate q must be positive");
    }
    supports_.push_back(effective_support(type.shape, eps_));
    const double peak_value = peak(type.shape).value;
    min_peak_ = std::min(min_peak_, peak_value);
    max_peak_ = std::max(max_peak_, peak_value);
    max_support = std::max(max_support, supports_.back().length());
    covering_intensity_ += type.rate * supports_.back().length();
  }
  if (!(half_window_ > max_support)) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "half_window %g too small: must exceed the largest "
                  "truncated pulse support %g",
                  half_window_, max_support);
    throw std::invalid_argument(msg);
  }
  zero_atom_ = std::exp(-covering_intensity_);
  if (zero_atom_ >= 0.01) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "zero-atom probability %.4g is at or above 0.01; "
                  "decrease eps to shrink it",
                  zero_atom_);
    warnings_.emplace_back(msg);
  }

  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const PulseType& type : types_) {
    h = fnv1a_value(h, static_cast<double>(type.shape.family));
    h = fnv1a_value(h, type.shape.amp_scale);
    h = fnv1a_value(h, type.shape.decay_rate);
    h = fnv1a_value(h, type.shape.rise_rate);
    h = fnv1a_value(h, type.shape.onset);
    h = fnv1a_value(h, type.rate);
  }
  h = fnv1a_value(h, half_window_);
  h = fnv1a_value(h, eps_);
  h = fnv1a_value(h, static_cast<double>(seed_));
  digest_ = h;
}

std::int64_t sample_pulse_count(double rate, double half_window, Rng& rng) {
  if (!(rate > 0.0) || !(half_window > 0.0)) {
    throw std::invalid_argument("rate and half_window must be positive");
  }
  return rng.poisson(2.0 * half_window * rate);
}

namespace {

double sample_naive(const ProcessConfig& config, Rng& rng) {
  double total = 0.0;
  const double t_window = config.half_window();
  for (std::size_t i = 0; i < config.types().size(); ++i) {
    const PulseType& type = config.types()[i];
    const Support& support = config.support(i);
    const std::int64_t count = rng.poisson(2.0 * t_window * type.rate);
    for (std::int64_t j = 0; j < count; ++j) {
      const double placement = rng.uniform(-t_window, t_window);
      const double elapsed = -placement;  // time since the pulse's clock zero
      if (elapsed >= support.t_lo && elapsed <= support.t_hi) {
        total += eval_pulse(type.shape, elapsed);
      }
    }
  }
  return total;
}

// Conditioned on covering t = 0, a pulse of type i has its elapsed time
// uniform on the truncated support, and covering pulses of type i arrive
// with intensity rate_i * length_i. Identical in law to sample_naive.
double sample_reduced(const ProcessConfig& config, Rng& rng) {
  const std::size_t n_types = config.types().size();
  const std::int64_t count = rng.poisson(config.covering_intensity());
  double total = 0.0;
  for (std::int64_t j = 0; j < count; ++j) {
    const double u = rng.uniform01() * config.covering_intensity();
    double cumulative = 0.0;
    std::size_t pick = n_types - 1;
    for (std::size_t i = 0; i < n_types; ++i) {
      cumulative += config.types()[i].rate * config.support(i).length();
      if (u < cumulative) {
        pick = i;
        break;
      }
    }
    const Support& support = config.support(pick);
    const double elapsed = rng.uniform(support.t_lo, support.t_hi);
    total += eval_pulse(config.types()[pick].shape, elapsed);
  }
  return total;
}

}  // namespace

double sample_amplitude(const ProcessConfig& config, Rng& rng,
                        SamplerKind kind) {
  return kind == SamplerKind::kNaive ? sample_naive(config, rng)
                                     : sample_reduced(config, rng);
}

SampleSet simulate(const ProcessConfig& config, std::int64_t n_runs,
                   SamplerKind kind, int n_threads) {
  if (n_runs < 1) {
    throw std::invalid_argument("n_runs must be at least 1");
  }
  SampleSet out;
  out.amplitudes.resize(n_runs);
  out.config_digest = config.digest();

  const int workers = std::max(
      1, std::min<int>(n_threads, static_cast<int>(
                                      std::min<std::int64_t>(n_runs, 256))));
  auto worker = [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      Rng rng(config.seed(), static_cast<std::uint64_t>(i));
      out.amplitudes[i] = sample_amplitude(config, rng, kind);
    }
  };
  if (workers == 1) {
    worker(0, n_runs);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (n_runs + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::int64_t begin = w * chunk;
      const std::int64_t end = std::min<std::int64_t>(n_runs, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end);
    }
    for (std::thread& t : pool) t.join();
  }
  out.n_zero = (out.amplitudes == 0.0).count();
  return out;
}

}  // namespace shotnoise
