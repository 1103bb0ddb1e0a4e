// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace shotnoise {

// splitmix64 finalizer; used for seeding and stream derivation.
std::uint64_t mix64(std::uint64_t x);

// xoshiro256** generator with counter-derived streams.
//
// Every simulation run gets its own stream, derived from (seed, stream_index)
// alone, so a set of runs produces the same draws no matter how the runs are
// scheduled across threads.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01();

  // Uniform on [lo, hi).
  double uniform(double lo, double hi);

  // Exact Poisson variate. Knuth's product method for small means,
  // Hormann's PTRS transformed rejection for large ones.
  std::int64_t poisson(double mean);

 private:
  std::int64_t poisson_knuth(double mean);
  std::int64_t poisson_ptrs(double mean);

  std::array<std::uint64_t, 4> state_;
};

}  // namespace shotnoise
