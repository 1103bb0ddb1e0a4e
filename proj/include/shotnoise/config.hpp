// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "shotnoise/process.hpp"

namespace shotnoise {

// Configuration / usage problem; the CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message)
      : std::runtime_error(line > 0
                               ? "line " + std::to_string(line) + ": " + message
                               : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct InferenceSettings {
  std::optional<double> threshold;  // x0
  std::optional<double> fit_x_lo;
  std::optional<double> fit_x_hi;
  int n_grid = 25;
};

struct RunConfig {
  ProcessConfig process;
  std::int64_t n_runs = 10000;
  InferenceSettings inference;
  std::string out_dir = ".";
};

// Key-value config format:
//
//   [process]            optional section
//     half_window = 12   default: 1.05 * largest truncated support
//     eps = 1e-8         default: 1e-8 * smallest pulse peak
//     seed = 1
//     n_runs = 10000
//     out_dir = out
//
//   [[pulse]]            one section per pulse type, at least one
//     family = pure_exp | gamma_exp
//     C = 1.0            amplitude scale
//     a = 1.0            decay rate
//     d = 1.0            rise rate (gamma_exp only)
//     b = 0.0            onset lead time, optional
//     q = 1.0            arrival rate
//
//   [inference]          optional section
//     x0 = 0.1           detection threshold
//     fit_x_lo = 0.1     optional window override
//     fit_x_hi = 0.4     optional window override
//     n_grid = 25
//
// '#' starts a comment. Unknown keys, duplicate keys, type errors and
// constraint violations throw ConfigError with the offending line.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

}  // namespace shotnoise
