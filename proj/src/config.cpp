// SPDX-License-Identifier: Apache-2.0
#include "shotnoise/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace shotnoise {

namespace {

struct KeyValue {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, KeyValue> entries;
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<Section> tokenize(const std::string& text) {
  std::vector<Section> sections;
  sections.push_back({"", 0, {}});  // top-level (no keys allowed)
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      std::string name = line;
      if (name.size() >= 4 && name.substr(0, 2) == "[[" &&
          name.substr(name.size() - 2) == "]]") {
        name = trim(name.substr(2, name.size() - 4));
        sections.push_back({name + "[]", line_no, {}});
      } else if (name.back() == ']') {
        name = trim(name.substr(1, name.size() - 2));
        sections.push_back({name, line_no, {}});
      } else {
        throw ConfigError(line_no, "malformed section header '" + line + "'");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line_no, "expected key = value, got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(line_no, "expected key = value, got '" + line + "'");
    }
    Section& section = sections.back();
    if (section.name.empty()) {
      throw ConfigError(line_no, "key '" + key + "' outside any section");
    }
    if (section.entries.count(key) != 0) {
      throw ConfigError(line_no, "duplicate key '" + key + "'");
    }
    section.entries[key] = {value, line_no, false};
  }
  return sections;
}

double parse_number(const Section& section, const std::string& key) {
  const KeyValue& kv = section.entries.at(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(kv.value, &used);
    if (used != kv.value.size() || !std::isfinite(v)) {
      throw std::invalid_argument("");
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError(kv.line,
                      "key '" + key + "': expected a number, got '" +
                          kv.value + "'");
  }
}

std::uint64_t parse_unsigned(const Section& section, const std::string& key) {
  const KeyValue& kv = section.entries.at(key);
  try {
    std::size_t used = 0;
    const auto v = std::stoull(kv.value, &used);
    if (used != kv.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(kv.line, "key '" + key +
                                   "': expected a nonnegative integer, got '" +
                                   kv.value + "'");
  }
}

class SectionReader {
 public:
  explicit SectionReader(Section& section) : section_(section) {}

  bool has(const std::string& key) const {
    return section_.entries.count(key) != 0;
  }
  double number(const std::string& key) {
    mark(key);
    return parse_number(section_, key);
  }
  double positive(const std::string& key) {
    const double v = number(key);
    if (!(v > 0.0)) {
      throw ConfigError(section_.entries.at(key).line,
                        "key '" + key + "': must be positive");
    }
    return v;
  }
  double nonnegative(const std::string& key) {
    const double v = number(key);
    if (!(v >= 0.0)) {
      throw ConfigError(section_.entries.at(key).line,
                        "key '" + key + "': must be nonnegative");
    }
    return v;
  }
  std::uint64_t unsigned_int(const std::string& key) {
    mark(key);
    return parse_unsigned(section_, key);
  }
  std::string text(const std::string& key) {
    mark(key);
    return section_.entries.at(key).value;
  }
  int line(const std::string& key) const {
    return section_.entries.at(key).line;
  }

  void reject_unknown() const {
    for (const auto& [key, kv] : section_.entries) {
      if (!kv.used) {
        throw ConfigError(kv.line, "unknown key '" + key + "' in section [" +
                                       section_.name + "]");
      }
    }
  }
  void require(const std::string& key) const {
    if (!has(key)) {
      throw ConfigError(section_.line, "section [" + section_.name +
                                           "]: missing required key '" + key +
                                           "'");
    }
  }

 private:
  void mark(const std::string& key) { section_.entries.at(key).used = true; }
  Section& section_;
};

PulseType parse_pulse(Section& section) {
  SectionReader reader(section);
  reader.require("family");
  reader.require("C");
  reader.require("a");
  reader.require("q");
  const std::string family = reader.text("family");
  PulseType type;
  if (family == "pure_exp") {
    if (reader.has("d")) {
      throw ConfigError(reader.line("d"),
                        "key 'd' is not applicable to family pure_exp");
    }
    type.shape = PulseShape::pure_exp(reader.positive("C"),
                                      reader.positive("a"));
  } else if (family == "gamma_exp") {
    reader.require("d");
    type.shape = PulseShape::gamma_exp(
        reader.positive("C"), reader.positive("a"), reader.positive("d"));
  } else {
    throw ConfigError(reader.line("family"),
                      "key 'family': expected pure_exp or gamma_exp, got '" +
                          family + "'");
  }
  if (reader.has("b")) type.shape.onset = reader.nonnegative("b");
  type.rate = reader.positive("q");
  reader.reject_unknown();
  return type;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  std::vector<Section> sections = tokenize(text);

  std::vector<PulseType> types;
  Section* process_section = nullptr;
  Section* inference_section = nullptr;
  for (std::size_t i = 1; i < sections.size(); ++i) {
    Section& section = sections[i];
    if (section.name == "pulse[]") {
      types.push_back(parse_pulse(section));
    } else if (section.name == "process") {
      if (process_section != nullptr) {
        throw ConfigError(section.line, "duplicate section [process]");
      }
      process_section = &section;
    } else if (section.name == "inference") {
      if (inference_section != nullptr) {
        throw ConfigError(section.line, "duplicate section [inference]");
      }
      inference_section = &section;
    } else if (section.name == "pulse") {
      throw ConfigError(section.line,
                        "pulse sections are repeated: write [[pulse]]");
    } else {
      throw ConfigError(section.line, "unknown section [" + section.name + "]");
    }
  }
  if (types.empty()) {
    throw ConfigError(0, "config needs at least one [[pulse]] section");
  }

  double min_peak = std::numeric_limits<double>::infinity();
  for (const PulseType& type : types) {
    min_peak = std::min(min_peak, peak(type.shape).value);
  }

  double eps = 1e-8 * min_peak;
  std::uint64_t seed = 1;
  std::int64_t n_runs = 10000;
  std::optional<double> half_window;
  std::string out_dir = ".";
  if (process_section != nullptr) {
    SectionReader reader(*process_section);
    if (reader.has("eps")) eps = reader.positive("eps");
    if (reader.has("seed")) seed = reader.unsigned_int("seed");
    if (reader.has("half_window")) half_window = reader.positive("half_window");
    if (reader.has("n_runs")) {
      n_runs = static_cast<std::int64_t>(reader.unsigned_int("n_runs"));
      if (n_runs < 1) {
        throw ConfigError(reader.line("n_runs"),
                          "key 'n_runs': must be at least 1");
      }
    }
    if (reader.has("out_dir")) out_dir = reader.text("out_dir");
    reader.reject_unknown();
  }
  if (!half_window.has_value()) {
    double max_support = 0.0;
    for (const PulseType& type : types) {
      max_support =
          std::max(max_support, effective_support(type.shape, eps).length());
    }
    half_window = 1.05 * max_support;
  }

  InferenceSettings inference;
  if (inference_section != nullptr) {
    SectionReader reader(*inference_section);
    if (reader.has("x0")) inference.threshold = reader.positive("x0");
    if (reader.has("fit_x_lo")) inference.fit_x_lo = reader.positive("fit_x_lo");
    if (reader.has("fit_x_hi")) inference.fit_x_hi = reader.positive("fit_x_hi");
    if (reader.has("n_grid")) {
      inference.n_grid = static_cast<int>(reader.unsigned_int("n_grid"));
      if (inference.n_grid < 5) {
        throw ConfigError(reader.line("n_grid"),
                          "key 'n_grid': must be at least 5");
      }
    }
    reader.reject_unknown();
  }

  try {
    return RunConfig{ProcessConfig(std::move(types), *half_window, eps, seed),
                     n_runs, inference, out_dir};
  } catch (const std::invalid_argument& err) {
    const int line = process_section != nullptr ? process_section->line : 0;
    throw ConfigError(line, err.what());
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(0, "cannot open config file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

}  // namespace shotnoise
