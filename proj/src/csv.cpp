// SPDX-License-Identifier: Apache-2.0
#include "shotnoise/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace shotnoise {

std::string format_full(double value) {
  char buf[40];
  // round-trip precision: try 15..17 significant digits
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("csv: missing header line");
  }
  std::stringstream header(line);
  std::string cell;
  while (std::getline(header, cell, ',')) table.header.push_back(cell);

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    while (std::getline(fields, cell, ',')) {
      std::size_t used = 0;
      row.push_back(std::stod(cell, &used));
      if (used != cell.size()) {
        throw std::runtime_error("csv: malformed numeric field '" + cell + "'");
      }
    }
    if (row.size() != table.header.size()) {
      throw std::runtime_error("csv: row width does not match header");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  return read_csv(in);
}

void write_csv_row(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << ',';
    out << format_full(values[i]);
  }
  out << '\n';
}

void write_csv_header(std::ostream& out,
                      const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out << ',';
    out << names[i];
  }
  out << '\n';
}

}  // namespace shotnoise
