// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shotnoise {

// Shortest decimal that round-trips the double exactly.
std::string format_full(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Strict numeric CSV: one header line, comma-separated double rows.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

void write_csv_row(std::ostream& out, const std::vector<double>& values);
void write_csv_header(std::ostream& out,
                      const std::vector<std::string>& names);

}  // namespace shotnoise
