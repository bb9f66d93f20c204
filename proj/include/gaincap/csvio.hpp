#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gaincap::csvio {

// Comma-delimited table with a header row. Cells are kept as text so that
// optional columns can stay empty; numeric access parses on demand.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(const std::string& name) const;
  // Parses rows[row][col]; throws std::runtime_error on empty or
  // non-numeric cells.
  double number(std::size_t row, std::size_t col) const;
};

// 15 significant digits, '.' decimal separator, no locale dependence.
std::string format_number(double x);

std::string to_csv(const Table& t);
// `name` prefixes parse errors ("name:line: ...").
Table parse_csv(const std::string& text, const std::string& name = "csv");

Table read_csv(const std::string& path);
void write_csv(const std::string& path, const Table& t);

}  // namespace gaincap::csvio
