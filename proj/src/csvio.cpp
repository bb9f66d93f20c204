#include "gaincap/csvio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gaincap::csvio {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::size_t Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::runtime_error("no such column: " + name);
}

double Table::number(std::size_t row, std::size_t col) const {
  const std::string& cell = rows.at(row).at(col);
  if (cell.empty())
    throw std::runtime_error("empty cell at row " + std::to_string(row + 1) +
                             ", column " + std::to_string(col + 1));
  const char* s = cell.c_str();
  char* end = nullptr;
  const double x = std::strtod(s, &end);
  if (end != s + cell.size())
    throw std::runtime_error("non-numeric cell \"" + cell + "\" at row " +
                             std::to_string(row + 1) + ", column " +
                             std::to_string(col + 1));
  return x;
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

std::string to_csv(const Table& t) {
  std::string out;
  auto append_row = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  append_row(t.columns);
  for (const auto& r : t.rows) append_row(r);
  return out;
}

Table parse_csv(const std::string& text, const std::string& name) {
  Table t;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.eof()) break;
    auto fields = split_fields(line);
    if (t.columns.empty()) {
      if (fields.empty() || (fields.size() == 1 && fields[0].empty()))
        throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                 ": empty header row");
      t.columns = std::move(fields);
      continue;
    }
    if (fields.size() != t.columns.size())
      throw std::runtime_error(
          name + ":" + std::to_string(lineno) + ": expected " +
          std::to_string(t.columns.size()) + " fields, got " +
          std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
  }
  if (t.columns.empty())
    throw std::runtime_error(name + ":1: empty document");
  return t;
}

Table read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path);
}

void write_csv(const std::string& path, const Table& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_csv(t);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace gaincap::csvio
