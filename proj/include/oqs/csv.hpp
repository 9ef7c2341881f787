#pragma once

// Time-series CSV: header row, one row per grid point, %.12e numbers,
// LF line endings. Complex columns are split into re_/im_ pairs.

#include "oqs/errors.hpp"
#include "oqs/linalg.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace oqs {

/// Column-major table of doubles.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

  const std::vector<double> &column(const std::string &name) const {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name)
        return columns[k];
    throw ParameterError("CSV has no column '" + name + "'");
  }

  CsvTable &add(std::string name, std::vector<double> values) {
    if (!columns.empty() && values.size() != rows())
      throw DimensionError("CSV column '" + name + "' has " + std::to_string(values.size()) +
                           " rows, expected " + std::to_string(rows()));
    header.push_back(std::move(name));
    columns.push_back(std::move(values));
    return *this;
  }

  CsvTable &add_complex(const std::string &name, const std::vector<Complex> &values) {
    std::vector<double> re, im;
    re.reserve(values.size());
    im.reserve(values.size());
    for (const Complex &v : values) {
      re.push_back(v.real());
      im.push_back(v.imag());
    }
    add("re_" + name, std::move(re));
    return add("im_" + name, std::move(im));
  }
};

inline std::string format_number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.12e", value);
  return buffer;
}

inline std::string to_csv(const CsvTable &table) {
  if (table.columns.empty() || table.rows() == 0)
    throw ParameterError("emit_timeseries: empty series");
  std::string out;
  for (std::size_t k = 0; k < table.header.size(); ++k)
    out += (k ? "," : "") + table.header[k];
  out += '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
      if (k)
        out += ',';
      out += format_number(table.columns[k][r]);
    }
    out += '\n';
  }
  return out;
}

inline void emit_timeseries(const CsvTable &table, const std::string &path) {
  const std::string text = to_csv(table);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file)
    throw IoError("cannot open '" + path + "' for writing");
  file << text;
  if (!file.flush())
    throw IoError("write to '" + path + "' failed");
}

inline CsvTable parse_csv(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  CsvTable table;
  if (!std::getline(in, line))
    throw ParseError(1, "", "CSV is empty");
  {
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ','))
      table.header.push_back(cell);
  }
  table.columns.assign(table.header.size(), {});
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream cells(line);
    std::string cell;
    std::size_t k = 0;
    while (std::getline(cells, cell, ',')) {
      if (k >= table.header.size())
        throw ParseError(line_number, "", "more cells than header columns");
      char *end = nullptr;
      const double value = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0')
        throw ParseError(line_number, table.header[k], "not a number: '" + cell + "'");
      table.columns[k++].push_back(value);
    }
    if (k != table.header.size())
      throw ParseError(line_number, "", "expected " + std::to_string(table.header.size()) + " cells");
  }
  return table;
}

inline CsvTable read_csv(const std::string &path) {
  std::ifstream file(path, std::ios::binary);
  if (!file)
    throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream text;
  text << file.rdbuf();
  return parse_csv(text.str());
}

} // namespace oqs
