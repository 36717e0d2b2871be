#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "seisloc/error.hpp"
#include "seisloc/format.hpp"

namespace seisloc {

/// In-memory CSV table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == name) return k;
    }
    throw FormatError("CSV is missing column '" + std::string(name) + "'");
  }

  bool has_column(std::string_view name) const {
    for (const auto& h : header) {
      if (h == name) return true;
    }
    return false;
  }

  void add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw ArityError("CSV row width does not match header");
    rows.push_back(std::move(row));
  }

  std::string str() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cols) {
      for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
      os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
  }
};

inline CsvTable parse_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw FormatError("CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  for (auto c : split(line, ',')) t.header.emplace_back(c);
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> row;
    for (auto c : split(line, ',')) row.emplace_back(c);
    if (row.size() != t.header.size()) throw FormatError("CSV line " + std::to_string(lineno) + ": wrong column count");
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  try {
    return parse_csv(is);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw IoError("write failed for '" + path + "'");
}

inline void write_csv(const std::string& path, const CsvTable& t) { write_text(path, t.str()); }

}  // namespace seisloc
