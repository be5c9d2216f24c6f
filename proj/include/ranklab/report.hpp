#pragma once

// Report emission shared by the command-line surface: RFC-4180 CSV with
// full-precision '.'-decimal numbers, and versioned JSON records.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ranklab/core.hpp"

namespace ranklab {

inline constexpr const char* kReportSchema = "rank-lab/1";

/// Full-precision decimal form that round-trips a double.
inline std::string format_full(double v) {
  if (v == 0.0) v = 0.0;  // collapse negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// RFC-4180 cell: quote when the text holds a comma, quote, or newline.
inline std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) fail_arg("csv row width does not match the header");
    rows.push_back(std::move(row));
  }
};

inline void write_csv(std::ostream& os, const CsvTable& table) {
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << csv_escape(cells[i]);
    }
    os << "\r\n";
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

/// Versioned JSON record; every report opens with the schema tag.
inline nlohmann::ordered_json make_report(const std::string& kind) {
  nlohmann::ordered_json j;
  j["schema"] = kReportSchema;
  j["kind"] = kind;
  return j;
}

template <typename Derived>
inline std::vector<double> to_array(const Eigen::MatrixBase<Derived>& v) {
  std::vector<double> out(static_cast<std::size_t>(v.size()));
  for (int i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i);
  return out;
}

/// Row-major nested-array form for a matrix.
inline nlohmann::ordered_json matrix_json(const Mat& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

/// Writes the text to the path, or to stdout when the path is empty.
inline void emit_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) fail_arg("cannot open output path: " + out_path);
  f << text;
}

inline void emit_json(const std::string& out_path, const nlohmann::ordered_json& j) {
  emit_text(out_path, j.dump(2) + "\n");
}

inline void emit_csv(const std::string& out_path, const CsvTable& table) {
  std::ostringstream ss;
  write_csv(ss, table);
  emit_text(out_path, ss.str());
}

}  // namespace ranklab
