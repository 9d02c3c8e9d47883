#pragma once

// Row tables written as RFC-4180 CSV or as JSON with fixed key order.

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace rnorm::cli {

using Cell = std::variant<std::int64_t, double, std::string>;
using ojson = nlohmann::ordered_json;

inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string to_text(const Cell& c) {
  if (auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

inline ojson to_json(const Cell& c) {
  if (auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (auto* d = std::get_if<double>(&c)) return *d;
  return std::get<std::string>(c);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }

  void write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << csv_quote(columns[i]);
    os << "\r\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_quote(to_text(r[i]));
      os << "\r\n";
    }
  }

  ojson json_rows() const {
    ojson arr = ojson::array();
    for (const auto& r : rows) {
      ojson o = ojson::object();
      for (std::size_t i = 0; i < r.size(); ++i) o[columns[i]] = to_json(r[i]);
      arr.push_back(std::move(o));
    }
    return arr;
  }
};

}  // namespace rnorm::cli
