#include "export.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace grushin::cli {

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_number(row[i]);
    os << '\n';
  }
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json table_to_json(const Table& t) {
  json arr = json::array();
  for (const auto& row : t.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = number_or_null(row[i]);
    arr.push_back(std::move(obj));
  }
  return arr;
}

Table table_from_json(const json& j, const std::vector<std::string>& columns) {
  if (!j.is_array()) throw std::invalid_argument("table export must be a JSON array");
  Table t{columns, {}};
  for (const auto& obj : j) {
    std::vector<double> row;
    for (const auto& c : columns) {
      const auto& v = obj.at(c);
      row.push_back(v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_json(std::ostream& os, const json& j) { os << j.dump() << '\n'; }

}  // namespace grushin::cli
