#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace grushin::cli {

using nlohmann::json;

// Column-major names with row-major numeric data; the common shape of every
// CSV export.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// %.17g, "inf"/"-inf"/"nan" for non-finite values.
std::string csv_number(double v);
void write_csv(std::ostream& os, const Table& t);

// Array of objects keyed by column name. Non-finite numbers become null.
json table_to_json(const Table& t);
// Inverse of table_to_json; null reads back as +inf.
Table table_from_json(const json& j, const std::vector<std::string>& columns);

// Shortest round-trip doubles, LF terminated.
void write_json(std::ostream& os, const json& j);
// +inf and NaN both map to null.
json number_or_null(double v);

}  // namespace grushin::cli
