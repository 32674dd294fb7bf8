#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace dirup {

/// Column-labelled table whose cells are JSON scalars (number, string or null).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
  /// Emitted as leading "# " lines in CSV and as "meta" in JSON.
  std::vector<std::string> comments;

  void add_row(std::vector<nlohmann::json> row);
};

/// Numbers use 17 significant digits; infinities print as "inf" / "-inf",
/// NaN as "nan", null as an empty cell.
std::string format_cell(const nlohmann::json& cell);

std::string render_csv(const Table& t);
std::string render_json(const Table& t);

/// Parsed CSV: header and string cells, comment lines dropped.
struct CsvData {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

CsvData parse_csv(const std::string& text);
CsvData read_csv_file(const std::string& path);

struct DiffReport {
  bool schema_match = true;
  std::size_t cells = 0;
  std::size_t cells_over = 0;
  double max_rel_diff = 0;
  std::string message;

  /// 0 when every cell agrees, 1 on any excess difference, 2 on schema mismatch.
  int exit_code() const { return !schema_match ? 2 : (cells_over > 0 ? 1 : 0); }
};

/// Cell-by-cell comparison; numeric cells by relative difference, others exactly.
DiffReport diff_tables(const CsvData& a, const CsvData& b, double rtol);
DiffReport diff_tables(const std::string& path_a, const std::string& path_b, double rtol);

}  // namespace dirup
