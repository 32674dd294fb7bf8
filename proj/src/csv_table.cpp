#include "dirup/csv_table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "dirup/errors.hpp"

namespace dirup {

void Table::add_row(std::vector<nlohmann::json> row) {
  if (row.size() != columns.size()) throw InvalidArgument("table row width does not match the header");
  rows.push_back(std::move(row));
}

namespace {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::json json_cell(const nlohmann::json& cell) {
  if (cell.is_number_float()) {
    const double x = cell.get<double>();
    if (!std::isfinite(x)) return format_double(x);
  }
  return cell;
}

}  // namespace

std::string format_cell(const nlohmann::json& cell) {
  if (cell.is_null()) return "";
  if (cell.is_number_float()) return format_double(cell.get<double>());
  if (cell.is_number_integer()) return std::to_string(cell.get<long long>());
  if (cell.is_number_unsigned()) return std::to_string(cell.get<unsigned long long>());
  if (cell.is_string()) return cell.get<std::string>();
  if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
  return cell.dump();
}

std::string render_csv(const Table& t) {
  std::string out;
  for (const auto& c : t.comments) out += "# " + c + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + quote_if_needed(t.columns[i]);
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + quote_if_needed(format_cell(row[i]));
    out += "\n";
  }
  return out;
}

std::string render_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = json_cell(row[i]);
    rows.push_back(std::move(r));
  }
  nlohmann::json doc = {{"meta", t.comments}, {"columns", t.columns}, {"rows", std::move(rows)}};
  return doc.dump(2) + "\n";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

std::optional<double> parse_number(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return x;
}

}  // namespace

CsvData parse_csv(const std::string& text) {
  CsvData out;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cells = split_csv_line(line);
    if (header) {
      out.columns = std::move(cells);
      header = false;
    } else {
      out.rows.push_back(std::move(cells));
    }
  }
  return out;
}

CsvData read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read table " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

DiffReport diff_tables(const CsvData& a, const CsvData& b, double rtol) {
  DiffReport rep;
  if (a.columns != b.columns) {
    rep.schema_match = false;
    rep.message = "column headers differ";
    return rep;
  }
  if (a.rows.size() != b.rows.size()) {
    rep.schema_match = false;
    rep.message = "row counts differ (" + std::to_string(a.rows.size()) + " vs " + std::to_string(b.rows.size()) + ")";
    return rep;
  }
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    if (a.rows[r].size() != a.columns.size() || b.rows[r].size() != b.columns.size()) {
      rep.schema_match = false;
      rep.message = "row " + std::to_string(r) + " has the wrong width";
      return rep;
    }
    for (std::size_t c = 0; c < a.columns.size(); ++c) {
      ++rep.cells;
      const auto& x = a.rows[r][c];
      const auto& y = b.rows[r][c];
      const auto nx = parse_number(x);
      const auto ny = parse_number(y);
      double rel = 0;
      if (nx && ny) {
        if (std::isnan(*nx) || std::isnan(*ny)) {
          rel = std::isnan(*nx) && std::isnan(*ny) ? 0 : std::numeric_limits<double>::infinity();
        } else if (*nx != *ny) {
          const double scale = std::max(std::abs(*nx), std::abs(*ny));
          rel = std::isfinite(scale) ? std::abs(*nx - *ny) / scale : std::numeric_limits<double>::infinity();
        }
      } else if (x != y) {
        rel = std::numeric_limits<double>::infinity();
      }
      rep.max_rel_diff = std::max(rep.max_rel_diff, rel);
      if (rel > rtol) {
        if (rep.cells_over == 0) {
          rep.message = "first mismatch at row " + std::to_string(r) + ", column " + a.columns[c] + ": " + x +
                        " vs " + y;
        }
        ++rep.cells_over;
      }
    }
  }
  return rep;
}

DiffReport diff_tables(const std::string& path_a, const std::string& path_b, double rtol) {
  return diff_tables(read_csv_file(path_a), read_csv_file(path_b), rtol);
}

}  // namespace dirup
