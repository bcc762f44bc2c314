#include "fbp/series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fbp/error.hpp"

namespace fbp {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t start = 0;
    while (start < cell.size() && cell[start] == ' ') ++start;
    cell = cell.substr(start);
    if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"') {
      cell = cell.substr(1, cell.size() - 2);
    }
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("format_double failed");
  return std::string(buf, ptr);
}

TimeSeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open series file: " + path.string());
  std::string line;
  if (!next_content_line(in, line)) throw InvalidInput("series file has no header: " + path.string());
  const auto header = split_csv_line(line);

  TimeSeries ts;
  ts.name = path.stem().string();
  std::ptrdiff_t column = -1;
  std::size_t row = 1;
  while (next_content_line(in, line)) {
    ++row;
    const auto cells = split_csv_line(line);
    double v = 0.0;
    if (column < 0) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (parse_double(cells[c], v)) {
          column = static_cast<std::ptrdiff_t>(c);
          break;
        }
      }
      if (column < 0) {
        throw InvalidInput("no numeric column in " + path.string() + " row " + std::to_string(row));
      }
    }
    const auto c = static_cast<std::size_t>(column);
    if (c >= cells.size() || !parse_double(cells[c], v)) {
      throw InvalidInput("non-numeric value in " + path.string() + " row " + std::to_string(row));
    }
    ts.values.push_back(v);
  }
  if (ts.values.empty()) throw InvalidInput("series file has no data rows: " + path.string());
  (void)header;
  return ts;
}

void write_series_csv(const std::filesystem::path& path, std::span<const double> values,
                      std::string_view header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path.string());
  out << header << '\n';
  for (double v : values) out << format_double(v) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw InvalidInput("missing CSV column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::column_values(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(c));
  return out;
}

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV file: " + path.string());
  CsvTable table;
  std::string line;
  if (!next_content_line(in, line)) throw InvalidInput("CSV file has no header: " + path.string());
  table.header = split_csv_line(line);
  std::size_t row = 1;
  while (next_content_line(in, line)) {
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != table.header.size()) {
      throw InvalidInput("row " + std::to_string(row) + " of " + path.string() +
                         " has " + std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(table.header.size()));
    }
    std::vector<double> r(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], r[c])) {
        throw InvalidInput("non-numeric cell in " + path.string() + " row " + std::to_string(row));
      }
    }
    table.rows.push_back(std::move(r));
  }
  return table;
}

}  // namespace fbp
