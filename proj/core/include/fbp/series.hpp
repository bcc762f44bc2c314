#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fbp {

// Ordered real observations y_1..y_n with frequency metadata (1 = annual,
// also used for daily returns where seasonality is irrelevant).
struct TimeSeries {
  std::vector<double> values;
  int frequency = 1;
  std::string name;

  std::size_t size() const noexcept { return values.size(); }
  std::span<const double> view() const noexcept { return values; }
  // First n observations.
  std::span<const double> head(std::size_t n) const { return std::span<const double>(values).first(n); }
};

// Shortest round-trip decimal representation; locale independent.
std::string format_double(double v);

// Reads the first numeric column of a CSV file with a mandatory header row.
TimeSeries read_series_csv(const std::filesystem::path& path);

// Writes `header` followed by one value per row.
void write_series_csv(const std::filesystem::path& path, std::span<const double> values,
                      std::string_view header = "y");

// Minimal CSV table reader: header names plus rows of numeric cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of the named column; throws InvalidInput if absent.
  std::size_t column(std::string_view name) const;
  std::vector<double> column_values(std::string_view name) const;
};

// Lines starting with '#' are skipped. Non-numeric cells throw InvalidInput.
CsvTable read_csv_table(const std::filesystem::path& path);

}  // namespace fbp
