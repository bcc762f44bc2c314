#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fbp/report.hpp"

namespace fbp::cli {

// Sectioned key = value file. Every lookup records the resolved value so the
// complete effective configuration can be echoed next to the outputs.
class Config {
 public:
  Config() = default;
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string text(const std::string& section, const std::string& key,
                   const std::string& fallback) const;
  std::string required(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  long long integer(const std::string& section, const std::string& key, long long fallback) const;
  std::uint64_t unsigned_integer(const std::string& section, const std::string& key,
                                 std::uint64_t fallback) const;
  bool flag(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<std::string> list(const std::string& section, const std::string& key,
                                const std::vector<std::string>& fallback) const;
  std::vector<double> numbers(const std::string& section, const std::string& key,
                              const std::vector<double>& fallback) const;
  // Relative paths are resolved against the config file's directory.
  std::filesystem::path path(const std::string& section, const std::string& key) const;

  // Records a value that did not come from the file (e.g. a flag override).
  void set(const std::string& section, const std::string& key, const std::string& value);

  // Throws InvalidInput naming every key outside `allowed`.
  void check_keys(const std::map<std::string, std::set<std::string>>& allowed) const;

  ConfigEcho echo() const;

 private:
  void record(const std::string& section, const std::string& key, const std::string& value) const;

  std::map<std::string, std::map<std::string, std::string>> values_;
  std::filesystem::path base_;
  mutable std::map<std::string, std::string> resolved_;
};

}  // namespace fbp::cli
