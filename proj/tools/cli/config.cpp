#include "config.hpp"

#include <charconv>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fbp/error.hpp"
#include "fbp/series.hpp"

namespace fbp::cli {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string where(const std::string& section, const std::string& key) { return section + "." + key; }

double parse_double(const std::string& s, const std::string& name) {
  double v = 0.0;
  const auto t = trim(s);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw InvalidInput("config key " + name + ": not a number: '" + s + "'");
  return v;
}

template <class T>
T parse_integer(const std::string& s, const std::string& name) {
  T v{};
  const auto t = trim(s);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw InvalidInput("config key " + name + ": not an integer: '" + s + "'");
  return v;
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("config file not found: " + path.string());
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidInput(std::string("cannot parse config: ") + e.what());
  }
  Config c;
  c.base_ = path.parent_path();
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw InvalidInput("config key outside a section: " + section);
    for (const auto& [key, value] : body) c.values_[section][key] = trim(value.get_value<std::string>());
  }
  return c;
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = values_.find(section);
  return s != values_.end() && s->second.count(key) > 0;
}

bool Config::has_section(const std::string& section) const { return values_.count(section) > 0; }

void Config::record(const std::string& section, const std::string& key, const std::string& value) const {
  resolved_[where(section, key)] = value;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  values_[section][key] = value;
}

std::string Config::text(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
  std::string v = fallback;
  if (has(section, key)) v = values_.at(section).at(key);
  record(section, key, v);
  return v;
}

std::string Config::required(const std::string& section, const std::string& key) const {
  if (!has(section, key)) throw InvalidInput("missing config key: " + where(section, key));
  return text(section, key, "");
}

double Config::number(const std::string& section, const std::string& key, double fallback) const {
  const double v = has(section, key) ? parse_double(values_.at(section).at(key), where(section, key)) : fallback;
  record(section, key, format_double(v));
  return v;
}

long long Config::integer(const std::string& section, const std::string& key, long long fallback) const {
  const long long v =
      has(section, key) ? parse_integer<long long>(values_.at(section).at(key), where(section, key)) : fallback;
  record(section, key, std::to_string(v));
  return v;
}

std::uint64_t Config::unsigned_integer(const std::string& section, const std::string& key,
                                       std::uint64_t fallback) const {
  const std::uint64_t v = has(section, key)
                              ? parse_integer<std::uint64_t>(values_.at(section).at(key), where(section, key))
                              : fallback;
  record(section, key, std::to_string(v));
  return v;
}

bool Config::flag(const std::string& section, const std::string& key, bool fallback) const {
  bool v = fallback;
  if (has(section, key)) {
    const auto& s = values_.at(section).at(key);
    if (s == "true" || s == "1" || s == "yes") v = true;
    else if (s == "false" || s == "0" || s == "no") v = false;
    else throw InvalidInput("config key " + where(section, key) + ": not a boolean: '" + s + "'");
  }
  record(section, key, v ? "true" : "false");
  return v;
}

std::vector<std::string> Config::list(const std::string& section, const std::string& key,
                                      const std::vector<std::string>& fallback) const {
  std::vector<std::string> v = fallback;
  if (has(section, key)) {
    v.clear();
    std::stringstream ss(values_.at(section).at(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) v.push_back(item);
    }
  }
  std::string joined;
  for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? "," : "") + v[i];
  record(section, key, joined);
  return v;
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) const {
  std::vector<std::string> defaults;
  for (double d : fallback) defaults.push_back(format_double(d));
  std::vector<double> v;
  for (const auto& s : list(section, key, defaults)) v.push_back(parse_double(s, where(section, key)));
  std::string joined;
  for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? "," : "") + format_double(v[i]);
  record(section, key, joined);
  return v;
}

std::filesystem::path Config::path(const std::string& section, const std::string& key) const {
  std::filesystem::path p = required(section, key);
  if (p.is_relative() && !base_.empty()) p = base_ / p;
  return p;
}

void Config::check_keys(const std::map<std::string, std::set<std::string>>& allowed) const {
  std::string bad;
  for (const auto& [section, body] : values_) {
    auto s = allowed.find(section);
    for (const auto& [key, value] : body)
      if (s == allowed.end() || s->second.count(key) == 0) bad += (bad.empty() ? "" : ", ") + where(section, key);
  }
  if (!bad.empty()) throw InvalidInput("unknown config keys: " + bad);
}

ConfigEcho Config::echo() const { return {resolved_.begin(), resolved_.end()}; }

}  // namespace fbp::cli
