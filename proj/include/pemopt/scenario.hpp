#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pemopt/design/gss.hpp"
#include "pemopt/economics.hpp"
#include "pemopt/prices.hpp"
#include "pemopt/schedule/model.hpp"

namespace pemopt {

// Minimal keyed config file: [section] headers, key = value lines, # comments.
// Values: numbers, "strings", true/false, [a, b] numeric arrays. A top-level
// include = "file.toml" merges the included file first (current file wins).
class ConfigFile {
 public:
  using Value = std::variant<double, bool, std::string, std::vector<double>>;

  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text,
                                 const std::string& base_dir = ".");

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  double number(const std::string& key, double fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> array(const std::string& key) const;

  const std::map<std::string, Value>& values() const { return values_; }

 private:
  std::map<std::string, Value> values_;  // "section.key" -> value
};

// Fully resolved run configuration.
struct Scenario {
  std::string name = "scenario";
  std::string price_csv;
  PriceCsvFormat price_format = PriceCsvFormat::kTimestampPrice;
  std::string cost_preset = "2022";
  CostParams costs;
  PlantModel model;
  SearchBox box;
  int rep_days = 7;
  std::uint64_t cluster_seed = 1234;
  std::string output_dir = "out";
  std::optional<Design> fixed_design;

  // Parses and validates; referenced files are checked for existence.
  static Scenario load(const std::string& path);
  static Scenario from_config(const ConfigFile& cfg, const std::string& base_dir);
};

}  // namespace pemopt
