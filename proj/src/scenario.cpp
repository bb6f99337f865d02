#include "pemopt/scenario.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pemopt {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

ConfigFile::Value parse_value(const std::string& raw, const std::string& where) {
  const std::string v = trim(raw);
  if (v.empty()) throw std::runtime_error("config: empty value at " + where);
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"')
      throw std::runtime_error("config: unterminated string at " + where);
    return v.substr(1, v.size() - 2);
  }
  if (v.front() == '[') {
    if (v.back() != ']')
      throw std::runtime_error("config: unterminated array at " + where);
    std::vector<double> arr;
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      arr.push_back(std::stod(item));
    }
    return arr;
  }
  std::size_t pos = 0;
  const double num = std::stod(v, &pos);
  if (pos != v.size())
    throw std::runtime_error("config: cannot parse value '" + v + "' at " + where);
  return num;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& base_dir) {
  ConfigFile cfg;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<std::string> includes;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config: bad section header at line " +
                                 std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: expected key = value at line " +
                               std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const auto value = parse_value(line.substr(eq + 1), "line " + std::to_string(lineno));
    if (section.empty() && key == "include") {
      includes.push_back(std::get<std::string>(value));
      continue;
    }
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  // Included files provide defaults; the including file wins.
  for (const auto& inc : includes) {
    const auto path = std::filesystem::path(base_dir) / inc;
    ConfigFile base = parse_file(path.string());
    for (const auto& [k, v] : cfg.values_) base.values_[k] = v;
    cfg.values_ = std::move(base.values_);
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), std::filesystem::path(path).parent_path().string());
}

double ConfigFile::number(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  throw std::runtime_error("config: " + key + " must be a number");
}

bool ConfigFile::boolean(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const bool* b = std::get_if<bool>(&it->second)) return *b;
  throw std::runtime_error("config: " + key + " must be true/false");
}

std::string ConfigFile::text(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
  throw std::runtime_error("config: " + key + " must be a string");
}

std::vector<double> ConfigFile::array(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return {};
  if (const auto* a = std::get_if<std::vector<double>>(&it->second)) return *a;
  throw std::runtime_error("config: " + key + " must be an array");
}

Scenario Scenario::from_config(const ConfigFile& cfg, const std::string& base_dir) {
  Scenario s;
  s.name = cfg.text("name", "scenario");
  s.price_csv = cfg.text("price_csv", "");
  if (!s.price_csv.empty() && !std::filesystem::path(s.price_csv).is_absolute())
    s.price_csv = (std::filesystem::path(base_dir) / s.price_csv).string();
  s.price_format = cfg.text("price_format", "timestamp") == "single-column"
                       ? PriceCsvFormat::kSingleColumn
                       : PriceCsvFormat::kTimestampPrice;
  s.output_dir = cfg.text("output_dir", "out");
  s.cost_preset = cfg.text("cost_preset", "2022");
  s.costs = s.cost_preset == "custom" ? CostParams{} : CostParams::preset(s.cost_preset);

  auto& m = s.model;
  // [degradation]
  m.degradation_enabled = cfg.boolean("degradation.enabled", true);
  m.degradation.coefficient_a_uv_per_h =
      cfg.number("degradation.coefficient_uv_per_h", 30.0);
  m.degradation.replacement_threshold_v =
      cfg.number("degradation.replacement_threshold_v", 1.0);
  m.degradation.softplus_beta = cfg.number("degradation.softplus_beta", 50.0);

  // [schedule]
  s.rep_days = static_cast<int>(cfg.number("schedule.rep_days", 7));
  m.dt_hours = cfg.number("schedule.dt_hours", 0.25);
  m.demand_kg_per_day = cfg.number("schedule.demand_kg_per_day", 50000.0);
  m.bounds.t_max_k = cfg.number("schedule.temperature_max_c", 80.0) + 273.15;
  m.bounds.t_min_k = cfg.number("schedule.temperature_min_c", 60.0) + 273.15;
  m.bounds.safety_enabled = cfg.boolean("schedule.safety_constraint", true);
  m.bounds.i_min = cfg.number("schedule.current_min", 0.1);
  m.bounds.i_max = cfg.number("schedule.current_max", 4.0);
  m.bounds.thermal_enabled = cfg.boolean("schedule.thermal", true);
  m.thermal_voltage_mean_degradation =
      cfg.boolean("schedule.thermal_mean_degradation", false);

  // [electrochem]
  m.electrochem.alpha_an = cfg.number("electrochem.alpha_an", m.electrochem.alpha_an);
  m.electrochem.alpha_cat = cfg.number("electrochem.alpha_cat", m.electrochem.alpha_cat);
  m.electrochem.activation_energy =
      cfg.number("electrochem.activation_energy_j_mol", m.electrochem.activation_energy);
  m.electrochem.p_cathode = cfg.number("electrochem.p_cathode_bar", m.electrochem.p_cathode);
  m.electrochem.p_anode = cfg.number("electrochem.p_anode_bar", m.electrochem.p_anode);
  m.balance.p_cathode_bar = m.electrochem.p_cathode;
  m.balance.p_anode_bar = m.electrochem.p_anode;

  // [balance]
  m.balance.crossover_coeff_per_bar =
      cfg.number("balance.crossover_coeff_per_bar", m.balance.crossover_coeff_per_bar);
  m.balance.recombination_conversion =
      cfg.number("balance.recombination_conversion", m.balance.recombination_conversion);
  m.balance.drag_temperature_celsius =
      cfg.boolean("balance.drag_temperature_celsius", true);

  // [opcost]
  m.opcost.water_price_usd_per_kgal =
      cfg.number("opcost.water_price_usd_per_kgal", m.opcost.water_price_usd_per_kgal);
  m.opcost.n2_price_usd_per_kg =
      cfg.number("opcost.n2_price_usd_per_kg", m.opcost.n2_price_usd_per_kg);
  m.opcost.bop_kwh_per_kg = cfg.number("opcost.bop_kwh_per_kg", m.opcost.bop_kwh_per_kg);
  m.opcost.compressor.p_out_bar =
      cfg.number("opcost.storage_pressure_bar", m.opcost.compressor.p_out_bar);

  // [costs] overrides (applied on top of the preset)
  auto& c = s.costs;
  c.stack_capex_usd_per_cm2 =
      cfg.number("costs.stack_capex_usd_per_cm2", c.stack_capex_usd_per_cm2);
  c.bop_capex_usd_per_kwe = cfg.number("costs.bop_capex_usd_per_kwe", c.bop_capex_usd_per_kwe);
  c.storage_capex_usd_per_kg =
      cfg.number("costs.storage_capex_usd_per_kg", c.storage_capex_usd_per_kg);
  c.ebop_fraction = cfg.number("costs.ebop_fraction", c.ebop_fraction);
  c.nominal_kwe_per_kg_day = cfg.number("costs.nominal_kwe_per_kg_day", c.nominal_kwe_per_kg_day);
  c.discount_rate = cfg.number("costs.discount_rate", c.discount_rate);
  c.plant_life_years = static_cast<int>(cfg.number("costs.plant_life_years", c.plant_life_years));
  c.labor_rate_usd_per_h = cfg.number("costs.labor_rate_usd_per_h", c.labor_rate_usd_per_h);
  c.workers = static_cast<int>(cfg.number("costs.workers", c.workers));
  c.operating_days = static_cast<int>(cfg.number("costs.operating_days", c.operating_days));
  c.material_fopex_usd = cfg.number("costs.material_fopex_usd", c.material_fopex_usd);

  // [search]
  if (cfg.has("search.n_cells")) {
    const auto range = cfg.array("search.n_cells");
    if (range.size() != 2) throw std::runtime_error("config: search.n_cells needs [lo, hi]");
    s.box.n_cells_lo = range[0];
    s.box.n_cells_hi = range[1];
  }
  if (cfg.has("search.storage_days")) {
    const auto range = cfg.array("search.storage_days");
    if (range.size() != 2)
      throw std::runtime_error("config: search.storage_days needs [lo, hi]");
    s.box.storage_days_lo = range[0];
    s.box.storage_days_hi = range[1];
  }
  s.box.tolerance = cfg.number("search.tolerance", s.box.tolerance);
  s.box.max_iterations = static_cast<int>(cfg.number("search.max_iterations", 60));

  // [design] (fixed-design evaluation)
  if (cfg.has("design.n_cells") || cfg.has("design.storage_days")) {
    Design d;
    d.n_cells = cfg.number("design.n_cells", 0.0);
    d.storage_days = cfg.number("design.storage_days", 0.0);
    if (!(d.n_cells >= 1.0) || !(d.storage_days >= 0.0))
      throw std::runtime_error("config: [design] needs n_cells >= 1 and storage_days >= 0");
    s.fixed_design = d;
  }

  // [seeds]
  s.cluster_seed = static_cast<std::uint64_t>(cfg.number("seeds.cluster", 1234));

  if (!(s.rep_days >= 1)) throw std::runtime_error("config: schedule.rep_days must be >= 1");
  m.electrochem.validate();
  m.degradation.validate();
  return s;
}

Scenario Scenario::load(const std::string& path) {
  const auto cfg = ConfigFile::parse_file(path);
  auto s = from_config(cfg, std::filesystem::path(path).parent_path().string());
  if (s.price_csv.empty())
    throw std::runtime_error("config: price_csv is required in " + path);
  if (!std::filesystem::exists(s.price_csv))
    throw std::runtime_error("config: price file not found: " + s.price_csv);
  return s;
}

}  // namespace pemopt
