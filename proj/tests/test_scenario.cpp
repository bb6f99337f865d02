#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "pemopt/scenario.hpp"
#include "pemopt/synth_prices.hpp"

using namespace pemopt;

namespace {
namespace fs = std::filesystem;

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "pemopt_scn_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parser handles the value grammar") {
  const auto cfg = ConfigFile::parse_string(R"(
name = "demo"          # trailing comment
flag = true
ratio = 0.25
[schedule]
rep_days = 3
range = [1.5, 2.5]
label = "a # not a comment"
)");
  CHECK(cfg.text("name", "") == "demo");
  CHECK(cfg.boolean("flag", false));
  CHECK(cfg.number("ratio", 0) == 0.25);
  CHECK(cfg.number("schedule.rep_days", 0) == 3);
  CHECK(cfg.array("schedule.range") == std::vector<double>{1.5, 2.5});
  CHECK(cfg.text("schedule.label", "") == "a # not a comment");
  CHECK_THROWS(ConfigFile::parse_string("broken line without equals"));
  CHECK_THROWS(ConfigFile::parse_string("x = \"unterminated"));
}

TEST_CASE("scenario assembly from config") {
  const auto cfg = ConfigFile::parse_string(R"(
name = "unit"
cost_preset = "2030-mid"
[degradation]
enabled = false
[schedule]
rep_days = 2
dt_hours = 1.0
temperature_max_c = 90.0
safety_constraint = false
[search]
n_cells = [50000, 200000]
storage_days = [0.5, 5.0]
tolerance = 0.01
[design]
n_cells = 120000
storage_days = 0.7
[seeds]
cluster = 99
)");
  const auto s = Scenario::from_config(cfg, ".");
  CHECK(s.costs.stack_capex_usd_per_cm2 == 0.79);
  CHECK_FALSE(s.model.degradation_enabled);
  CHECK(s.model.bounds.t_max_k == doctest::Approx(363.15));
  CHECK_FALSE(s.model.bounds.safety_enabled);
  CHECK(s.box.n_cells_lo == 50000);
  CHECK(s.box.storage_days_hi == 5.0);
  CHECK(s.rep_days == 2);
  CHECK(s.cluster_seed == 99);
  REQUIRE(s.fixed_design.has_value());
  CHECK(s.fixed_design->n_cells == 120000);
}

TEST_CASE("include merges with the including file winning") {
  const auto dir = temp_dir();
  {
    std::ofstream base(dir / "base_costs.toml");
    base << "[costs]\nstack_capex_usd_per_cm2 = 9.9\nworkers = 22\n";
  }
  {
    std::ofstream top(dir / "top.toml");
    top << "include = \"base_costs.toml\"\nname = \"inc\"\n[costs]\nstack_capex_usd_per_cm2 = 1.1\n";
  }
  const auto cfg = ConfigFile::parse_file((dir / "top.toml").string());
  CHECK(cfg.number("costs.stack_capex_usd_per_cm2", 0) == 1.1);  // override wins
  CHECK(cfg.number("costs.workers", 0) == 22);                   // inherited
  const auto s = Scenario::from_config(cfg, dir.string());
  CHECK(s.costs.stack_capex_usd_per_cm2 == 1.1);
  CHECK(s.costs.workers == 22);
}

TEST_CASE("missing price file is a load error") {
  const auto dir = temp_dir();
  {
    std::ofstream f(dir / "missing.toml");
    f << "name = \"x\"\nprice_csv = \"nope.csv\"\n";
  }
  CHECK_THROWS_WITH_AS(Scenario::load((dir / "missing.toml").string()),
                       doctest::Contains("nope.csv"), std::runtime_error);
}

TEST_CASE("every shipped scenario parses and is internally consistent") {
  const auto src = fs::path(PEMOPT_SOURCE_DIR) / "scenarios";
  const auto dir = temp_dir() / "shipped";
  fs::create_directories(dir);
  for (const auto& entry : fs::directory_iterator(src))
    fs::copy_file(entry.path(), dir / entry.path().filename(),
                  fs::copy_options::overwrite_existing);
  // Provide the price inputs the configs reference.
  SyntheticPriceSpec spec;
  spec.pattern = PricePattern::kDurationMatched;
  spec.mean_usd_per_mwh = 62.55;
  spec.seed = 2022;
  write_price_csv(generate_prices(spec), (dir / "prices_2022_south_synthetic.csv").string());
  spec.mean_usd_per_mwh = 21.43;
  spec.volatility = 1.6;
  spec.seed = 2030;
  write_price_csv(generate_prices(spec), (dir / "prices_2030_mid_synthetic.csv").string());

  int scenarios = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".toml") continue;
    if (entry.path().filename().string().rfind("costs", 0) == 0) continue;
    ++scenarios;
    const auto s = Scenario::load(entry.path().string());
    CHECK(s.rep_days >= 1);
    CHECK(s.model.bounds.t_min_k < s.model.bounds.t_max_k);
    CHECK_NOTHROW(s.model.electrochem.validate());
  }
  CHECK(scenarios == 10);
}
