// Batch front end: scenario-driven design optimization, fixed-design
// evaluation, forward simulation of external schedules, and price utilities.
//
// Exit codes: 0 success, 2 configuration error, 3 infeasible, 4 solver failure.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pemopt/design/optimize.hpp"
#include "pemopt/manifest.hpp"
#include "pemopt/scenario.hpp"
#include "pemopt/schedule/export.hpp"
#include "pemopt/schedule/simulate.hpp"
#include "pemopt/synth_prices.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolver = 4;

struct GlobalArgs {
  std::string scenario_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
  bool grid_audit = false;
};

std::ofstream g_logfile;

void log_line(const std::string& line) {
  std::fprintf(stderr, "%s\n", line.c_str());
  if (g_logfile) g_logfile << line << "\n";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
  if (!body.empty() && body.back() != '\n') out << "\n";
}

std::string lcoh_breakdown_csv(const std::string& name, const pemopt::CostReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "scenario,capex,planned_replacement,unplanned_replacement,fopex,"
                "vopex,total\n%s,%.8f,%.8f,%.8f,%.8f,%.8f,%.8f\n",
                name.c_str(), r.lcoh_capex, r.lcoh_planned, r.lcoh_unplanned,
                r.lcoh_fopex, r.lcoh_vopex, r.lcoh_usd_per_kg);
  return buf;
}

struct LoadedScenario {
  pemopt::Scenario scenario;
  pemopt::RepDaySet days;
  std::string hash;
};

LoadedScenario prepare(const GlobalArgs& args) {
  LoadedScenario ls;
  ls.scenario = pemopt::Scenario::load(args.scenario_path);
  if (!args.out_dir.empty()) ls.scenario.output_dir = args.out_dir;
  if (args.seed_set) ls.scenario.cluster_seed = args.seed;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(
                    pemopt::fnv1a64(slurp(args.scenario_path))));
  ls.hash = buf;

  std::filesystem::create_directories(ls.scenario.output_dir);
  g_logfile.open(std::filesystem::path(ls.scenario.output_dir) / "run.log");

  std::vector<std::string> warnings;
  const auto series =
      pemopt::load_prices(ls.scenario.price_csv, ls.scenario.price_format, &warnings);
  for (const auto& w : warnings) log_line("warning: " + w);
  ls.days = pemopt::cluster_rep_days(series, ls.scenario.rep_days,
                                     ls.scenario.cluster_seed, &warnings);
  log_line("clustered " + std::to_string(series.n_days()) + " days into k=" +
           std::to_string(ls.days.k) + " representative days (seed " +
           std::to_string(ls.scenario.cluster_seed) + ")");
  return ls;
}

int emit_run_outputs(const LoadedScenario& ls, const pemopt::OptimizeResult& result,
                     const GlobalArgs& args, bool with_trace) {
  const auto dir = std::filesystem::path(ls.scenario.output_dir);
  pemopt::RunManifest manifest(args.scenario_path, ls.hash);
  for (const auto& t : result.trials) {
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "trial n_cells=%.3f storage_days=%.6f pv=%.6e vopex=%.6e "
                  "status=%d iterations=%d warm=%d",
                  t.design.n_cells, t.design.storage_days, t.pv, t.vopex,
                  static_cast<int>(t.status), t.iterations, t.warm_started ? 1 : 0);
    manifest.add_stat(buf);
  }

  const auto repdays_path = (dir / "repdays.json").string();
  write_text(repdays_path, ls.days.to_json());
  manifest.add_file(repdays_path);

  if (!result.ok) {
    const bool infeasible =
        result.schedule.info.status == pemopt::SolveStatus::kInfeasible ||
        result.message.find("unreachable") != std::string::npos;
    manifest.set_status(infeasible ? "infeasible" : "solver-failure");
    log_line("error: " + result.message);
    if (!result.schedule.info.message.empty())
      log_line("detail: " + result.schedule.info.message);
    manifest.write((dir / "manifest.json").string());
    return infeasible ? kExitInfeasible : kExitSolver;
  }

  for (const auto& path : pemopt::write_schedule_csvs(result.schedule, dir.string()))
    manifest.add_file(path);
  const auto summary_path = (dir / "schedule_summary.json").string();
  write_text(summary_path, pemopt::schedule_summary_json(result.schedule));
  manifest.add_file(summary_path);

  const auto report_path = (dir / "cost_report.json").string();
  write_text(report_path, result.costs.to_json());
  manifest.add_file(report_path);

  const auto lcoh_path = (dir / "lcoh_breakdown.csv").string();
  write_text(lcoh_path, lcoh_breakdown_csv(ls.scenario.name, result.costs));
  manifest.add_file(lcoh_path);

  const auto hist_path = (dir / "current_histogram.csv").string();
  write_text(hist_path, pemopt::current_histogram_csv(result.schedule));
  manifest.add_file(hist_path);
  const auto duration_path = (dir / "duration_curve.csv").string();
  write_text(duration_path, pemopt::duration_curve_csv(ls.days));
  manifest.add_file(duration_path);

  if (with_trace) {
    const auto trace_path = (dir / "gss_trace.csv").string();
    write_text(trace_path, pemopt::gss_trace_csv(result.gss));
    manifest.add_file(trace_path);
  }
  if (!result.audit.empty()) {
    std::ostringstream audit;
    audit << "n_cells,storage_days,pv\n";
    char buf[160];
    for (const auto& a : result.audit) {
      std::snprintf(buf, sizeof buf, "%.3f,%.6f,%.8e\n", a.design.n_cells,
                    a.design.storage_days, a.pv);
      audit << buf;
    }
    const auto audit_path = (dir / "grid_audit.csv").string();
    write_text(audit_path, audit.str());
    manifest.add_file(audit_path);
    if (!result.audit_unimodal)
      log_line("grid audit: multiple local minima detected in the search box");
  }

  manifest.set_status("ok");
  manifest.write((dir / "manifest.json").string());

  char line[256];
  std::snprintf(line, sizeof line,
                "result: n_cells=%lld storage_days=%.4f lcoh=%.4f $/kg pv=%.6e "
                "replacement=%d yr utilization=%.3f",
                result.rounded_cells, result.design.storage_days,
                result.costs.lcoh_usd_per_kg, result.costs.pv_total,
                result.costs.replacement_interval_years, result.costs.utilization);
  log_line(line);
  return kExitOk;
}

int run_optimize(const GlobalArgs& args) {
  const auto ls = prepare(args);
  pemopt::OptimizeOptions opt;
  opt.box = ls.scenario.box;
  opt.jobs = args.jobs;
  opt.grid_audit = args.grid_audit;
  opt.log = log_line;
  const auto result =
      pemopt::optimize_design(ls.scenario.model, ls.days, ls.scenario.costs, opt);
  return emit_run_outputs(ls, result, args, /*with_trace=*/true);
}

int run_evaluate(const GlobalArgs& args, double n_cells_arg, double storage_arg) {
  const auto ls = prepare(args);
  pemopt::Design design;
  if (n_cells_arg > 0 && storage_arg >= 0) {
    design = {n_cells_arg, storage_arg};
  } else if (ls.scenario.fixed_design) {
    design = *ls.scenario.fixed_design;
  } else {
    log_line("error: evaluate needs --n-cells/--storage-days or a [design] block");
    return kExitConfig;
  }
  pemopt::OptimizeOptions opt;
  opt.log = log_line;
  const auto result =
      pemopt::evaluate_design(ls.scenario.model, ls.days, ls.scenario.costs, design, opt);
  return emit_run_outputs(ls, result, args, /*with_trace=*/false);
}

int run_simulate(const GlobalArgs& args, const std::string& schedule_dir) {
  const auto ls = prepare(args);
  auto model = ls.scenario.model;
  if (!ls.scenario.fixed_design) {
    log_line("error: simulate needs a [design] block (n_cells, storage_days)");
    return kExitConfig;
  }
  model.geometry.n_cells = ls.scenario.fixed_design->n_cells;
  const double capacity = ls.scenario.fixed_design->storage_days *
                          model.demand_kg_per_day / pemopt::constants::kMolarMassH2;
  const int steps = model.steps_per_day();
  std::vector<std::vector<pemopt::StepControls>> controls;
  for (int r = 0; r < ls.days.k; ++r) {
    const auto csv = std::filesystem::path(schedule_dir) /
                     ("schedule_r" + std::to_string(r) + ".csv");
    if (!std::filesystem::exists(csv)) {
      log_line("error: missing " + csv.string());
      return kExitConfig;
    }
    controls.push_back(pemopt::read_schedule_controls(csv.string(), steps));
  }
  const auto sim = pemopt::simulate_year(model, ls.days, capacity, controls);
  const auto dir = std::filesystem::path(ls.scenario.output_dir);
  const auto report_path = (dir / "simulate_report.json").string();
  write_text(report_path, pemopt::simulation_report_json(sim));
  pemopt::RunManifest manifest(args.scenario_path, ls.hash);
  manifest.add_file(report_path);
  manifest.set_status("ok");
  manifest.write((dir / "manifest.json").string());
  char line[200];
  std::snprintf(line, sizeof line,
                "simulate: %s (safety=%d lfl=%d temp=%d storage=%d demand=%d; "
                "max y_h2=%.4f)",
                sim.violations.clean() ? "no violations" : "violations found",
                sim.violations.safety, sim.violations.lfl, sim.violations.temperature,
                sim.violations.storage, sim.violations.demand, sim.violations.max_y_h2);
  log_line(line);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PEM electrolyzer design and scheduling optimizer"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalArgs args;
  app.add_option("--scenario", args.scenario_path, "Scenario config file");
  app.add_option("--out", args.out_dir, "Output directory (overrides scenario)");
  app.add_option("--seed", args.seed, "Clustering seed (overrides scenario)")
      ->each([&](const std::string&) { args.seed_set = true; });
  app.add_option("--jobs", args.jobs, "Concurrent trial evaluations")
      ->check(CLI::Range(1, 64));
  app.add_flag("--grid-audit", args.grid_audit,
               "Evaluate a coarse 5x5 design grid and flag non-unimodal landscapes");

  auto* cmd_opt = app.add_subcommand("optimize", "Bilevel design + schedule optimization");
  double n_cells_arg = 0, storage_arg = -1;
  auto* cmd_eval = app.add_subcommand("evaluate", "Inner solve + economics at a fixed design");
  cmd_eval->add_option("--n-cells", n_cells_arg, "Cell count");
  cmd_eval->add_option("--storage-days", storage_arg, "Days of storage");
  std::string schedule_dir;
  auto* cmd_sim = app.add_subcommand("simulate", "Forward-check an external schedule");
  cmd_sim->add_option("--schedule-dir", schedule_dir, "Directory with schedule_r<k>.csv")
      ->required();

  auto* cmd_prices = app.add_subcommand("prices", "Price series utilities");
  cmd_prices->require_subcommand(1);
  auto* cmd_gen = cmd_prices->add_subcommand("gen", "Generate a synthetic price CSV");
  std::string pattern = "flat", gen_out = "prices.csv";
  double mean = 50.0, volatility = 1.0;
  std::uint64_t gen_seed = 1;
  cmd_gen->add_option("--pattern", pattern, "flat | diurnal | spiky | duration-matched");
  cmd_gen->add_option("--mean", mean, "Target mean, $/MWh");
  cmd_gen->add_option("--volatility", volatility, "Relative dispersion");
  cmd_gen->add_option("--gen-seed", gen_seed, "Generator seed");
  cmd_gen->add_option("--out-csv", gen_out, "Output CSV path");
  auto* cmd_cluster = cmd_prices->add_subcommand("cluster", "Cluster a price CSV");
  std::string cluster_csv, cluster_out = "repdays.json";
  int cluster_k = 7;
  std::uint64_t cluster_seed = 1234;
  cmd_cluster->add_option("--csv", cluster_csv, "Input price CSV")->required();
  cmd_cluster->add_option("--k", cluster_k, "Number of representative days");
  cmd_cluster->add_option("--cluster-seed", cluster_seed, "Clustering seed");
  cmd_cluster->add_option("--out-json", cluster_out, "Output JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_gen->parsed()) {
      pemopt::SyntheticPriceSpec spec;
      spec.pattern = pemopt::parse_price_pattern(pattern);
      spec.mean_usd_per_mwh = mean;
      spec.volatility = volatility;
      spec.seed = args.seed_set ? args.seed : gen_seed;
      pemopt::write_price_csv(pemopt::generate_prices(spec), gen_out);
      std::fprintf(stderr, "wrote %s\n", gen_out.c_str());
      return kExitOk;
    }
    if (cmd_cluster->parsed()) {
      std::vector<std::string> warnings;
      const auto series = pemopt::load_prices(cluster_csv,
                                              pemopt::PriceCsvFormat::kTimestampPrice,
                                              &warnings);
      for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      const auto days = pemopt::cluster_rep_days(
          series, cluster_k, args.seed_set ? args.seed : cluster_seed, &warnings);
      std::ofstream out(cluster_out);
      out << days.to_json() << "\n";
      std::fprintf(stderr, "wrote %s (k=%d)\n", cluster_out.c_str(), days.k);
      return kExitOk;
    }
    if (args.scenario_path.empty()) {
      std::fprintf(stderr, "error: --scenario is required\n");
      return kExitConfig;
    }
    if (cmd_opt->parsed()) return run_optimize(args);
    if (cmd_eval->parsed()) return run_evaluate(args, n_cells_arg, storage_arg);
    if (cmd_sim->parsed()) return run_simulate(args, schedule_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
