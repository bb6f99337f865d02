// Acceptance suite: one line per criterion, PASS/FAIL with the measured
// values, nonzero exit if anything fails. Heavy pipeline criteria run at
// k=2-3 representative days on synthetic duration-matched prices.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pemopt/design/optimize.hpp"
#include "pemopt/economics.hpp"
#include "pemopt/electrochem.hpp"
#include "pemopt/manifest.hpp"
#include "pemopt/schedule/export.hpp"
#include "pemopt/schedule/simulate.hpp"
#include "pemopt/synth_prices.hpp"
#include "../support/toy_oracle.hpp"

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

using namespace pemopt;

// ---------------------------------------------------------------------------
void criterion_1_polarization() {
  const ElectrochemParams p;
  const double v60 = total_voltage({1.0, 333.15}, 0.0, p);
  const double v80 = total_voltage({1.0, 353.15}, 0.0, p);
  const bool pass = std::abs(v60 - 1.78) <= 0.02 && std::abs(v80 - 1.70) <= 0.02;
  report(1, pass, fmt("V(1 A/cm2, 60C)=%.4f (1.78+-0.02), V(1, 80C)=%.4f (1.70+-0.02)",
                      v60, v80));
}

void criterion_2_ocv() {
  ElectrochemParams p;
  p.p_cathode = 1.0;
  p.p_anode = 1.0;
  const double v = open_circuit_voltage({0.0, 298.15}, p);
  report(2, std::abs(v - 1.229) <= 0.005, fmt("V_oc(298.15 K, 1 bar)=%.5f (1.229+-0.005)", v));
}

void criterion_3_degradation_law() {
  DegradationParams p;
  const double ratio = degradation_rate(2.0, p) / degradation_rate(1.0, p);
  const double left = degradation_rate(1.0 - 1e-12, p);
  const double right = degradation_rate(1.0 + 1e-12, p);
  // One year of constant 1 A/cm2 at the scheduler's quadrature.
  std::vector<double> day(96, 1.0);
  double year = 0;
  for (int d = 0; d < 365; ++d) year += accumulate_degradation(day, 0.25, p);
  const bool pass = ratio == 4.0 && std::abs(left - right) < 1e-15 &&
                    std::abs(year - 0.2628) <= 1e-6;
  report(3, pass,
         fmt("rate(2)/rate(1)=%.12f (4 exact), knee jump=%.2e, year@1A=%.8f V "
             "(0.2628+-1e-6)",
             ratio, std::abs(left - right), year));
}

void criterion_4_oracle() {
  auto toy = testsupport::standard_toy();
  const double oracle = testsupport::oracle_optimum(toy);
  ScheduleModel sm(toy.model,
                   Design{toy.model.geometry.n_cells,
                          toy.capacity_mol * constants::kMolarMassH2 /
                              toy.model.demand_kg_per_day},
                   toy.days);
  const auto sched = solve_schedule(sm);
  const bool solved = sched.info.status == SolveStatus::kOptimal;
  const double rel = solved ? sched.info.objective / oracle : 0.0;
  report(4, solved && rel >= 0.98 && rel <= 1.02,
         fmt("nlp=%.6e vs enumeration=%.6e (ratio %.4f, within [0.98, 1.02])",
             sched.info.objective, oracle, rel));
}

void criterion_5_storage_reconstruction() {
  // 28-day synthetic year, k=4 profiles in a mixed pattern.
  auto shape = [](double base, double swing) {
    std::vector<double> day(24);
    for (int h = 0; h < 24; ++h)
      day[h] = base + swing * std::sin(2 * 3.141592653589793 * (h - 6) / 24.0);
    return day;
  };
  RepDaySet days;
  days.k = 4;
  days.n_days = 28;
  days.rep_days = {shape(12, 6), shape(45, 20), shape(110, 35), shape(70, 10)};
  const int pattern[28] = {0, 0, 1, 2, 2, 3, 1, 0, 1, 2, 3, 3, 2, 0,
                           0, 1, 1, 2, 3, 2, 0, 1, 2, 3, 2, 1, 0, 2};
  days.mapping.assign(pattern, pattern + 28);
  days.weights.assign(4, 0);
  for (int d = 0; d < 28; ++d) ++days.weights[days.mapping[d]];
  days.medoid_day = {0, 2, 3, 5};
  days.validate();

  PlantModel m;
  m.dt_hours = 1.0;
  m.demand_kg_per_day = 60.0;
  ScheduleModel sm(m, Design{230.0, 1.5}, days);
  const auto sched = solve_schedule(sm);
  if (sched.info.status != SolveStatus::kOptimal) {
    report(5, false, "inner solve failed on the 28-day instance");
    return;
  }
  // Chronological reference integration of the same dispatch.
  const double dt_s = m.dt_seconds();
  double soc = sched.storage.soc_real_start[0];
  double max_err = 0;
  const auto recon = sched.storage.reconstruct(days.mapping);
  std::size_t p = 1;
  for (int d = 0; d < 28; ++d) {
    const auto& steps = sched.rep_days[days.mapping[d]];
    for (const auto& s : steps) {
      soc += (s.charge - s.discharge) * dt_s;
      max_err = std::max(max_err, std::abs(recon[p++] - soc));
    }
  }
  const double wrap = std::abs(soc - sched.storage.soc_real_start[0]);
  const double scale = std::max(1.0, sched.storage.capacity_mol);
  const bool pass = max_err / scale <= 1e-8 && wrap / scale <= 1e-8;
  report(5, pass,
         fmt("superposition vs chronological: max %.2e rel, wraparound %.2e rel "
             "(<=1e-8)",
             max_err / scale, wrap / scale));
}

void criterion_6_gss() {
  SearchBox box;
  const double xs = 116200.0, ys = 0.51;
  const auto res = GoldenSearch2D::minimize(box, [&](std::span<const Design> ds) {
    std::vector<double> out;
    for (const auto& d : ds) {
      const double a = (d.n_cells - xs) / 1000.0, b = d.storage_days - ys;
      out.push_back(a * a + b * b);
    }
    return out;
  });
  double incumbent = 1e300;
  bool monotone = true;
  for (const auto& row : res.trace) {
    const double it = std::min({row.pv[0], row.pv[1], row.pv[2], row.pv[3]});
    if (it > incumbent * (1 + 1e-14)) monotone = false;
    incumbent = std::min(incumbent, it);
  }
  const double ex = std::abs(res.best.n_cells - xs) / (box.n_cells_hi - box.n_cells_lo);
  const double ey =
      std::abs(res.best.storage_days - ys) / (box.storage_days_hi - box.storage_days_lo);
  const bool pass = res.converged && res.iterations <= 30 && ex <= 1e-3 && ey <= 1e-3 &&
                    monotone;
  report(6, pass,
         fmt("surrogate minimizer error (%.2e, %.2e) of box width (<=1e-3), %d "
             "iterations (<=30), incumbent monotone=%d",
             ex, ey, res.iterations, monotone ? 1 : 0));
}

// Shared pipeline state for criteria 7-9.
struct PipelineRuns {
  RepDaySet days;
  PlantModel model_on, model_off;
  CostParams costs;
  OptimizeResult deg_on, deg_off;
  bool ready = false;
};

PipelineRuns run_pipeline() {
  PipelineRuns pr;
  SyntheticPriceSpec spec;
  spec.pattern = PricePattern::kDurationMatched;
  spec.mean_usd_per_mwh = 62.55;  // 2022-like mean, high volatility
  spec.volatility = 1.0;
  spec.seed = 20220101;
  const auto series = generate_prices(spec);
  pr.days = cluster_rep_days(series, 3, 1234);

  pr.model_on.degradation_enabled = true;
  pr.model_off.degradation_enabled = false;
  pr.costs = CostParams::preset("2022");

  OptimizeOptions opt;
  opt.jobs = 4;
  opt.box.tolerance = 4e-3;
  const char* verbose = std::getenv("PEMOPT_ACCEPT_VERBOSE");
  if (verbose && verbose[0] == '1')
    opt.log = [](const std::string& l) { std::fprintf(stderr, "  %s\n", l.c_str()); };

  pr.deg_on = optimize_design(pr.model_on, pr.days, pr.costs, opt);
  pr.deg_off = optimize_design(pr.model_off, pr.days, pr.costs, opt);
  pr.ready = pr.deg_on.ok && pr.deg_off.ok;
  return pr;
}

void criterion_7_qualitative(const PipelineRuns& pr) {
  if (!pr.ready) {
    report(7, false, "pipeline optimization failed");
    return;
  }
  const auto& on = pr.deg_on;
  const auto& off = pr.deg_off;
  const bool cells = on.design.n_cells > off.design.n_cells;
  const bool storage = on.design.storage_days < off.design.storage_days;
  const bool util = on.costs.utilization < off.costs.utilization;
  const bool lcoh = on.costs.lcoh_usd_per_kg > off.costs.lcoh_usd_per_kg;
  report(7, cells && storage && util && lcoh,
         fmt("deg-on vs deg-off: cells %.0f>%.0f:%d, storage %.3f<%.3f:%d, util "
             "%.3f<%.3f:%d, lcoh %.3f>%.3f:%d",
             on.design.n_cells, off.design.n_cells, cells, on.design.storage_days,
             off.design.storage_days, storage, on.costs.utilization,
             off.costs.utilization, util, on.costs.lcoh_usd_per_kg,
             off.costs.lcoh_usd_per_kg, lcoh));
}

void criterion_8_fixed_design(const PipelineRuns& pr) {
  if (!pr.ready) {
    report(8, false, "pipeline optimization failed");
    return;
  }
  OptimizeOptions opt;
  const auto fixed =
      evaluate_design(pr.model_on, pr.days, pr.costs, pr.deg_off.design, opt);
  if (!fixed.ok) {
    report(8, false, "fixed-design evaluation failed: " + fixed.message);
    return;
  }
  const double l_fixed = fixed.costs.lcoh_usd_per_kg;
  const double l_coopt = pr.deg_on.costs.lcoh_usd_per_kg;
  report(8, l_fixed > l_coopt,
         fmt("degradation-off design under degradation: lcoh %.4f > co-optimized "
             "%.4f (+%.1f%%)",
             l_fixed, l_coopt, 100.0 * (l_fixed / l_coopt - 1.0)));
}

void criterion_9_conservation(const PipelineRuns& pr) {
  if (!pr.ready) {
    report(9, false, "pipeline optimization failed");
    return;
  }
  auto model = pr.model_on;
  model.geometry.n_cells = pr.deg_on.design.n_cells;
  const auto sim = resimulate(model, pr.days, pr.deg_on.schedule);
  const auto& c = sim.conservation;
  const bool pass = c.h_rel <= 1e-8 && c.o_rel <= 1e-8 && c.faraday_rel <= 1e-8;
  report(9, pass,
         fmt("atom closure H=%.2e O=%.2e, faraday=%.2e (<=1e-8 relative)", c.h_rel,
             c.o_rel, c.faraday_rel));
}

void criterion_10_economics() {
  CapexBreakdown cx;
  cx.c_stack = 120e6;
  cx.c_storage = 12e6;
  cx.c_mbop = 60e6;
  cx.c_ebop = 60e6;
  cx.direct = cx.c_stack + cx.c_storage + cx.c_mbop + cx.c_ebop;
  cx.indirect = 0.42 * cx.direct;
  cx.total = cx.direct + cx.indirect;
  CostParams params;
  const auto r = present_value(cx, 2, 45e6, 25e6, 0.45, 365 * 50000.0, params);
  const double bars =
      r.lcoh_capex + r.lcoh_planned + r.lcoh_unplanned + r.lcoh_fopex + r.lcoh_vopex;
  const double decomp_err = std::abs(bars - r.lcoh_usd_per_kg) / r.lcoh_usd_per_kg;

  DegradationParams dp;
  const int r1 = replacement_interval_years(0.45, dp);
  const int r2 = replacement_interval_years(1.97, dp);
  const int r3 = replacement_interval_years(0.0, dp);
  const bool pass = decomp_err <= 1e-9 && r1 == 2 && r2 == 1 && r3 == 7;
  report(10, pass,
         fmt("lcoh bars sum error=%.2e (<=1e-9); intervals 0.45->%d (2), 1.97->%d "
             "(1), 0->%d (7)",
             decomp_err, r1, r2, r3));
}

void criterion_11_determinism(const std::string& bin_dir) {
  namespace fs = std::filesystem;
  const auto work = fs::temp_directory_path() / "pemopt_accept_det";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string pemopt = (fs::path(bin_dir) / "pemopt").string();
  if (!fs::exists(pemopt)) {
    report(11, false, "pemopt binary not found in " + bin_dir);
    return;
  }
  auto run = [&](const std::string& cmd) { return std::system(cmd.c_str()); };
  const std::string prices = (work / "p.csv").string();
  int rc = run(pemopt + " prices gen --pattern duration-matched --mean 62.55 "
                        "--gen-seed 11 --out-csv " + prices + " 2>/dev/null");
  {
    std::ofstream f(work / "det.toml");
    f << "name = \"det\"\nprice_csv = \"p.csv\"\ncost_preset = \"2022\"\n"
      << "[degradation]\nenabled = true\n"
      << "[schedule]\nrep_days = 2\ndt_hours = 1.0\n"
      << "[design]\nn_cells = 120000\nstorage_days = 0.8\n"
      << "[seeds]\ncluster = 42\n";
  }
  rc |= run(pemopt + " evaluate --scenario " + (work / "det.toml").string() +
            " --out " + (work / "out1").string() + " 2>/dev/null");
  rc |= run(pemopt + " evaluate --scenario " + (work / "det.toml").string() +
            " --out " + (work / "out2").string() + " 2>/dev/null");
  if (rc != 0) {
    report(11, false, "determinism runs did not complete cleanly");
    return;
  }
  bool identical = true;
  std::string differing;
  for (const char* name :
       {"cost_report.json", "schedule_summary.json", "lcoh_breakdown.csv",
        "repdays.json", "schedule_r0.csv", "schedule_r1.csv"}) {
    const auto a = fnv1a64_file((work / "out1" / name).string());
    const auto b = fnv1a64_file((work / "out2" / name).string());
    if (a != b) {
      identical = false;
      differing += std::string(name) + " ";
    }
  }
  report(11, identical,
         identical ? "two identical-seed runs produced byte-identical reports"
                   : "reports differ: " + differing);
}

}  // namespace

int main(int argc, char** argv) {
  std::string bin_dir = ".";
  for (int a = 1; a + 1 < argc; ++a)
    if (std::string(argv[a]) == "--bin-dir") bin_dir = argv[a + 1];

  criterion_1_polarization();
  criterion_2_ocv();
  criterion_3_degradation_law();
  criterion_4_oracle();
  criterion_5_storage_reconstruction();
  criterion_6_gss();
  const auto pr = run_pipeline();
  criterion_7_qualitative(pr);
  criterion_8_fixed_design(pr);
  criterion_9_conservation(pr);
  criterion_10_economics();
  criterion_11_determinism(bin_dir);

  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
