#include "pemopt/schedule/export.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pemopt/balances.hpp"

namespace pemopt {

std::vector<std::string> write_schedule_csvs(const Schedule& schedule,
                                             const std::string& dir) {
  std::vector<std::string> written;
  std::filesystem::create_directories(dir);
  for (std::size_t r = 0; r < schedule.rep_days.size(); ++r) {
    const auto path =
        (std::filesystem::path(dir) / ("schedule_r" + std::to_string(r) + ".csv"))
            .string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "step,price_usd_mwh,i_a_cm2,temperature_k,v_undeg,v_deg_cuml,"
           "h2_gen_mol_s,y_h2_anode,soc_mol,purge_mol_s,water_in_mol_s,"
           "anode_gas_mol_s,charge_mol_s,discharge_mol_s,h2_prod_mol_s,"
           "delivered_mol_s,total_power_kw\n";
    char buf[512];
    for (std::size_t t = 0; t < schedule.rep_days[r].size(); ++t) {
      const auto& s = schedule.rep_days[r][t];
      std::snprintf(buf, sizeof buf,
                    "%zu,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,"
                    "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                    t, s.price_usd_mwh, s.i, s.temperature, s.v_undeg, s.deg_state,
                    s.h2_gen, s.y_h2_anode, s.soc_dev, s.purge, s.water_in,
                    s.anode_gas_out, s.charge, s.discharge, s.h2_prod, s.delivered,
                    s.total_power_kw);
      out << buf;
    }
    written.push_back(path);
  }
  return written;
}

std::string schedule_summary_json(const Schedule& schedule) {
  nlohmann::json j;
  j["status"] = schedule.info.status == SolveStatus::kOptimal      ? "optimal"
                : schedule.info.status == SolveStatus::kInfeasible ? "infeasible"
                                                                   : "failed";
  j["message"] = schedule.info.message;
  j["iterations"] = schedule.info.iterations;
  j["kkt_error"] = schedule.info.kkt_error;
  j["feasibility_error"] = schedule.info.feas_error;
  j["objective_usd"] = schedule.info.objective;
  j["vopex"]["total"] = schedule.vopex.total;
  j["vopex"]["electricity"] = schedule.vopex.electricity;
  j["vopex"]["bop_electricity"] = schedule.vopex.bop_electricity;
  j["vopex"]["water"] = schedule.vopex.water;
  j["vopex"]["nitrogen"] = schedule.vopex.nitrogen;
  j["peak_power_kwe"] = schedule.peak_power_kwe;
  j["degradation_after_one_year_v"] = schedule.end_of_year_degradation_v;
  j["annual_h2_kg"] = schedule.annual_h2_kg;
  j["daily_h2_kg"] = schedule.daily_h2_kg;
  j["utilization"] = schedule.utilization;
  j["h2_crossover_loss_kg_per_year"] = schedule.h2_crossover_loss_kg;
  j["storage_capacity_mol"] = schedule.storage.capacity_mol;
  j["storage_delta_mol"] = schedule.storage.delta_mol;
  return j.dump(2);
}

std::vector<StepControls> read_schedule_controls(const std::string& csv_path,
                                                 int expected_steps) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open schedule csv " + csv_path);
  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("empty schedule csv " + csv_path);
  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  auto col_index = [&](const std::string& name) {
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (cols[k] == name) return static_cast<int>(k);
    return -1;
  };
  const int ci = col_index("i_a_cm2");
  if (ci < 0)
    throw std::runtime_error("schedule csv " + csv_path + " lacks an i_a_cm2 column");
  const int cw = col_index("water_in_mol_s");
  const int cp = col_index("purge_mol_s");
  const int cc = col_index("charge_mol_s");
  const int cd = col_index("discharge_mol_s");

  std::vector<StepControls> controls;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) row.push_back(f.empty() ? 0.0 : std::stod(f));
    StepControls u;
    u.i = row.at(ci);
    if (cw >= 0) u.water_in = row.at(cw);
    if (cp >= 0) u.purge = row.at(cp);
    if (cc >= 0) u.charge = row.at(cc);
    if (cd >= 0) u.discharge = row.at(cd);
    controls.push_back(u);
  }
  if (expected_steps > 0 && static_cast<int>(controls.size()) != expected_steps)
    throw std::runtime_error("schedule csv " + csv_path + " has " +
                             std::to_string(controls.size()) + " steps, expected " +
                             std::to_string(expected_steps));
  return controls;
}

std::string simulation_report_json(const SimulationResult& sim) {
  nlohmann::json j;
  j["violations"]["temperature"] = sim.violations.temperature;
  j["violations"]["safety_2pct"] = sim.violations.safety;
  j["violations"]["lfl_4pct"] = sim.violations.lfl;
  j["violations"]["storage"] = sim.violations.storage;
  j["violations"]["demand"] = sim.violations.demand;
  j["violations"]["water"] = sim.violations.water;
  j["violations"]["checks"] = sim.violations.checks;
  j["violations"]["max_y_h2_anode"] = sim.violations.max_y_h2;
  j["violations"]["storage_wrap_error_mol"] = sim.violations.wrap_error_mol;
  j["clean"] = sim.violations.clean();
  j["realized_vopex"]["total"] = sim.vopex.total;
  j["realized_vopex"]["electricity"] = sim.vopex.electricity;
  j["realized_vopex"]["bop_electricity"] = sim.vopex.bop_electricity;
  j["realized_vopex"]["water"] = sim.vopex.water;
  j["realized_vopex"]["nitrogen"] = sim.vopex.nitrogen;
  j["conservation"]["h_rel"] = sim.conservation.h_rel;
  j["conservation"]["o_rel"] = sim.conservation.o_rel;
  j["conservation"]["n_rel"] = sim.conservation.n_rel;
  j["conservation"]["faraday_rel"] = sim.conservation.faraday_rel;
  j["degradation_after_one_year_v"] = sim.ledger.end_of_year;
  return j.dump(2);
}

std::string current_histogram_csv(const Schedule& schedule, int bins) {
  double lo = 1e300, hi = -1e300;
  for (const auto& day : schedule.rep_days)
    for (const auto& s : day) {
      lo = std::min(lo, s.i);
      hi = std::max(hi, s.i);
    }
  if (!(hi > lo)) hi = lo + 1e-6;
  std::vector<double> hours(bins, 0.0);
  const int steps = schedule.rep_days.empty() ? 0
                                              : static_cast<int>(schedule.rep_days[0].size());
  const double dt_h = steps > 0 ? 24.0 / steps : 0.0;
  for (std::size_t r = 0; r < schedule.rep_days.size(); ++r) {
    for (const auto& s : schedule.rep_days[r]) {
      int b = static_cast<int>((s.i - lo) / (hi - lo) * bins);
      b = std::min(bins - 1, std::max(0, b));
      hours[b] += schedule.rep_day_weight[r] * dt_h;
    }
  }
  std::ostringstream out;
  out << "bin_lo_a_cm2,bin_hi_a_cm2,hours_per_year\n";
  char buf[96];
  for (int b = 0; b < bins; ++b) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.4f\n", lo + (hi - lo) * b / bins,
                  lo + (hi - lo) * (b + 1) / bins, hours[b]);
    out << buf;
  }
  return out.str();
}

std::string duration_curve_csv(const RepDaySet& days) {
  std::vector<double> prices;
  for (int d = 0; d < days.n_days; ++d)
    for (double p : days.rep_days[days.mapping[d]]) prices.push_back(p);
  std::sort(prices.rbegin(), prices.rend());
  std::ostringstream out;
  out << "hour_rank,price_usd_per_mwh\n";
  char buf[64];
  for (std::size_t h = 0; h < prices.size(); ++h) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f\n", h, prices[h]);
    out << buf;
  }
  return out.str();
}

}  // namespace pemopt
