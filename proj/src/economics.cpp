#include "pemopt/economics.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pemopt {

CostParams CostParams::preset(const std::string& name) {
  CostParams p;  // 2022 defaults
  if (name == "2022") return p;
  p.bop_capex_usd_per_kwe = 103.0;
  p.storage_capex_usd_per_kg = 300.0;
  if (name == "2030-mid") {
    p.stack_capex_usd_per_cm2 = 0.79;
  } else if (name == "2030-low") {
    p.stack_capex_usd_per_cm2 = 0.39;
  } else if (name == "2030-high") {
    p.stack_capex_usd_per_cm2 = 1.00;
  } else {
    throw std::invalid_argument("unknown cost preset '" + name +
                                "' (use 2022 | 2030-mid | 2030-low | 2030-high)");
  }
  return p;
}

CapexBreakdown capex(const Design& design, double peak_power_kwe, double daily_h2_kg,
                     const CostParams& params, double cell_area_cm2) {
  CapexBreakdown c;
  c.c_stack = design.n_cells * cell_area_cm2 * params.stack_capex_usd_per_cm2;
  c.c_storage = design.storage_days * daily_h2_kg * params.storage_capex_usd_per_kg;
  c.c_mbop = params.alpha_mbop_usd_per_kg_day() * daily_h2_kg;
  c.c_ebop = params.alpha_ebop_usd_per_kwe() * peak_power_kwe;
  c.direct = c.c_stack + c.c_storage + c.c_mbop + c.c_ebop;
  c.indirect = (params.site_prep + params.engineering + params.contingency +
                params.permitting) *
               c.direct;
  c.total = c.direct + c.indirect;
  return c;
}

double annual_fopex(const CostParams& params, double total_capex) {
  // 24/7 coverage by the stated headcount over the operating days.
  const double labor =
      params.labor_rate_usd_per_h * params.workers * 24.0 * params.operating_days;
  return labor + params.overhead * labor + params.tax_insurance * total_capex +
         params.material_fopex_usd;
}

CostReport present_value(const CapexBreakdown& capex_in, int replacement_interval,
                         double annual_vopex, double vopex_escalation_per_volt,
                         double end_of_year_degradation_v, double annual_h2_kg,
                         const CostParams& params) {
  if (replacement_interval < 1)
    throw std::invalid_argument("present_value: replacement interval must be >= 1");
  CostReport r;
  r.capex = capex_in;
  r.capex_total = capex_in.total;
  const double fopex = annual_fopex(params, capex_in.total);
  const double upr = params.unplanned_replacement * capex_in.direct;
  const double pr = params.planned_replacement * capex_in.direct;

  double pv = capex_in.total;
  for (int y = 1; y <= params.plant_life_years; ++y) {
    const double disc = std::pow(1.0 + params.discount_rate, -y);
    // Years since the stack was last fresh (1-based within each cycle).
    const int cycle_pos = (y - 1) % replacement_interval + 1;
    const double vopex_y = annual_vopex + (cycle_pos - 1) * end_of_year_degradation_v *
                                              vopex_escalation_per_volt;
    const bool replace = (y % replacement_interval == 0) && y < params.plant_life_years;
    r.planned_replacement_pv += disc * (replace ? pr : 0.0);
    r.unplanned_replacement_pv += disc * upr;
    r.fopex_pv += disc * fopex;
    r.vopex_pv += disc * vopex_y;
    r.pv_h2_kg += disc * annual_h2_kg;
    pv += disc * ((replace ? pr : 0.0) + upr + fopex + vopex_y);
  }
  r.pv_total = pv;
  r.annual_h2_kg = annual_h2_kg;
  r.replacement_interval_years = replacement_interval;
  if (annual_h2_kg > 0) {
    r.lcoh_usd_per_kg = r.pv_total / r.pv_h2_kg;
    r.lcoh_capex = r.capex_total / r.pv_h2_kg;
    r.lcoh_planned = r.planned_replacement_pv / r.pv_h2_kg;
    r.lcoh_unplanned = r.unplanned_replacement_pv / r.pv_h2_kg;
    r.lcoh_fopex = r.fopex_pv / r.pv_h2_kg;
    r.lcoh_vopex = r.vopex_pv / r.pv_h2_kg;
  }
  return r;
}

double lcoh(double pv_total, double annual_h2_kg, const CostParams& params) {
  if (pv_total == 0.0) return 0.0;
  if (!(annual_h2_kg > 0))
    throw std::invalid_argument("lcoh: undefined for zero hydrogen production");
  double pv_h2 = 0;
  for (int y = 1; y <= params.plant_life_years; ++y)
    pv_h2 += annual_h2_kg * std::pow(1.0 + params.discount_rate, -y);
  return pv_total / pv_h2;
}

CostReport evaluate_costs(const Design& design, const Schedule& schedule,
                          const CostParams& params,
                          const DegradationParams& deg_params,
                          double cell_area_cm2) {
  const auto cx = capex(design, schedule.peak_power_kwe, schedule.daily_h2_kg,
                        params, cell_area_cm2);
  const int interval =
      replacement_interval_years(schedule.end_of_year_degradation_v, deg_params);

  // Price-weighted annual charge: the marginal electricity cost of one volt
  // of carried degradation, $/(V yr).
  double escalation = 0;
  const double total_area = design.n_cells * cell_area_cm2;
  for (std::size_t r = 0; r < schedule.rep_days.size(); ++r) {
    const double w_r = schedule.rep_day_weight[r];
    for (const auto& s : schedule.rep_days[r]) {
      // dt recovered from the trajectory length (steps cover 24 h).
      const double dt_h = 24.0 / schedule.rep_days[r].size();
      escalation += w_r * s.price_usd_mwh * 1e-6 * s.i * total_area * dt_h;
    }
  }

  auto report = present_value(cx, interval, schedule.vopex.total, escalation,
                              schedule.end_of_year_degradation_v,
                              schedule.annual_h2_kg, params);
  report.utilization = schedule.utilization;
  report.days_storage = design.storage_days;
  report.n_cells = design.n_cells;
  report.vopex_year1 = schedule.vopex;
  report.replacement_ratio_unfloored =
      schedule.end_of_year_degradation_v > 0
          ? deg_params.replacement_threshold_v / schedule.end_of_year_degradation_v
          : static_cast<double>(interval);
  return report;
}

std::string CostReport::to_json() const {
  nlohmann::json j;
  j["capex_total_usd"] = capex_total;
  j["capex"]["stack"] = capex.c_stack;
  j["capex"]["storage"] = capex.c_storage;
  j["capex"]["mechanical_bop"] = capex.c_mbop;
  j["capex"]["electrical_bop"] = capex.c_ebop;
  j["capex"]["direct"] = capex.direct;
  j["capex"]["indirect"] = capex.indirect;
  j["planned_replacement_pv_usd"] = planned_replacement_pv;
  j["unplanned_replacement_pv_usd"] = unplanned_replacement_pv;
  j["fopex_pv_usd"] = fopex_pv;
  j["vopex_pv_usd"] = vopex_pv;
  j["pv_total_usd"] = pv_total;
  j["pv_h2_kg"] = pv_h2_kg;
  j["lcoh_usd_per_kg"] = lcoh_usd_per_kg;
  j["lcoh_breakdown"]["capex"] = lcoh_capex;
  j["lcoh_breakdown"]["planned_replacement"] = lcoh_planned;
  j["lcoh_breakdown"]["unplanned_replacement"] = lcoh_unplanned;
  j["lcoh_breakdown"]["fopex"] = lcoh_fopex;
  j["lcoh_breakdown"]["vopex"] = lcoh_vopex;
  j["replacement_interval_years"] = replacement_interval_years;
  j["replacement_ratio_unfloored"] = replacement_ratio_unfloored;
  j["utilization"] = utilization;
  j["annual_h2_kg"] = annual_h2_kg;
  j["days_storage"] = days_storage;
  j["n_cells"] = n_cells;
  j["vopex_year1"]["total"] = vopex_year1.total;
  j["vopex_year1"]["electricity"] = vopex_year1.electricity;
  j["vopex_year1"]["bop_electricity"] = vopex_year1.bop_electricity;
  j["vopex_year1"]["water"] = vopex_year1.water;
  j["vopex_year1"]["nitrogen"] = vopex_year1.nitrogen;
  return j.dump(2);
}

}  // namespace pemopt
