#pragma once

#include <string>
#include <vector>

#include "pemopt/schedule/model.hpp"

namespace pemopt {

// Capital and fixed-cost assumptions. Defaults are the 2022 set; the 2030
// variants swap the capital prices.
struct CostParams {
  double stack_capex_usd_per_cm2 = 2.37;
  double bop_capex_usd_per_kwe = 289.0;      // aggregate reference, see split below
  double storage_capex_usd_per_kg = 500.0;
  // The aggregate BoP price is split between an electrical part scaled on
  // peak power and a mechanical part scaled on daily production. The split is
  // calibrated 50/50 at a nominal plant whose peak draw is nominal_kwe_per_kg_day
  // kWe per kg/day of capacity, so that the two parts together reproduce the
  // aggregate $/kWe figure at that design point.
  double ebop_fraction = 0.5;
  double nominal_kwe_per_kg_day = 8.4;  // 420 MWe peak at 50,000 kg/day

  double site_prep = 0.02;          // of direct capital
  double engineering = 0.10;        // of direct capital
  double contingency = 0.15;        // of direct capital
  double permitting = 0.15;         // of direct capital
  double planned_replacement = 0.15;    // of direct capital, per replacement
  double unplanned_replacement = 0.005; // of direct capital, per year
  double overhead = 0.20;           // of labor
  double tax_insurance = 0.02;      // of total CAPEX, per year
  double labor_rate_usd_per_h = 70.0;
  int workers = 10;
  int operating_days = 350;
  double material_fopex_usd = 0.0;  // named in the source material, no value given
  int plant_life_years = 40;
  double discount_rate = 0.08;

  double alpha_ebop_usd_per_kwe() const { return ebop_fraction * bop_capex_usd_per_kwe; }
  double alpha_mbop_usd_per_kg_day() const {
    return (1.0 - ebop_fraction) * bop_capex_usd_per_kwe * nominal_kwe_per_kg_day;
  }

  static CostParams preset(const std::string& name);  // 2022 | 2030-mid | 2030-low | 2030-high
};

struct CapexBreakdown {
  double c_stack = 0;    // cells only
  double c_storage = 0;
  double c_mbop = 0;
  double c_ebop = 0;
  double direct = 0;     // stack + BoP + storage
  double indirect = 0;   // site prep + engineering + contingency + permitting
  double total = 0;
};

struct CostReport {
  double capex_total = 0;
  double planned_replacement_pv = 0;
  double unplanned_replacement_pv = 0;
  double fopex_pv = 0;
  double vopex_pv = 0;
  double pv_total = 0;
  double pv_h2_kg = 0;
  double lcoh_usd_per_kg = 0;
  // Five-bar decomposition of the LCOH (sums to lcoh_usd_per_kg).
  double lcoh_capex = 0, lcoh_planned = 0, lcoh_unplanned = 0, lcoh_fopex = 0,
         lcoh_vopex = 0;
  int replacement_interval_years = 0;
  double replacement_ratio_unfloored = 0;  // threshold / end-of-year, reported alongside
  double utilization = 0;
  double annual_h2_kg = 0;
  double days_storage = 0;
  double n_cells = 0;
  CapexBreakdown capex;
  VopexBreakdown vopex_year1;

  std::string to_json() const;
};

CapexBreakdown capex(const Design& design, double peak_power_kwe, double daily_h2_kg,
                     const CostParams& params, double cell_area_cm2 = 450.0);

double annual_fopex(const CostParams& params, double total_capex);

// Discounted present value over the plant life with degradation-driven
// electricity escalation between stack replacements. The escalation price
// (USD per carried volt-year) converts the carried end-of-year degradation
// into added electricity cost for later years of each replacement cycle.
CostReport present_value(const CapexBreakdown& capex_in, int replacement_interval,
                         double annual_vopex, double vopex_escalation_per_volt,
                         double end_of_year_degradation_v, double annual_h2_kg,
                         const CostParams& params);

double lcoh(double pv_total, double annual_h2_kg, const CostParams& params);

// Full evaluation of a solved schedule at a design point.
CostReport evaluate_costs(const Design& design, const Schedule& schedule,
                          const CostParams& params,
                          const DegradationParams& deg_params,
                          double cell_area_cm2 = 450.0);

}  // namespace pemopt
