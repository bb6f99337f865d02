#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pemopt/balances.hpp"
#include "pemopt/constants.hpp"
#include "pemopt/degradation.hpp"
#include "pemopt/electrochem.hpp"
#include "pemopt/prices.hpp"

namespace pemopt {

// Candidate plant sizing evaluated by the outer loop. Cell count is treated
// as continuous during the search and rounded only for reporting.
struct Design {
  double n_cells = 100000.0;
  double storage_days = 1.0;  // 1 day == one day of demand in kg H2
};

struct OperatingBounds {
  double i_min = 0.1;   // A/cm2
  double i_max = 4.0;   // A/cm2
  double t_min_k = 333.15;
  double t_max_k = 353.15;
  double y_h2_anode_max = 0.02;
  bool safety_enabled = true;
  bool thermal_enabled = true;
  double t_fixed_k = 343.15;     // operating temperature when thermal dynamics are off
  double water_in_max = 50000.0; // mol/s
  double purge_max = 1000.0;     // mol/s
};

struct CompressorParams {
  double gamma = 1.41;
  double isentropic_eff = 0.7;
  double suction_t_k = 298.15;
  double p_out_bar = 200.0;  // storage pressure

  // Single-stage isentropic work, J per mol compressed, at fixed suction
  // conditions.
  double work_j_per_mol(double p_in_bar) const;
};

struct OperatingCostParams {
  double water_price_usd_per_kgal = 2.78;
  double n2_price_usd_per_kg = 0.20;
  double bop_kwh_per_kg = 5.1;
  CompressorParams compressor;

  double water_price_usd_per_mol() const {
    return water_price_usd_per_kgal / constants::kMolPerKgal;
  }
  double n2_price_usd_per_mol() const {
    return n2_price_usd_per_kg * constants::kMolarMassN2;
  }
};

// Everything the scheduler needs besides the design and the price days.
struct PlantModel {
  ElectrochemParams electrochem;
  BalanceParams balance;
  StackGeometry geometry;  // n_cells is overwritten from the Design
  DegradationParams degradation;
  bool degradation_enabled = true;
  OperatingBounds bounds;
  OperatingCostParams opcost;
  double demand_kg_per_day = 50000.0;
  double dt_hours = 0.25;
  // When true, the heat-generation voltage inside the thermal ODE includes
  // the year-mean carried degradation (a linear function of the per-rep-day
  // deltas); otherwise fresh-stack voltage is used.
  bool thermal_voltage_mean_degradation = false;

  double demand_mol_s() const {
    return demand_kg_per_day / (86400.0 * constants::kMolarMassH2);
  }
  double dt_seconds() const { return dt_hours * 3600.0; }
  int steps_per_day() const;
};

// Compressed solver outcome for one inner solve.
enum class SolveStatus {
  kOptimal,
  kInfeasible,      // certified from the throughput bound
  kSolverFailure,   // iteration limit / stall / numerical error
};

struct SolveInfo {
  SolveStatus status = SolveStatus::kSolverFailure;
  int iterations = 0;
  double kkt_error = 0.0;
  double feas_error = 0.0;
  double objective = 0.0;  // NLP objective, $/yr
  std::string message;
  std::vector<double> multipliers;  // constraint duals, reused by warm starts
};

// One scheduled step of a representative day, in model units.
struct StepRecord {
  double price_usd_mwh = 0;
  double i = 0;            // A/cm2
  double temperature = 0;  // K
  double water_in = 0;     // mol/s
  double anode_gas_out = 0;
  double n_h2_anode = 0;   // holdup mol
  double n_n2_anode = 0;
  double y_h2_anode = 0;
  double soc_dev = 0;      // mol relative to day start
  double deg_state = 0;    // V accumulated within the day (piecewise law)
  double charge = 0;       // mol/s into storage
  double discharge = 0;    // mol/s out of storage
  double purge = 0;        // mol/s N2
  double v_undeg = 0;      // V
  double h2_gen = 0;       // mol/s faradaic generation
  double h2_prod = 0;      // mol/s dried product
  double delivered = 0;    // mol/s to demand
  double stack_power_kw = 0;
  double total_power_kw = 0;  // stack + BoP + compressor
};

struct VopexBreakdown {
  double total = 0;
  double electricity = 0;
  double bop_electricity = 0;
  double water = 0;
  double nitrogen = 0;
};

// Inter/intra-day storage superposition (deltas per rep day, carried
// start-of-day states for every real day).
struct StorageLink {
  std::vector<double> delta_mol;                 // k
  std::vector<std::vector<double>> soc_dev;      // k x (steps+1), soc_dev[r][0] == 0
  std::vector<double> soc_real_start;            // n_days
  double capacity_mol = 0;

  // Chronological SOC at every step boundary over the whole year,
  // assembled from the superposition.
  std::vector<double> reconstruct(std::span<const int> mapping) const;
};

struct Schedule {
  std::vector<std::vector<StepRecord>> rep_days;  // k x steps
  std::vector<double> rep_day_weight;             // copies of the weights
  StorageLink storage;
  DegradationLedger ledger;           // piecewise reporting values
  VopexBreakdown vopex;
  double peak_power_kwe = 0;
  double annual_h2_kg = 0;            // delivered
  double daily_h2_kg = 0;
  double end_of_year_degradation_v = 0;
  double annual_stack_energy_kwh = 0; // degradation-corrected
  double utilization = 0;
  double h2_crossover_loss_kg = 0;    // gross, per year
  SolveInfo info;
};

}  // namespace pemopt
