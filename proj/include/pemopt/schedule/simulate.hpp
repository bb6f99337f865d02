#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pemopt/schedule/model.hpp"

namespace pemopt {

// Weighted-plus-cumulative vOPEX assembly shared by the optimizer extraction
// and the forward simulator.
VopexBreakdown assemble_vopex_from(const PlantModel& model, const RepDaySet& days,
                                   const std::vector<std::vector<StepRecord>>& rep,
                                   const DegradationLedger& ledger);

struct StepControls {
  double i = 0.1;
  double water_in = 0;
  double purge = 0;
  double charge = 0;
  double discharge = 0;
};

struct SimState {
  double temperature = 343.15;
  double n_h2_anode = 0;
  double n_n2_anode = 0;
};

struct ViolationReport {
  int temperature = 0;
  int safety = 0;       // y_h2 above the 2% operating limit
  int lfl = 0;          // y_h2 above the 4% lower flammability limit
  int storage = 0;      // reconstructed SOC outside [0, capacity]
  int demand = 0;       // delivered below the baseload rate
  int water = 0;        // negative liquid outflow
  int checks = 0;       // evaluation points examined
  double max_y_h2 = 0;
  double wrap_error_mol = 0;  // year-end vs year-start storage mismatch

  bool clean(double /*tol*/ = 0) const {
    return temperature == 0 && safety == 0 && lfl == 0 && storage == 0 &&
           demand == 0 && water == 0;
  }
};

// Whole-trajectory atom/Faraday bookkeeping, relative closure errors.
struct ConservationReport {
  double h_rel = 0;
  double o_rel = 0;
  double n_rel = 0;
  double faraday_rel = 0;
};

struct SimulationResult {
  std::vector<std::vector<StepRecord>> rep_days;
  StorageLink storage;
  DegradationLedger ledger;
  VopexBreakdown vopex;
  ViolationReport violations;
  ConservationReport conservation;
};

// Integrates one representative day forward with implicit Euler from the
// given initial state; per-step Newton solves on (T, N_H2, N_N2, gas3).
std::vector<StepRecord> simulate_rep_day(const PlantModel& model,
                                         std::span<const StepControls> controls,
                                         std::span<const double> hourly_prices,
                                         const SimState& init);

// Full-year forward check of a set of per-rep-day control trajectories:
// periodic day states, storage superposition, violation scan against the
// model's bounds, realized cost and conservation accounting.
//
// initial_soc fixes the year-start storage level; when absent the
// reconstructed series is shifted so its minimum touches zero.
SimulationResult simulate_year(const PlantModel& model, const RepDaySet& days,
                               double capacity_mol,
                               const std::vector<std::vector<StepControls>>& controls,
                               std::optional<double> initial_soc = std::nullopt);

// Convenience wrapper: re-simulates a solved schedule from its own controls.
SimulationResult resimulate(const PlantModel& model, const RepDaySet& days,
                            const Schedule& schedule);

}  // namespace pemopt
