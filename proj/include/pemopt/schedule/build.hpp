#pragma once

#include <memory>
#include <optional>

#include "pemopt/nlp/ipm.hpp"
#include "pemopt/nlp/problem.hpp"
#include "pemopt/prices.hpp"
#include "pemopt/schedule/model.hpp"

namespace pemopt {

// Direct transcription of the inner operating problem: implicit-Euler
// dynamics for temperature, anode gas holdups, intra-day storage and
// degradation on every representative day, plus the inter-day storage
// superposition across the full year.
class ScheduleModel {
 public:
  enum class Var {
    kCurrent,
    kTemperature,
    kWaterIn,
    kGas3,
    kNH2,
    kNN2,
    kSocDev,
    kDeg,
    kCharge,
    kDischarge,
    kPurge,
  };

  ScheduleModel(PlantModel model, Design design, RepDaySet rep_days);

  const PlantModel& plant() const { return model_; }
  const Design& design() const { return design_; }
  const RepDaySet& days() const { return days_; }
  nlp::Problem& problem() { return *problem_; }
  const nlp::Problem& problem() const { return *problem_; }

  int steps() const { return steps_; }
  int k() const { return days_.k; }
  int n_days() const { return days_.n_days; }
  double capacity_mol() const { return capacity_mol_; }
  double demand_mol_s() const { return model_.demand_mol_s(); }

  // Variable indices.
  int var(int r, int t, Var v) const;
  int var_min_dev(int r) const { return rep_extra_offset_ + r * per_rep_extra_; }
  int var_max_dev(int r) const { return rep_extra_offset_ + r * per_rep_extra_ + 1; }
  int var_price_charge(int r) const {  // E_r, $ per volt
    return rep_extra_offset_ + r * per_rep_extra_ + 2;
  }
  int var_carry(int r) const {  // weighted carried degradation, volt-days
    return rep_extra_offset_ + r * per_rep_extra_ + 3;
  }
  int var_day_start(int d) const { return day_offset_ + d; }

  // Structural counts, kept in closed form so tests can hand-check them.
  static int expected_vars(int k, int steps, int n_days, bool degradation);
  static int expected_cons(int k, int steps, int n_days, bool degradation,
                           bool thermal, bool safety);

  // Demand reachable at full current, used to certify infeasibility before
  // solving.
  double max_daily_production_kg() const;

  void set_cold_start();
  void set_start_from(const Schedule& previous);

  Schedule extract(const nlp::IpmResult& res) const;

  // Weighted-plus-cumulative vOPEX assembly from trajectories and the
  // piecewise degradation ledger.
  VopexBreakdown assemble_vopex(const std::vector<std::vector<StepRecord>>& rep,
                                const DegradationLedger& ledger) const;

  const std::vector<std::vector<double>>& cumulative_coeff() const { return k_coeff_; }

 private:
  void build();
  std::vector<double> cold_start_vector() const;

  PlantModel model_;
  Design design_;
  RepDaySet days_;
  std::unique_ptr<nlp::Problem> problem_;
  int steps_ = 0;
  double capacity_mol_ = 0;
  int per_step_vars_ = 0;
  int per_rep_extra_ = 0;
  int rep_extra_offset_ = 0;
  int day_offset_ = 0;
  std::vector<std::vector<double>> k_coeff_;  // K[r][r'] cumulative-day counts
  std::vector<double> mean_carry_coeff_;      // per r', for the thermal option
};

struct ScheduleSolveOptions {
  ScheduleSolveOptions() { ipm.max_iter = 3000; }
  nlp::IpmOptions ipm;
  const Schedule* warm_start = nullptr;
};

// Pre-checks throughput feasibility, then solves (warm start first when
// available, one cold restart on failure).
Schedule solve_schedule(ScheduleModel& model, const ScheduleSolveOptions& opt = {});

}  // namespace pemopt
