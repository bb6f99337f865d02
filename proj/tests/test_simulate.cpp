#include <doctest.h>

#include <cmath>

#include "pemopt/schedule/build.hpp"
#include "pemopt/schedule/simulate.hpp"

using namespace pemopt;

namespace {

RepDaySet two_level_days(int n_days) {
  std::vector<double> day(24, 180.0);
  for (int h = 0; h < 12; ++h) day[h] = 8.0;
  RepDaySet s;
  s.k = 1;
  s.n_days = n_days;
  s.rep_days = {day};
  s.weights = {n_days};
  s.mapping.assign(n_days, 0);
  s.medoid_day = {0};
  s.validate();
  return s;
}

}  // namespace

TEST_CASE("resimulating a solved schedule reproduces it without violations") {
  auto days = two_level_days(3);
  PlantModel m;
  m.degradation_enabled = true;
  m.dt_hours = 1.0;
  m.demand_kg_per_day = 60.0;
  Design design{220.0, 1.0};
  ScheduleModel sm(m, design, days);
  const auto sched = solve_schedule(sm);
  REQUIRE(sched.info.status == SolveStatus::kOptimal);

  PlantModel mm = m;
  mm.geometry.n_cells = design.n_cells;
  const auto sim = resimulate(mm, days, sched);
  CHECK(sim.violations.clean());
  CHECK(sim.violations.checks == 24);

  // The forward integration lands on the optimizer's trajectory.
  for (int t = 0; t < 24; ++t) {
    const auto& a = sched.rep_days[0][t];
    const auto& b = sim.rep_days[0][t];
    CHECK(b.temperature == doctest::Approx(a.temperature).epsilon(1e-5));
    CHECK(b.y_h2_anode == doctest::Approx(a.y_h2_anode).epsilon(1e-3).scale(1e-4));
    CHECK(b.h2_prod == doctest::Approx(a.h2_prod).epsilon(1e-5));
  }
  // Realized cost matches the optimizer's assembly.
  CHECK(sim.vopex.total == doctest::Approx(sched.vopex.total).epsilon(1e-5));

  // Conservation closes far inside the acceptance band.
  CHECK(sim.conservation.h_rel < 1e-8);
  CHECK(sim.conservation.o_rel < 1e-8);
  CHECK(sim.conservation.n_rel < 1e-8);
  CHECK(sim.conservation.faraday_rel < 1e-8);
}

TEST_CASE("constructed high-crossover schedule flags safety violations") {
  auto days = two_level_days(2);
  PlantModel m;
  m.degradation_enabled = false;
  m.dt_hours = 1.0;
  m.demand_kg_per_day = 0.0;
  m.geometry.n_cells = 200.0;
  // Crank the crossover correlation far up and idle at minimum current: the
  // anode H2 fraction blows through both the 2% and 4% limits.
  m.balance.crossover_coeff_per_bar = 0.31;
  std::vector<std::vector<StepControls>> controls(1);
  controls[0].assign(24, StepControls{0.1, 50.0, 0.0, 0.0, 0.0});
  const auto sim = simulate_year(m, days, 0.0, controls);
  CHECK(sim.violations.safety > 0);
  CHECK(sim.violations.lfl > 0);
  CHECK(sim.violations.max_y_h2 > 0.04);
  // Purging nitrogen dilutes the anode below the limit again.
  m.balance.crossover_coeff_per_bar = 3.1e-3;
  std::vector<std::vector<StepControls>> purged(1);
  purged[0].assign(24, StepControls{0.1, 50.0, 0.0, 0.0, 0.0});
  const auto base = simulate_year(m, days, 0.0, purged);
  purged[0].assign(24, StepControls{0.1, 50.0, 0.5, 0.0, 0.0});
  const auto diluted = simulate_year(m, days, 0.0, purged);
  CHECK(diluted.violations.max_y_h2 < base.violations.max_y_h2);
}

TEST_CASE("storage wrap mismatch is reported") {
  auto days = two_level_days(2);
  PlantModel m;
  m.degradation_enabled = false;
  m.bounds.thermal_enabled = false;
  m.dt_hours = 3.0;
  m.geometry.n_cells = 200.0;
  m.demand_kg_per_day = 0.0;
  std::vector<std::vector<StepControls>> controls(1);
  controls[0].assign(8, StepControls{0.5, 10.0, 0.0, 0.0, 0.0});
  controls[0][0].charge = 0.01;  // net charge never discharged
  const auto sim = simulate_year(m, days, 1e6, controls);
  CHECK(sim.violations.wrap_error_mol > 0);
  CHECK(sim.violations.storage > 0);
}

TEST_CASE("demand shortfall is flagged") {
  auto days = two_level_days(2);
  PlantModel m;
  m.degradation_enabled = false;
  m.bounds.thermal_enabled = false;
  m.dt_hours = 3.0;
  m.geometry.n_cells = 200.0;
  m.demand_kg_per_day = 1000.0;  // far above what i=0.1 delivers
  std::vector<std::vector<StepControls>> controls(1);
  controls[0].assign(8, StepControls{0.1, 10.0, 0.0, 0.0, 0.0});
  const auto sim = simulate_year(m, days, 0.0, controls);
  CHECK(sim.violations.demand == 8);
}
