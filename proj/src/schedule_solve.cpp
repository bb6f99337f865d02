#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pemopt/schedule/build.hpp"
#include "pemopt/schedule/physics.hpp"
#include "pemopt/schedule/simulate.hpp"

namespace pemopt {

namespace {

// Steady-state gas/thermal point at constant current, used to seed the solver.
struct SteadyState {
  double t_k, w_in, g3, n_h2, n_n2;
};

SteadyState steady_at(double i, double t_k, const PlantModel& m) {
  SteadyState s;
  s.t_k = t_k;
  const double gross =
      balances::crossover_gross(i, m.balance.p_cathode_bar, m.balance.p_anode_bar,
                                m.geometry, m.balance.crossover_coeff_per_bar);
  const double to_anode = gross * (1.0 - m.balance.recombination_conversion);
  const double o2_net = 0.5 * balances::h2_generation(i, m.geometry) -
                        0.5 * gross * m.balance.recombination_conversion;
  const double y_vap = schedmodel::anode_vapor_fraction(t_k, m);
  const double dry_out = std::max(1e-12, o2_net + to_anode);
  s.g3 = dry_out / (1.0 - y_vap);
  const double n_tot = schedmodel::anode_gas_moles(t_k, m);
  s.n_h2 = std::max(1e-12, to_anode / s.g3 * n_tot);
  s.n_n2 = 1e-6 * n_tot;

  // Water feed from the stationary energy balance; the rhs is affine in the
  // inlet flow through the liquid outflow term.
  const double w_min =
      y_vap * s.g3 + schedmodel::drag_flux(i, t_k, m) +
      balances::h2_generation(i, m.geometry) -
      gross * m.balance.recombination_conversion;
  if (m.bounds.thermal_enabled) {
    const double r0 = schedmodel::thermal_residual(t_k, t_k, i, w_min, s.g3, s.n_h2,
                                                   s.n_n2, 0.0, m.dt_seconds(), m);
    const double r1 = schedmodel::thermal_residual(t_k, t_k, i, w_min + 1.0, s.g3,
                                                   s.n_h2, s.n_n2, 0.0, m.dt_seconds(), m);
    const double slope = r1 - r0;  // per mol/s of extra feed (negative)
    double w = w_min;
    if (slope < -1e-16 && r0 < 0.0) w = w_min - r0 / slope;
    s.w_in = std::clamp(w, std::max(0.0, w_min), m.bounds.water_in_max);
  } else {
    s.w_in = std::clamp(std::max(0.0, w_min) * 1.2, 0.0, m.bounds.water_in_max);
  }
  return s;
}

}  // namespace

std::vector<double> ScheduleModel::cold_start_vector() const {
  const auto& m = model_;
  const int S = steps_;
  std::vector<double> x0(problem_->x0());

  // Demand-matching constant current (plus margin for crossover), 70 C.
  const double per_i =
      balances::h2_generation(1.0, m.geometry) -
      balances::crossover_gross(1.0, m.balance.p_cathode_bar, m.balance.p_anode_bar,
                                m.geometry, m.balance.crossover_coeff_per_bar);
  double i0 = m.demand_mol_s() / std::max(1e-12, per_i);
  const double margin = 0.02 * (m.bounds.i_max - m.bounds.i_min);
  i0 = std::clamp(i0, m.bounds.i_min + margin, m.bounds.i_max - margin);
  const double t0 = m.bounds.thermal_enabled
                        ? std::clamp(343.15, m.bounds.t_min_k + 0.5, m.bounds.t_max_k - 0.5)
                        : m.bounds.t_fixed_k;
  const auto ss = steady_at(i0, t0, m);
  const double d_step = m.dt_hours * degradation::rate_v_per_h(i0, m.degradation);

  for (int r = 0; r < days_.k; ++r) {
    for (int t = 0; t < S; ++t) {
      x0[var(r, t, Var::kCurrent)] = i0;
      x0[var(r, t, Var::kTemperature)] = ss.t_k;
      x0[var(r, t, Var::kWaterIn)] = ss.w_in;
      x0[var(r, t, Var::kGas3)] = ss.g3;
      x0[var(r, t, Var::kNH2)] = ss.n_h2;
      x0[var(r, t, Var::kNN2)] = ss.n_n2;
      x0[var(r, t, Var::kSocDev)] = 0.0;
      if (model_.degradation_enabled) x0[var(r, t, Var::kDeg)] = d_step * (t + 1);
      x0[var(r, t, Var::kCharge)] = 0.0;
      x0[var(r, t, Var::kDischarge)] = 0.0;
      x0[var(r, t, Var::kPurge)] = 0.0;
    }
    x0[var_min_dev(r)] = 0.0;
    x0[var_max_dev(r)] = 0.0;
    if (model_.degradation_enabled) {
      double e = 0;
      for (int t = 0; t < S; ++t)
        e += days_.price(r, (t + 1.0) * m.dt_hours - 1e-9) * 1e-6 *
             m.geometry.total_area_cm2() * i0 * m.dt_hours;
      x0[var_price_charge(r)] = e;
      double carry = 0;
      for (int r2 = 0; r2 < days_.k; ++r2)
        carry += k_coeff_[r][r2] * d_step * S;
      x0[var_carry(r)] = carry;
    }
  }
  for (int d = 0; d < days_.n_days; ++d)
    x0[var_day_start(d)] = 0.5 * capacity_mol_;
  return x0;
}

void ScheduleModel::set_cold_start() { problem_->set_x0(cold_start_vector()); }

void ScheduleModel::set_start_from(const Schedule& prev) {
  if (static_cast<int>(prev.rep_days.size()) != days_.k ||
      (days_.k > 0 && static_cast<int>(prev.rep_days[0].size()) != steps_)) {
    set_cold_start();
    return;
  }
  auto x0 = cold_start_vector();
  for (int r = 0; r < days_.k; ++r) {
    double e = 0;
    for (int t = 0; t < steps_; ++t) {
      const auto& s = prev.rep_days[r][t];
      x0[var(r, t, Var::kCurrent)] = s.i;
      x0[var(r, t, Var::kTemperature)] = s.temperature;
      x0[var(r, t, Var::kWaterIn)] = s.water_in;
      x0[var(r, t, Var::kGas3)] = s.anode_gas_out;
      x0[var(r, t, Var::kNH2)] = s.n_h2_anode;
      x0[var(r, t, Var::kNN2)] = s.n_n2_anode;
      x0[var(r, t, Var::kSocDev)] = s.soc_dev;
      if (model_.degradation_enabled) x0[var(r, t, Var::kDeg)] = s.deg_state;
      x0[var(r, t, Var::kCharge)] = s.charge;
      x0[var(r, t, Var::kDischarge)] = s.discharge;
      x0[var(r, t, Var::kPurge)] = s.purge;
      e += s.price_usd_mwh * 1e-6 * model_.geometry.total_area_cm2() * s.i *
           model_.dt_hours;
    }
    const auto& dev = prev.storage.soc_dev[r];
    x0[var_min_dev(r)] = *std::min_element(dev.begin(), dev.end());
    x0[var_max_dev(r)] = *std::max_element(dev.begin(), dev.end());
    if (model_.degradation_enabled) {
      x0[var_price_charge(r)] = e;
      double carry = 0;
      for (int r2 = 0; r2 < days_.k; ++r2)
        carry += k_coeff_[r][r2] * prev.rep_days[r2].back().deg_state;
      x0[var_carry(r)] = carry;
    }
  }
  const int nd = std::min<int>(days_.n_days, prev.storage.soc_real_start.size());
  for (int d = 0; d < nd; ++d)
    x0[var_day_start(d)] = std::clamp(prev.storage.soc_real_start[d], 0.0, capacity_mol_);
  problem_->set_x0(x0);
}

Schedule ScheduleModel::extract(const nlp::IpmResult& res) const {
  const auto& m = model_;
  const int S = steps_;
  const double dt_s = m.dt_seconds();
  const double dt_h = m.dt_hours;
  const auto& x = res.x;
  Schedule out;
  out.rep_days.resize(days_.k);
  out.rep_day_weight.assign(days_.weights.begin(), days_.weights.end());

  const double comp_w = m.opcost.compressor.work_j_per_mol(m.balance.p_cathode_bar);
  std::vector<double> deltas(days_.k, 0.0);

  for (int r = 0; r < days_.k; ++r) {
    auto& dayrec = out.rep_days[r];
    dayrec.resize(S);
    double deg_acc = 0;
    for (int t = 0; t < S; ++t) {
      const int tp = (t + S - 1) % S;
      auto& s = dayrec[t];
      s.price_usd_mwh = days_.price(r, (t + 1.0) * dt_h - 1e-9);
      s.i = x[var(r, t, Var::kCurrent)];
      s.temperature = x[var(r, t, Var::kTemperature)];
      s.water_in = x[var(r, t, Var::kWaterIn)];
      s.anode_gas_out = x[var(r, t, Var::kGas3)];
      s.n_h2_anode = x[var(r, t, Var::kNH2)];
      s.n_n2_anode = x[var(r, t, Var::kNN2)];
      s.soc_dev = x[var(r, t, Var::kSocDev)];
      s.charge = x[var(r, t, Var::kCharge)];
      s.discharge = x[var(r, t, Var::kDischarge)];
      s.purge = x[var(r, t, Var::kPurge)];
      s.y_h2_anode = schedmodel::anode_fraction(s.n_h2_anode, s.temperature, m);
      // Reported degradation uses the piecewise law.
      deg_acc += dt_h * degradation::rate_v_per_h(s.i, m.degradation) *
                 (m.degradation_enabled ? 1.0 : 0.0);
      s.deg_state = m.degradation_enabled ? deg_acc : 0.0;
      s.v_undeg = electrochem::undegraded_voltage_t(s.i, s.temperature, m.electrochem);
      s.h2_gen = balances::h2_generation(s.i, m.geometry);
      s.h2_prod = schedmodel::h2_product(s.i, s.temperature,
                                         x[var(r, tp, Var::kTemperature)], dt_s, m);
      s.delivered = s.h2_prod - s.charge + s.discharge;
      s.stack_power_kw =
          schedmodel::stack_power_w(s.i, s.v_undeg + s.deg_state, m) / 1000.0;
      s.total_power_kw = s.stack_power_kw +
                         (schedmodel::bop_power_w(s.h2_prod, m) + s.charge * comp_w) /
                             1000.0;
    }
    deltas[r] = m.degradation_enabled ? deg_acc : 0.0;
  }

  out.ledger = DegradationLedger::build(deltas, days_.mapping);
  out.end_of_year_degradation_v = out.ledger.end_of_year;

  // Storage link.
  out.storage.capacity_mol = capacity_mol_;
  out.storage.delta_mol.resize(days_.k);
  out.storage.soc_dev.assign(days_.k, std::vector<double>(S + 1, 0.0));
  for (int r = 0; r < days_.k; ++r) {
    for (int t = 0; t < S; ++t)
      out.storage.soc_dev[r][t + 1] = out.rep_days[r][t].soc_dev;
    out.storage.delta_mol[r] = out.storage.soc_dev[r][S];
  }
  out.storage.soc_real_start.resize(days_.n_days);
  for (int d = 0; d < days_.n_days; ++d)
    out.storage.soc_real_start[d] = x[var_day_start(d)];

  out.vopex = assemble_vopex(out.rep_days, out.ledger);

  // Peak power over the whole year: within-day profile plus the largest
  // degradation carried into any day of that rep profile.
  std::vector<double> max_carry(days_.k, 0.0);
  for (int d = 0; d < days_.n_days; ++d) {
    const int r = days_.mapping[d];
    max_carry[r] = std::max(max_carry[r], out.ledger.carried_into_day(d));
  }
  double peak_w = 0;
  double annual_wh = 0, annual_h2_mol = 0, cross_mol = 0;
  for (int r = 0; r < days_.k; ++r) {
    const double w_r = out.rep_day_weight[r];
    for (int t = 0; t < S; ++t) {
      const auto& s = out.rep_days[r][t];
      const double stack_w =
          schedmodel::stack_power_w(s.i, s.v_undeg + s.deg_state + max_carry[r], m);
      const double aux_w =
          schedmodel::bop_power_w(s.h2_prod, m) + s.charge * comp_w;
      peak_w = std::max(peak_w, stack_w + aux_w);
      annual_wh += w_r * schedmodel::stack_power_w(s.i, s.v_undeg + s.deg_state, m) * dt_h;
      annual_h2_mol += w_r * s.delivered * dt_s;
      cross_mol += w_r *
                   balances::crossover_gross(s.i, m.balance.p_cathode_bar,
                                             m.balance.p_anode_bar, m.geometry,
                                             m.balance.crossover_coeff_per_bar) *
                   dt_s;
    }
  }
  // Cumulative degradation adds current-proportional power across the year.
  if (m.degradation_enabled) {
    for (int d = 0; d < days_.n_days; ++d) {
      const int r = days_.mapping[d];
      const double carry = out.ledger.carried_into_day(d);
      for (int t = 0; t < S; ++t)
        annual_wh += out.rep_days[r][t].i * m.geometry.total_area_cm2() * carry * dt_h;
    }
  }
  out.peak_power_kwe = peak_w / 1000.0;
  out.annual_stack_energy_kwh = annual_wh / 1000.0;
  out.annual_h2_kg = annual_h2_mol * constants::kMolarMassH2;
  out.daily_h2_kg = out.annual_h2_kg / days_.n_days;
  out.h2_crossover_loss_kg = cross_mol * constants::kMolarMassH2;

  const double p_max_w = schedmodel::stack_power_w(
      m.bounds.i_max,
      electrochem::undegraded_voltage_t(
          m.bounds.i_max,
          m.bounds.thermal_enabled ? m.bounds.t_max_k : m.bounds.t_fixed_k,
          m.electrochem),
      m);
  out.utilization = annual_wh / (p_max_w * 24.0 * 350.0);
  return out;
}

VopexBreakdown assemble_vopex_from(const PlantModel& m, const RepDaySet& days,
                                   const std::vector<std::vector<StepRecord>>& rep,
                                   const DegradationLedger& ledger) {
  const double dt_s = m.dt_seconds();
  const double dt_h = m.dt_hours;
  const double comp_w = m.opcost.compressor.work_j_per_mol(m.balance.p_cathode_bar);
  const double p_water = m.opcost.water_price_usd_per_mol();
  const double p_n2 = m.opcost.n2_price_usd_per_mol();
  const int steps = static_cast<int>(rep.empty() ? 0 : rep[0].size());

  VopexBreakdown v;
  std::vector<double> e_r(days.k, 0.0);  // $ per carried volt
  for (int r = 0; r < days.k; ++r) {
    const double w_r = static_cast<double>(days.weights[r]);
    for (int t = 0; t < static_cast<int>(rep[r].size()); ++t) {
      const auto& s = rep[r][t];
      const int tp = (t + steps - 1) % steps;
      const double p_wh = s.price_usd_mwh * 1e-6;
      const double amps = s.i * m.geometry.total_area_cm2();
      v.electricity += w_r * p_wh * amps * (s.v_undeg + s.deg_state) * dt_h;
      e_r[r] += p_wh * amps * dt_h;

      const double bop_w = schedmodel::bop_power_w(s.h2_prod, m);
      v.bop_electricity += w_r * p_wh * (bop_w + s.charge * comp_w) * dt_h;

      const double vap3 =
          schedmodel::anode_vapor_fraction(s.temperature, m) * s.anode_gas_out;
      const double vap4 = schedmodel::cathode_vapor_out(
          s.i, s.temperature, rep[r][tp].temperature, dt_s, m);
      const double consum = balances::h2_generation(s.i, m.geometry);
      v.water += w_r * (consum + vap3 + vap4) * dt_s * p_water;
      v.nitrogen += w_r * s.purge * dt_s * p_n2;
    }
  }
  // Inter-day cumulative term: sum over days of (carried degradation) x
  // (price-weighted charge of that day's rep profile).
  if (m.degradation_enabled) {
    std::vector<int> seen(days.k, 0);
    for (int d = 0; d < days.n_days; ++d) {
      const int r = days.mapping[d];
      double carried = 0;
      for (int r2 = 0; r2 < days.k; ++r2)
        carried += seen[r2] * ledger.per_rep_day_delta[r2];
      v.electricity += carried * e_r[r];
      ++seen[r];
    }
  }
  v.total = v.electricity + v.bop_electricity + v.water + v.nitrogen;
  return v;
}

VopexBreakdown ScheduleModel::assemble_vopex(
    const std::vector<std::vector<StepRecord>>& rep,
    const DegradationLedger& ledger) const {
  return assemble_vopex_from(model_, days_, rep, ledger);
}

Schedule solve_schedule(ScheduleModel& model, const ScheduleSolveOptions& opt) {
  Schedule out;
  const double max_kg = model.max_daily_production_kg();
  if (max_kg < model.plant().demand_kg_per_day) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "infeasible by construction: max production %.1f kg/day at "
                  "i=%.2f A/cm2 with %.0f cells is below demand %.1f kg/day",
                  max_kg, model.plant().bounds.i_max, model.design().n_cells,
                  model.plant().demand_kg_per_day);
    out.info.status = SolveStatus::kInfeasible;
    out.info.message = buf;
    return out;
  }

  const bool warm = opt.warm_start != nullptr &&
                    opt.warm_start->info.status == SolveStatus::kOptimal;
  if (warm)
    model.set_start_from(*opt.warm_start);
  else
    model.set_cold_start();

  nlp::IpmOptions ipm = opt.ipm;
  std::span<const double> y_warm;
  if (warm) {
    ipm.mu_init = std::min(ipm.mu_init, 1e-3);
    if (opt.warm_start->info.multipliers.size() ==
        static_cast<std::size_t>(model.problem().n_cons()))
      y_warm = opt.warm_start->info.multipliers;
  }
  auto res = nlp::solve_ipm(model.problem(), ipm, {}, y_warm);
  if (!res.ok()) {
    // One restart: cold when the first attempt was warm, otherwise cold again
    // from a wider barrier.
    model.set_cold_start();
    nlp::IpmOptions retry = opt.ipm;
    if (!warm) retry.mu_init = 1.0;
    res = nlp::solve_ipm(model.problem(), retry);
  }

  out = model.extract(res);
  out.info.status = res.ok() ? SolveStatus::kOptimal : SolveStatus::kSolverFailure;
  out.info.iterations = res.iterations;
  out.info.kkt_error = res.kkt_error;
  out.info.feas_error = res.feas_error;
  out.info.objective = res.objective;
  out.info.message = res.message;
  out.info.multipliers = res.y;
  return out;
}

}  // namespace pemopt
