#include "pemopt/schedule/simulate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pemopt/nlp/dual.hpp"
#include "pemopt/schedule/physics.hpp"

namespace pemopt {

namespace {

using nlp::Dual2;

// Implicit-Euler step: solve the coupled (T, N_H2, N_N2, g3) system by Newton
// with exact derivatives. With thermal dynamics disabled the temperature stays
// pinned and the system drops to three unknowns.
SimState implicit_step(const PlantModel& m, const SimState& prev,
                       const StepControls& u, double* gas3_out) {
  const double dt_s = m.dt_seconds();
  const bool thermal = m.bounds.thermal_enabled;
  const int n = thermal ? 4 : 3;

  // Unknown layout: [T,] N_H2, N_N2, g3.
  Eigen::VectorXd x(n);
  int k = 0;
  if (thermal) x(k++) = prev.temperature;
  x(k++) = std::max(prev.n_h2_anode, 1e-12);
  x(k++) = std::max(prev.n_n2_anode, 1e-12);
  {
    const double y_vap =
        schedmodel::anode_vapor_fraction(prev.temperature, m);
    const double dry = std::max(
        1e-12, 0.5 * balances::h2_generation(u.i, m.geometry) + u.purge);
    x(k) = dry / (1.0 - y_vap);
  }

  for (int iter = 0; iter < 80; ++iter) {
    std::array<Dual2, 4> v;
    for (int j = 0; j < n; ++j) v[j] = Dual2::seed(x(j), n, j);
    const Dual2 t_k = thermal ? v[0] : Dual2(m.bounds.t_fixed_k);
    const Dual2& nh2 = v[thermal ? 1 : 0];
    const Dual2& nn2 = v[thermal ? 2 : 1];
    const Dual2& g3 = v[thermal ? 3 : 2];

    std::array<Dual2, 4> r;
    int e = 0;
    if (thermal)
      r[e++] = schedmodel::thermal_residual(t_k, Dual2(prev.temperature), Dual2(u.i),
                                            Dual2(u.water_in), g3, nh2, nn2,
                                            Dual2(0.0), dt_s, m);
    r[e++] = schedmodel::anode_h2_residual(nh2, Dual2(prev.n_h2_anode), Dual2(u.i),
                                           g3, t_k, dt_s, m);
    r[e++] = schedmodel::anode_n2_residual(nn2, Dual2(prev.n_n2_anode), Dual2(u.purge),
                                           g3, t_k, dt_s, m);
    r[e++] = schedmodel::anode_o2_residual(
        t_k, Dual2(prev.temperature), nh2, Dual2(prev.n_h2_anode), nn2,
        Dual2(prev.n_n2_anode), Dual2(u.i), g3, dt_s, m);

    Eigen::VectorXd rv(n);
    Eigen::MatrixXd jac(n, n);
    double rnorm = 0;
    for (int a = 0; a < n; ++a) {
      rv(a) = r[a].value();
      rnorm = std::max(rnorm, std::abs(rv(a)));
      for (int b = 0; b < n; ++b) jac(a, b) = r[a].grad()(b);
    }
    if (rnorm < 1e-11) break;
    Eigen::VectorXd dx = jac.fullPivLu().solve(-rv);
    // Keep the gas-space variables physical while Newton converges.
    double alpha = 1.0;
    for (int j = (thermal ? 1 : 0); j < n; ++j)
      if (x(j) + dx(j) < 0) alpha = std::min(alpha, -0.9 * x(j) / dx(j));
    if (thermal) {
      if (x(0) + dx(0) < 260.0) alpha = std::min(alpha, (260.0 - x(0)) / dx(0));
      if (x(0) + dx(0) > 395.0) alpha = std::min(alpha, (395.0 - x(0)) / dx(0));
    }
    x += alpha * dx;
  }

  SimState out;
  k = 0;
  out.temperature = thermal ? x(k++) : m.bounds.t_fixed_k;
  out.n_h2_anode = x(k++);
  out.n_n2_anode = x(k++);
  *gas3_out = x(k);
  return out;
}

}  // namespace

std::vector<StepRecord> simulate_rep_day(const PlantModel& m,
                                         std::span<const StepControls> controls,
                                         std::span<const double> hourly_prices,
                                         const SimState& init) {
  const int S = static_cast<int>(controls.size());
  const double dt_s = m.dt_seconds();
  const double dt_h = m.dt_hours;
  const double comp_w = m.opcost.compressor.work_j_per_mol(m.balance.p_cathode_bar);
  std::vector<StepRecord> out(S);
  SimState state = init;
  double soc = 0, deg = 0;
  for (int t = 0; t < S; ++t) {
    const SimState prev = state;
    double gas3 = 0;
    state = implicit_step(m, prev, controls[t], &gas3);
    auto& s = out[t];
    const int hour = std::min<int>(23, static_cast<int>(t * dt_h));
    s.price_usd_mwh = hourly_prices.empty() ? 0.0 : hourly_prices[hour];
    s.i = controls[t].i;
    s.temperature = state.temperature;
    s.water_in = controls[t].water_in;
    s.anode_gas_out = gas3;
    s.n_h2_anode = state.n_h2_anode;
    s.n_n2_anode = state.n_n2_anode;
    s.y_h2_anode = schedmodel::anode_fraction(state.n_h2_anode, state.temperature, m);
    s.charge = controls[t].charge;
    s.discharge = controls[t].discharge;
    s.purge = controls[t].purge;
    soc += dt_s * (s.charge - s.discharge);
    s.soc_dev = soc;
    if (m.degradation_enabled)
      deg += dt_h * degradation::rate_v_per_h(s.i, m.degradation);
    s.deg_state = deg;
    s.v_undeg = electrochem::undegraded_voltage_t(s.i, s.temperature, m.electrochem);
    s.h2_gen = balances::h2_generation(s.i, m.geometry);
    s.h2_prod = schedmodel::h2_product(s.i, state.temperature, prev.temperature, dt_s, m);
    s.delivered = s.h2_prod - s.charge + s.discharge;
    s.stack_power_kw = schedmodel::stack_power_w(s.i, s.v_undeg + s.deg_state, m) / 1e3;
    s.total_power_kw =
        s.stack_power_kw +
        (schedmodel::bop_power_w(s.h2_prod, m) + s.charge * comp_w) / 1e3;
  }
  return out;
}

SimulationResult simulate_year(const PlantModel& m, const RepDaySet& days,
                               double capacity_mol,
                               const std::vector<std::vector<StepControls>>& controls,
                               std::optional<double> initial_soc) {
  if (static_cast<int>(controls.size()) != days.k)
    throw std::invalid_argument("simulate_year: need one control trajectory per rep day");
  const int S = static_cast<int>(controls[0].size());
  const double dt_s = m.dt_seconds();

  SimulationResult res;
  res.rep_days.resize(days.k);
  std::vector<double> deltas(days.k, 0.0), deg_deltas(days.k, 0.0);

  for (int r = 0; r < days.k; ++r) {
    // Two passes settle the day onto its periodic orbit; the first pass
    // starts from the steady point of the first step's current.
    SimState init;
    init.temperature = m.bounds.thermal_enabled ? 343.15 : m.bounds.t_fixed_k;
    const double n_tot = schedmodel::anode_gas_moles(init.temperature, m);
    init.n_h2_anode = 1e-4 * n_tot;
    init.n_n2_anode = 1e-4 * n_tot;
    auto pass = simulate_rep_day(m, controls[r], days.rep_days[r], init);
    init.temperature = pass.back().temperature;
    init.n_h2_anode = pass.back().n_h2_anode;
    init.n_n2_anode = pass.back().n_n2_anode;
    res.rep_days[r] = simulate_rep_day(m, controls[r], days.rep_days[r], init);
    deltas[r] = res.rep_days[r].back().soc_dev;
    deg_deltas[r] = res.rep_days[r].back().deg_state;
  }

  res.ledger = DegradationLedger::build(deg_deltas, days.mapping);

  // Storage superposition across real days.
  res.storage.capacity_mol = capacity_mol;
  res.storage.delta_mol = deltas;
  res.storage.soc_dev.assign(days.k, std::vector<double>(S + 1, 0.0));
  for (int r = 0; r < days.k; ++r)
    for (int t = 0; t < S; ++t)
      res.storage.soc_dev[r][t + 1] = res.rep_days[r][t].soc_dev;
  res.storage.soc_real_start.resize(days.n_days);
  double carry = 0.0;
  for (int d = 0; d < days.n_days; ++d) {
    res.storage.soc_real_start[d] = carry;
    carry += deltas[days.mapping[d]];
  }
  res.violations.wrap_error_mol = std::abs(carry);  // should return to the start
  double shift;
  if (initial_soc.has_value()) {
    shift = *initial_soc;
  } else {
    const auto recon = res.storage.reconstruct(days.mapping);
    shift = -*std::min_element(recon.begin(), recon.end());
  }
  for (auto& v : res.storage.soc_real_start) v += shift;

  // Violation scan.
  auto& viol = res.violations;
  const double demand = m.demand_mol_s();
  const double tol = 1e-7;
  for (int r = 0; r < days.k; ++r) {
    for (const auto& s : res.rep_days[r]) {
      ++viol.checks;
      if (m.bounds.thermal_enabled &&
          (s.temperature > m.bounds.t_max_k + 1e-6 ||
           s.temperature < m.bounds.t_min_k - 1e-6))
        ++viol.temperature;
      viol.max_y_h2 = std::max(viol.max_y_h2, s.y_h2_anode);
      if (s.y_h2_anode > m.bounds.y_h2_anode_max + 1e-9) ++viol.safety;
      if (s.y_h2_anode > 0.04 + 1e-9) ++viol.lfl;
      if (s.delivered < demand * (1.0 - 1e-6) - tol) ++viol.demand;
      const double liq3 = schedmodel::anode_liquid_out(s.i, s.temperature, s.water_in,
                                                       s.anode_gas_out, m);
      if (liq3 < -1e-7) ++viol.water;
    }
  }
  {
    const auto recon = res.storage.reconstruct(days.mapping);
    for (double v : recon) {
      if (v < -1e-6 || v > capacity_mol + 1e-6) ++viol.storage;
    }
    if (viol.wrap_error_mol > 1e-6 * std::max(1.0, capacity_mol)) ++viol.storage;
  }

  res.vopex = assemble_vopex_from(m, days, res.rep_days, res.ledger);

  // Conservation accounting over every rep day (atoms in - out - accumulated).
  double h_in = 0, h_out = 0, h_acc = 0;
  double o_in = 0, o_out = 0, o_acc = 0;
  double n_in = 0, n_out = 0, n_acc = 0;
  double far_lhs = 0, far_rhs = 0;
  for (int r = 0; r < days.k; ++r) {
    const auto& steps = res.rep_days[r];
    for (int t = 0; t < S; ++t) {
      const auto& s = steps[t];
      const double t_prev = steps[(t + S - 1) % S].temperature;
      const double nh2_prev = steps[(t + S - 1) % S].n_h2_anode;
      const double nn2_prev = steps[(t + S - 1) % S].n_n2_anode;
      const double y_vap = schedmodel::anode_vapor_fraction(s.temperature, m);
      const double vap3 = y_vap * s.anode_gas_out;
      const double liq3 = schedmodel::anode_liquid_out(s.i, s.temperature, s.water_in,
                                                       s.anode_gas_out, m);
      const double vap4 =
          schedmodel::cathode_vapor_out(s.i, s.temperature, t_prev, dt_s, m);
      const double liq4 = schedmodel::drag_flux(s.i, s.temperature, m) - vap4;
      const double n_o2 =
          schedmodel::anode_dry_moles(s.temperature, m) - s.n_h2_anode - s.n_n2_anode;
      const double n_o2_prev =
          schedmodel::anode_dry_moles(t_prev, m) - nh2_prev - nn2_prev;
      const double y_o2 = schedmodel::anode_fraction(n_o2, s.temperature, m);
      const double y_n2 = schedmodel::anode_fraction(s.n_n2_anode, s.temperature, m);
      const double h2_an_out = s.y_h2_anode * s.anode_gas_out;
      const double o2_out = y_o2 * s.anode_gas_out;
      const double n2_out = y_n2 * s.anode_gas_out;
      const double dcat = schedmodel::cathode_h2_moles(s.temperature, m) -
                          schedmodel::cathode_h2_moles(t_prev, m);

      // Water holdups are neglected by construction, so only gas species
      // accumulate.
      h_in += 2.0 * s.water_in * dt_s;
      h_out += (2.0 * (liq3 + vap3 + liq4 + vap4) + 2.0 * h2_an_out + 2.0 * s.h2_prod) * dt_s;
      h_acc += 2.0 * (s.n_h2_anode - nh2_prev) + 2.0 * dcat;
      o_in += s.water_in * dt_s;
      o_out += ((liq3 + vap3 + liq4 + vap4) + 2.0 * o2_out) * dt_s;
      o_acc += 2.0 * (n_o2 - n_o2_prev);
      n_in += 2.0 * s.purge * dt_s;
      n_out += 2.0 * n2_out * dt_s;
      n_acc += 2.0 * (s.n_n2_anode - nn2_prev);

      far_lhs += (s.h2_prod +
                  balances::crossover_gross(s.i, m.balance.p_cathode_bar,
                                            m.balance.p_anode_bar, m.geometry,
                                            m.balance.crossover_coeff_per_bar)) *
                     dt_s +
                 dcat;
      far_rhs += balances::h2_generation(s.i, m.geometry) * dt_s;
    }
  }
  const auto rel = [](double err, double scale) {
    return std::abs(err) / std::max(1.0, std::abs(scale));
  };
  res.conservation.h_rel = rel(h_in - h_out - h_acc, h_in);
  res.conservation.o_rel = rel(o_in - o_out - o_acc, o_in);
  res.conservation.n_rel = rel(n_in - n_out - n_acc, std::max(n_in, 1e-6));
  res.conservation.faraday_rel = rel(far_lhs - far_rhs, far_rhs);
  return res;
}

SimulationResult resimulate(const PlantModel& m, const RepDaySet& days,
                            const Schedule& schedule) {
  std::vector<std::vector<StepControls>> controls(days.k);
  for (int r = 0; r < days.k; ++r) {
    controls[r].resize(schedule.rep_days[r].size());
    for (std::size_t t = 0; t < schedule.rep_days[r].size(); ++t) {
      const auto& s = schedule.rep_days[r][t];
      controls[r][t] = {s.i, s.water_in, s.purge, s.charge, s.discharge};
    }
  }
  const double soc0 = schedule.storage.soc_real_start.empty()
                          ? 0.0
                          : schedule.storage.soc_real_start.front();
  return simulate_year(m, days, schedule.storage.capacity_mol, controls, soc0);
}

}  // namespace pemopt
