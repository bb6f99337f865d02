#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pemopt/schedule/build.hpp"
#include "pemopt/schedule/physics.hpp"

namespace pemopt {

using nlp::make_linear;
using nlp::make_term;

double CompressorParams::work_j_per_mol(double p_in_bar) const {
  if (!(p_in_bar > 0) || p_out_bar < p_in_bar)
    throw std::domain_error("compressor: need p_out >= p_in > 0");
  const double g = gamma;
  const double exponent = (g - 1.0) / g;
  const double ratio = std::pow(p_out_bar / p_in_bar, exponent);
  return (g / (g - 1.0)) * constants::kGasConstant * suction_t_k * (ratio - 1.0) /
         isentropic_eff;
}

int PlantModel::steps_per_day() const {
  const double s = 24.0 / dt_hours;
  const int si = static_cast<int>(std::lround(s));
  if (std::abs(s - si) > 1e-9 || si < 2)
    throw std::invalid_argument("dt_hours must divide 24 h into >= 2 steps");
  return si;
}

std::vector<double> StorageLink::reconstruct(std::span<const int> mapping) const {
  const int steps = static_cast<int>(soc_dev.empty() ? 0 : soc_dev[0].size() - 1);
  std::vector<double> out;
  out.reserve(mapping.size() * steps + 1);
  for (std::size_t d = 0; d < mapping.size(); ++d) {
    const auto& dev = soc_dev[mapping[d]];
    for (int t = 0; t < steps; ++t) out.push_back(soc_real_start[d] + dev[t]);
  }
  // Closing state of the last day (wraps onto day 0's start).
  out.push_back(soc_real_start.back() + soc_dev[mapping.back()][steps]);
  return out;
}

ScheduleModel::ScheduleModel(PlantModel model, Design design, RepDaySet rep_days)
    : model_(std::move(model)), design_(design), days_(std::move(rep_days)) {
  model_.geometry.n_cells = design_.n_cells;
  model_.geometry.validate();
  model_.electrochem.validate();
  model_.degradation.validate();
  days_.validate();
  if (!(design_.storage_days >= 0))
    throw std::invalid_argument("design: storage_days must be >= 0");
  if (model_.demand_kg_per_day < 0)
    throw std::invalid_argument("demand must be >= 0");
  if (!(model_.bounds.i_min < model_.bounds.i_max) ||
      !(model_.bounds.t_min_k < model_.bounds.t_max_k))
    throw std::invalid_argument("bounds must satisfy lo < hi");

  steps_ = model_.steps_per_day();
  capacity_mol_ =
      design_.storage_days * model_.demand_kg_per_day / constants::kMolarMassH2;

  // Cumulative-degradation coefficients: K[r][r2] counts, over all days d
  // mapped to r, how many earlier days were mapped to r2. The inter-day sum
  // in the electricity cost collapses onto these k^2 integers.
  k_coeff_.assign(days_.k, std::vector<double>(days_.k, 0.0));
  mean_carry_coeff_.assign(days_.k, 0.0);
  {
    std::vector<int> seen(days_.k, 0);
    for (int d = 0; d < days_.n_days; ++d) {
      const int r = days_.mapping[d];
      for (int r2 = 0; r2 < days_.k; ++r2) {
        k_coeff_[r][r2] += seen[r2];
        mean_carry_coeff_[r2] += seen[r2];
      }
      ++seen[r];
    }
    for (int r2 = 0; r2 < days_.k; ++r2) mean_carry_coeff_[r2] /= days_.n_days;
  }

  build();
}

int ScheduleModel::var(int r, int t, Var v) const {
  const int base = (r * steps_ + t) * per_step_vars_;
  int off = static_cast<int>(v);
  if (!model_.degradation_enabled && v == Var::kDeg)
    throw std::logic_error("degradation variable not present");
  if (!model_.degradation_enabled && off > static_cast<int>(Var::kDeg)) --off;
  return base + off;
}

int ScheduleModel::expected_vars(int k, int steps, int n_days, bool degradation) {
  const int per_step = degradation ? 11 : 10;
  const int per_rep = degradation ? 4 : 2;  // envelopes + E_r + carry_r
  return k * steps * per_step + k * per_rep + n_days;
}

int ScheduleModel::expected_cons(int k, int steps, int n_days, bool degradation,
                                 bool thermal, bool safety) {
  int eq_per_step = 4;  // H2, N2, O2 closure, SOC
  if (thermal) ++eq_per_step;
  if (degradation) ++eq_per_step;
  int ineq_per_step = 6;  // liq3, liq4, deliver, direct, min-dev, max-dev
  if (safety) ++ineq_per_step;
  const int rep_eq = degradation ? 2 : 0;  // E_r and carry_r definitions
  return k * steps * (eq_per_step + ineq_per_step) + k * rep_eq + n_days /*carry+wrap*/ +
         2 * n_days /*caps*/;
}

double ScheduleModel::max_daily_production_kg() const {
  const auto& m = model_;
  const double i = m.bounds.i_max;
  const double gen = balances::h2_generation(i, m.geometry);
  const double gross =
      balances::crossover_gross(i, m.balance.p_cathode_bar, m.balance.p_anode_bar,
                                m.geometry, m.balance.crossover_coeff_per_bar);
  return (gen - gross) * 86400.0 * constants::kMolarMassH2;
}

void ScheduleModel::build() {
  problem_ = std::make_unique<nlp::Problem>();
  auto& p = *problem_;
  const auto& m = model_;
  const bool deg = m.degradation_enabled;
  const bool thermal = m.bounds.thermal_enabled;
  const bool safety = m.bounds.safety_enabled;
  const int S = steps_;
  const int K = days_.k;
  const double dt_s = m.dt_seconds();
  const double dt_h = m.dt_hours;
  per_step_vars_ = deg ? 11 : 10;
  per_rep_extra_ = deg ? 4 : 2;

  // --- Scales -------------------------------------------------------------
  const double flow_scale = std::max(1e-3, balances::h2_generation(1.0, m.geometry));
  const double t_mid = thermal ? 0.5 * (m.bounds.t_min_k + m.bounds.t_max_k)
                               : m.bounds.t_fixed_k;
  const double n_tot_typ = schedmodel::anode_gas_moles(t_mid, m);
  const double n_dry_max = schedmodel::anode_dry_moles(
      thermal ? m.bounds.t_min_k : m.bounds.t_fixed_k, m);
  const double y_vap_max = schedmodel::anode_vapor_fraction(
      thermal ? m.bounds.t_max_k : m.bounds.t_fixed_k, m);
  const double o2_max = 0.5 * balances::h2_generation(m.bounds.i_max, m.geometry);
  const double g3_ub =
      3.0 * (o2_max + m.bounds.purge_max + 0.1 * flow_scale) / (1.0 - y_vap_max);
  // Zero capacity would give the storage variables coincident bounds; the
  // capacity constraint rows keep the exact value, only the boxes get a floor.
  const double cap_bound = std::max(capacity_mol_, 1e-6);
  const double soc_scale = std::max(1.0, cap_bound / 4.0);
  const double deg_ub =
      2.0 * degradation::rate_v_per_h(m.bounds.i_max, m.degradation) * 24.0;
  const double demand = m.demand_mol_s();
  const double q_ub = std::max(2.0 * demand, 0.1 * flow_scale);
  const double c_ub = balances::h2_generation(m.bounds.i_max, m.geometry);

  const double comp_w_per_mol =
      m.opcost.compressor.work_j_per_mol(m.balance.p_cathode_bar);

  // Without the energy balance the water feed has no remaining role; pin it
  // high enough that the anode liquid outflow stays positive at any current.
  double w_pin = 0.0;
  if (!thermal) {
    const double imax = m.bounds.i_max;
    w_pin = 1.5 * (y_vap_max * g3_ub + schedmodel::drag_flux(imax, t_mid, m) +
                   balances::h2_generation(imax, m.geometry));
    w_pin = std::min(w_pin, m.bounds.water_in_max);
  }

  // Price lookup, $/Wh at step t of rep day r.
  auto price_wh = [&](int r, int t) {
    return days_.price(r, (t + 1.0) * dt_h - 1e-9) * 1e-6;
  };

  double mean_abs_p = 0;
  for (int r = 0; r < K; ++r)
    for (int t = 0; t < S; ++t) mean_abs_p += std::abs(price_wh(r, t));
  mean_abs_p /= (K * S);
  const double stack_amps = m.geometry.total_area_cm2();  // amps at 1 A/cm2
  const double e_scale = std::max(1.0, mean_abs_p * stack_amps * 24.0);
  const double e_ub = 10.0 * std::max(1.0, mean_abs_p * stack_amps * m.bounds.i_max * 24.0);

  // --- Variables ----------------------------------------------------------
  // Pinned variables (fixed temperature and, without the energy balance,
  // the water feed) use coincident bounds; the solver treats them as
  // parameters.
  const double t_lo = thermal ? m.bounds.t_min_k : m.bounds.t_fixed_k;
  const double t_hi = thermal ? m.bounds.t_max_k : m.bounds.t_fixed_k;
  for (int r = 0; r < K; ++r) {
    for (int t = 0; t < S; ++t) {
      const std::string suffix = "_" + std::to_string(r) + "_" + std::to_string(t);
      p.add_var("i" + suffix, m.bounds.i_min, m.bounds.i_max, 1.0, 1.0);
      p.add_var("T" + suffix, t_lo, t_hi, t_mid, 100.0);
      if (thermal) {
        p.add_var("win" + suffix, 0.0, m.bounds.water_in_max, flow_scale,
                  std::max(1.0, 10.0 * flow_scale));
      } else {
        p.add_var("win" + suffix, w_pin, w_pin, w_pin,
                  std::max(1.0, 10.0 * flow_scale));
      }
      p.add_var("g3" + suffix, 0.0, g3_ub, 0.5 * flow_scale,
                std::max(1e-3, 0.6 * flow_scale));
      p.add_var("nh2" + suffix, 0.0, n_dry_max, 1e-4 * n_tot_typ,
                std::max(1e-9, 0.05 * n_tot_typ));
      p.add_var("nn2" + suffix, 0.0, n_dry_max, 1e-4 * n_tot_typ,
                std::max(1e-9, 0.05 * n_tot_typ));
      p.add_var("soc" + suffix, -cap_bound, cap_bound, 0.0, soc_scale);
      if (deg) p.add_var("deg" + suffix, 0.0, deg_ub, 1e-5, 1e-3);
      p.add_var("chg" + suffix, 0.0, c_ub, 0.0, std::max(1e-3, flow_scale));
      p.add_var("dis" + suffix, 0.0, q_ub, 0.0, std::max(1e-3, flow_scale));
      p.add_var("purge" + suffix, 0.0, m.bounds.purge_max, 0.0, 1.0);
    }
  }
  rep_extra_offset_ = p.n_vars();
  // The deviation envelopes carry a vanishing tie-break cost pulling them
  // onto the actual extremes; otherwise they are dual-degenerate whenever the
  // capacity constraints are slack.
  const double env_eps =
      1e-9 * std::max(1.0, mean_abs_p * stack_amps * m.bounds.i_max * 8760.0) /
      soc_scale;
  double k_coeff_sum_max = 0.0;
  for (int r = 0; r < K; ++r) {
    double sum = 0;
    for (int r2 = 0; r2 < K; ++r2) sum += k_coeff_[r][r2];
    k_coeff_sum_max = std::max(k_coeff_sum_max, sum);
  }
  const double carry_ub = std::max(1e-9, k_coeff_sum_max * deg_ub);
  for (int r = 0; r < K; ++r) {
    const int vm = p.add_var("mdev_" + std::to_string(r), -cap_bound, 0.0, 0.0, soc_scale);
    const int vM = p.add_var("Mdev_" + std::to_string(r), 0.0, cap_bound, 0.0, soc_scale);
    p.add_objective(make_linear({vm, vM}, {-env_eps, env_eps}));
    if (deg) {
      p.add_var("epc_" + std::to_string(r), -e_ub, e_ub, 0.0, e_scale);
      // Aggregated degradation carried into days of profile r over the year,
      // weighted by the day-pair counts. Keeping this as a variable leaves
      // the objective's bilinear terms with unit coefficients.
      p.add_var("carry_" + std::to_string(r), 0.0, carry_ub, 0.0,
                std::max(1e-9, 0.05 * carry_ub));
    }
  }
  day_offset_ = p.n_vars();
  for (int d = 0; d < days_.n_days; ++d)
    p.add_var("day_" + std::to_string(d), 0.0, cap_bound, 0.5 * capacity_mol_,
              soc_scale);

  // --- Per-step constraints and objective ---------------------------------
  const PlantModel* mp = &model_;
  for (int r = 0; r < K; ++r) {
    for (int t = 0; t < S; ++t) {
      const int tp = (t + S - 1) % S;  // periodic within the day
      const int vi = var(r, t, Var::kCurrent);
      const int vT = var(r, t, Var::kTemperature);
      const int vTp = var(r, tp, Var::kTemperature);
      const int vW = var(r, t, Var::kWaterIn);
      const int vG = var(r, t, Var::kGas3);
      const int vH = var(r, t, Var::kNH2);
      const int vHp = var(r, tp, Var::kNH2);
      const int vN = var(r, t, Var::kNN2);
      const int vNp = var(r, tp, Var::kNN2);
      const int vS = var(r, t, Var::kSocDev);
      const int vC = var(r, t, Var::kCharge);
      const int vQ = var(r, t, Var::kDischarge);
      const int vU = var(r, t, Var::kPurge);

      if (thermal) {
        if (deg && m.thermal_voltage_mean_degradation) {
          // Heat generation sees the year-mean carried degradation, a linear
          // combination of the end-of-day deltas of every rep day.
          std::vector<int> tv{vT, vTp, vi, vW, vG, vH, vN};
          for (int r2 = 0; r2 < K; ++r2) tv.push_back(var(r2, S - 1, Var::kDeg));
          const std::vector<double> carry = mean_carry_coeff_;
          p.add_eq(make_term(std::move(tv),
                             [mp, dt_s, carry]<class X>(std::span<const X> x) -> X {
                               X extra = 0.0;
                               for (std::size_t r2 = 0; r2 < carry.size(); ++r2)
                                 extra = extra + carry[r2] * x[7 + r2];
                               return schedmodel::thermal_residual(
                                   x[0], x[1], x[2], x[3], x[4], x[5], x[6], extra,
                                   dt_s, *mp);
                             }));
        } else {
          // x = (T, Tprev, i, win, g3, nh2, nn2)
          p.add_eq(make_term({vT, vTp, vi, vW, vG, vH, vN},
                             [mp, dt_s]<class X>(std::span<const X> x) -> X {
                               return schedmodel::thermal_residual(
                                   x[0], x[1], x[2], x[3], x[4], x[5], x[6], X(0.0),
                                   dt_s, *mp);
                             }));
        }
      }
      // x = (nh2, nh2prev, i, g3, T)
      p.add_eq(make_term({vH, vHp, vi, vG, vT},
                         [mp, dt_s]<class X>(std::span<const X> x) -> X {
                           return schedmodel::anode_h2_residual(x[0], x[1], x[2],
                                                                x[3], x[4], dt_s, *mp);
                         }));
      // x = (nn2, nn2prev, purge, g3, T)
      p.add_eq(make_term({vN, vNp, vU, vG, vT},
                         [mp, dt_s]<class X>(std::span<const X> x) -> X {
                           return schedmodel::anode_n2_residual(x[0], x[1], x[2],
                                                                x[3], x[4], dt_s, *mp);
                         }));
      // x = (T, Tprev, nh2, nh2prev, nn2, nn2prev, i, g3)
      p.add_eq(make_term({vT, vTp, vH, vHp, vN, vNp, vi, vG},
                         [mp, dt_s]<class X>(std::span<const X> x) -> X {
                           return schedmodel::anode_o2_residual(
                               x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7], dt_s,
                               *mp);
                         }));
      if (deg) {
        const int vD = var(r, t, Var::kDeg);
        if (t == 0) {
          // Fresh at the start of every representative day.
          p.add_eq(make_term({vD, vi},
                             [mp, dt_h]<class X>(std::span<const X> x) -> X {
                               return x[0] - dt_h * degradation::rate_smooth_v_per_h(
                                                        x[1], mp->degradation);
                             }));
        } else {
          const int vDp = var(r, t - 1, Var::kDeg);
          p.add_eq(make_term({vD, vDp, vi},
                             [mp, dt_h]<class X>(std::span<const X> x) -> X {
                               return x[0] - x[1] -
                                      dt_h * degradation::rate_smooth_v_per_h(
                                                 x[2], mp->degradation);
                             }));
        }
      }
      // Intra-day storage, linear: soc_t - soc_{t-1} - dt*(c - q) = 0.
      if (t == 0) {
        p.add_eq(make_linear({vS, vC, vQ}, {1.0, -dt_s, dt_s}));
      } else {
        p.add_eq(make_linear({vS, var(r, t - 1, Var::kSocDev), vC, vQ},
                             {1.0, -1.0, -dt_s, dt_s}));
      }

      if (safety) {
        const double ymax = m.bounds.y_h2_anode_max;
        // y_h2(N, T) <= ymax
        p.add_constraint(-nlp::kInf,
                         make_term({vH, vT},
                                   [mp, ymax]<class X>(std::span<const X> x) -> X {
                                     return schedmodel::anode_fraction(x[0], x[1], *mp) -
                                            ymax;
                                   }),
                         0.0);
      }
      // Liquid water out of the anode stays nonnegative: x = (i, T, win, g3).
      p.add_constraint(0.0,
                       make_term({vi, vT, vW, vG},
                                 [mp]<class X>(std::span<const X> x) -> X {
                                   return schedmodel::anode_liquid_out(x[0], x[1], x[2],
                                                                       x[3], *mp);
                                 }),
                       nlp::kInf);
      // Liquid water out of the cathode: x = (i, T, Tprev).
      p.add_constraint(0.0,
                       make_term({vi, vT, vTp},
                                 [mp, dt_s]<class X>(std::span<const X> x) -> X {
                                   return schedmodel::cathode_liquid_out(x[0], x[1],
                                                                         x[2], dt_s, *mp);
                                 }),
                       nlp::kInf);
      // Baseload delivery: h2_prod - c + q >= demand. x = (i, T, Tprev, c, q).
      p.add_constraint(demand,
                       make_term({vi, vT, vTp, vC, vQ},
                                 [mp, dt_s]<class X>(std::span<const X> x) -> X {
                                   return schedmodel::h2_product(x[0], x[1], x[2], dt_s,
                                                                 *mp) -
                                          x[3] + x[4];
                                 }),
                       nlp::kInf);
      // Direct split nonnegative: h2_prod - c >= 0.
      p.add_constraint(0.0,
                       make_term({vi, vT, vTp, vC},
                                 [mp, dt_s]<class X>(std::span<const X> x) -> X {
                                   return schedmodel::h2_product(x[0], x[1], x[2], dt_s,
                                                                 *mp) -
                                          x[3];
                                 }),
                       nlp::kInf);
      // Envelope of the intra-day deviation for the real-day cap constraints.
      p.add_constraint(-nlp::kInf, make_linear({var_min_dev(r), vS}, {1.0, -1.0}), 0.0);
      p.add_constraint(-nlp::kInf, make_linear({vS, var_max_dev(r)}, {1.0, -1.0}), 0.0);

      // Step cost: x = (i, T, Tprev, [deg,] g3, purge, charge).
      const double w_r = static_cast<double>(days_.weights[r]);
      const double p_wh = price_wh(r, t);
      const double p_water = m.opcost.water_price_usd_per_mol();
      const double p_n2 = m.opcost.n2_price_usd_per_mol();
      if (deg) {
        const int vD = var(r, t, Var::kDeg);
        p.add_objective(make_term(
            {vi, vT, vTp, vD, vG, vU, vC},
            [mp, dt_s, dt_h, w_r, p_wh, p_water, p_n2,
             comp_w_per_mol]<class X>(std::span<const X> x) -> X {
              const X v = electrochem::undegraded_voltage_t(x[0], x[1], mp->electrochem) +
                          x[3];
              const X prod = schedmodel::h2_product(x[0], x[1], x[2], dt_s, *mp);
              const X power_w = schedmodel::stack_power_w(x[0], v, *mp) +
                                schedmodel::bop_power_w(prod, *mp) +
                                x[6] * comp_w_per_mol;
              const X vap3 = schedmodel::anode_vapor_fraction(x[1], *mp) * x[4];
              const X vap4 = schedmodel::cathode_vapor_out(x[0], x[1], x[2], dt_s, *mp);
              const X consum = balances::h2_generation(x[0], mp->geometry);
              return w_r * (p_wh * power_w * dt_h +
                            (consum + vap3 + vap4) * (dt_s * p_water) +
                            x[5] * (dt_s * p_n2));
            }));
      } else {
        p.add_objective(make_term(
            {vi, vT, vTp, vG, vU, vC},
            [mp, dt_s, dt_h, w_r, p_wh, p_water, p_n2,
             comp_w_per_mol]<class X>(std::span<const X> x) -> X {
              const X v = electrochem::undegraded_voltage_t(x[0], x[1], mp->electrochem);
              const X prod = schedmodel::h2_product(x[0], x[1], x[2], dt_s, *mp);
              const X power_w = schedmodel::stack_power_w(x[0], v, *mp) +
                                schedmodel::bop_power_w(prod, *mp) +
                                x[5] * comp_w_per_mol;
              const X vap3 = schedmodel::anode_vapor_fraction(x[1], *mp) * x[3];
              const X vap4 = schedmodel::cathode_vapor_out(x[0], x[1], x[2], dt_s, *mp);
              const X consum = balances::h2_generation(x[0], mp->geometry);
              return w_r * (p_wh * power_w * dt_h +
                            (consum + vap3 + vap4) * (dt_s * p_water) +
                            x[4] * (dt_s * p_n2));
            }));
      }
    }
  }

  // --- Per-rep-day extras ---------------------------------------------------
  if (deg) {
    for (int r = 0; r < K; ++r) {
      // E_r = sum_t p_t * I_t * dt, $ per volt of carried degradation.
      std::vector<int> vars{var_price_charge(r)};
      std::vector<double> coeffs{1.0};
      for (int t = 0; t < S; ++t) {
        vars.push_back(var(r, t, Var::kCurrent));
        coeffs.push_back(-price_wh(r, t) * stack_amps * dt_h);
      }
      p.add_eq(make_linear(std::move(vars), std::move(coeffs)));
      // carry_r = sum_{r2} K[r][r2] * Delta_{r2} (linear), then the
      // cumulative-degradation electricity cost is E_r * carry_r.
      std::vector<int> cv{var_carry(r)};
      std::vector<double> cc{1.0};
      for (int r2 = 0; r2 < K; ++r2) {
        if (k_coeff_[r][r2] == 0.0) continue;
        cv.push_back(var(r2, S - 1, Var::kDeg));
        cc.push_back(-k_coeff_[r][r2]);
      }
      p.add_eq(make_linear(std::move(cv), std::move(cc)));
      p.add_objective(make_term({var_price_charge(r), var_carry(r)},
                                []<class X>(std::span<const X> x) -> X {
                                  return x[0] * x[1];
                                }));
    }
  }

  // --- Inter-day storage superposition --------------------------------------
  const int n_days = days_.n_days;
  for (int d = 0; d + 1 < n_days; ++d) {
    p.add_eq(make_linear(
        {var_day_start(d + 1), var_day_start(d), var(days_.mapping[d], S - 1, Var::kSocDev)},
        {1.0, -1.0, -1.0}));
  }
  p.add_eq(make_linear({var_day_start(0), var_day_start(n_days - 1),
                        var(days_.mapping[n_days - 1], S - 1, Var::kSocDev)},
                       {1.0, -1.0, -1.0}));
  for (int d = 0; d < n_days; ++d) {
    const int r = days_.mapping[d];
    p.add_constraint(0.0, make_linear({var_day_start(d), var_min_dev(r)}, {1.0, 1.0}),
                     nlp::kInf);
    p.add_constraint(-nlp::kInf,
                     make_linear({var_day_start(d), var_max_dev(r)}, {1.0, 1.0}),
                     capacity_mol_);
  }
}

}  // namespace pemopt
