#pragma once

#include "pemopt/schedule/model.hpp"

// Per-step flow algebra shared by the NLP transcription and the forward
// simulator. Everything is templated on the scalar so the same expressions
// produce values and exact derivatives.

namespace pemopt::schedmodel {

template <class S>
S anode_vapor_fraction(const S& t_k, const PlantModel& m) {
  return thermo::water_psat_bar(t_k) / m.balance.p_anode_bar;
}

template <class S>
S cathode_vapor_fraction(const S& t_k, const PlantModel& m) {
  return thermo::water_psat_bar(t_k) / m.balance.p_cathode_bar;
}

// Total wet moles in the anode headspace at temperature T.
template <class S>
S anode_gas_moles(const S& t_k, const PlantModel& m) {
  return balances::headspace_moles(m.balance.p_anode_bar,
                                   m.geometry.electrode_volume_m3(), t_k);
}

// Dry (non-vapor) moles in the anode headspace at temperature T.
template <class S>
S anode_dry_moles(const S& t_k, const PlantModel& m) {
  return (1.0 - anode_vapor_fraction(t_k, m)) * anode_gas_moles(t_k, m);
}

// Wet mole fraction of a species holding n mol in the anode headspace.
template <class S>
S anode_fraction(const S& n_mol, const S& t_k, const PlantModel& m) {
  return n_mol / anode_gas_moles(t_k, m);
}

// H2 holdup in the cathode headspace; composition there is H2 + vapor only,
// so this is a pure function of temperature.
template <class S>
S cathode_h2_moles(const S& t_k, const PlantModel& m) {
  return (1.0 - cathode_vapor_fraction(t_k, m)) *
         balances::headspace_moles(m.balance.p_cathode_bar,
                                   m.geometry.electrode_volume_m3(), t_k);
}

// Dried H2 product flow (stream 6): generation minus gross crossover minus
// cathode holdup accumulation over the step.
template <class S>
S h2_product(const S& i, const S& t_k, const S& t_prev_k, double dt_s,
             const PlantModel& m) {
  const S gen = balances::h2_generation(i, m.geometry);
  const S gross = balances::crossover_gross(i, m.balance.p_cathode_bar,
                                            m.balance.p_anode_bar, m.geometry,
                                            m.balance.crossover_coeff_per_bar);
  const S dhold = (cathode_h2_moles(t_k, m) - cathode_h2_moles(t_prev_k, m)) / dt_s;
  return gen - gross - dhold;
}

template <class S>
S drag_flux(const S& i, const S& t_k, const PlantModel& m) {
  const S ng = balances::drag_coefficient(i, t_k, m.balance.p_cathode_bar,
                                          m.balance.drag_temperature_celsius);
  return balances::drag_flux(i, ng, m.geometry);
}

// Liquid water leaving the anode; the algebraic water balance solved for
// stream 3's liquid part.
template <class S>
S anode_liquid_out(const S& i, const S& t_k, const S& water_in, const S& gas3,
                   const PlantModel& m) {
  const S vap3 = anode_vapor_fraction(t_k, m) * gas3;
  const S consum = balances::h2_generation(i, m.geometry);
  const S gross = balances::crossover_gross(i, m.balance.p_cathode_bar,
                                            m.balance.p_anode_bar, m.geometry,
                                            m.balance.crossover_coeff_per_bar);
  const S recomb_water = gross * m.balance.recombination_conversion;
  return water_in - vap3 - drag_flux(i, t_k, m) - consum + recomb_water;
}

// Cathode vapor flow carried with the product (stream 4 gas's vapor part).
template <class S>
S cathode_vapor_out(const S& i, const S& t_k, const S& t_prev_k, double dt_s,
                    const PlantModel& m) {
  const S yv = cathode_vapor_fraction(t_k, m);
  return h2_product(i, t_k, t_prev_k, dt_s, m) * yv / (1.0 - yv);
}

// Liquid water leaving the cathode.
template <class S>
S cathode_liquid_out(const S& i, const S& t_k, const S& t_prev_k, double dt_s,
                     const PlantModel& m) {
  return drag_flux(i, t_k, m) - cathode_vapor_out(i, t_k, t_prev_k, dt_s, m);
}

// Implicit-Euler residual of the anode H2 holdup in flow units:
// (N - N_prev)/dt - rate. The holdup time constants are seconds against
// quarter-hour steps, so the flow-unit form keeps the rows well conditioned.
template <class S>
S anode_h2_residual(const S& n_h2, const S& n_h2_prev, const S& i, const S& gas3,
                    const S& t_k, double dt_s, const PlantModel& m) {
  const S gross = balances::crossover_gross(i, m.balance.p_cathode_bar,
                                            m.balance.p_anode_bar, m.geometry,
                                            m.balance.crossover_coeff_per_bar);
  const S to_anode = gross * (1.0 - m.balance.recombination_conversion);
  const S out = anode_fraction(n_h2, t_k, m) * gas3;
  return (n_h2 - n_h2_prev) / dt_s - (to_anode - out);
}

template <class S>
S anode_n2_residual(const S& n_n2, const S& n_n2_prev, const S& purge, const S& gas3,
                    const S& t_k, double dt_s, const PlantModel& m) {
  const S out = anode_fraction(n_n2, t_k, m) * gas3;
  return (n_n2 - n_n2_prev) / dt_s - (purge - out);
}

// Implicit-Euler residual of the anode O2 holdup with the O2 moles eliminated
// through the fixed-pressure headspace closure: N_O2 = dry(T) - N_H2 - N_N2.
template <class S>
S anode_o2_residual(const S& t_k, const S& t_prev_k, const S& n_h2, const S& n_h2_prev,
                    const S& n_n2, const S& n_n2_prev, const S& i, const S& gas3,
                    double dt_s, const PlantModel& m) {
  const S n_o2 = anode_dry_moles(t_k, m) - n_h2 - n_n2;
  const S n_o2_prev = anode_dry_moles(t_prev_k, m) - n_h2_prev - n_n2_prev;
  const S gen = 0.5 * balances::h2_generation(i, m.geometry);
  const S gross = balances::crossover_gross(i, m.balance.p_cathode_bar,
                                            m.balance.p_anode_bar, m.geometry,
                                            m.balance.crossover_coeff_per_bar);
  const S recomb_o2 = 0.5 * gross * m.balance.recombination_conversion;
  const S out = anode_fraction(n_o2, t_k, m) * gas3;
  return (n_o2 - n_o2_prev) / dt_s - (gen - out - recomb_o2);
}

// Implicit-Euler residual of the lumped thermal state. extra_deg_v is added to
// the undegraded voltage inside the heat-generation term.
template <class S>
S thermal_residual(const S& t_k, const S& t_prev_k, const S& i, const S& water_in,
                   const S& gas3, const S& n_h2, const S& n_n2, const S& extra_deg_v,
                   double dt_s, const PlantModel& m) {
  const S y_vap = anode_vapor_fraction(t_k, m);
  const S vap3 = y_vap * gas3;
  const S liq3 = anode_liquid_out(i, t_k, water_in, gas3, m);
  const S n_o2 = anode_dry_moles(t_k, m) - n_h2 - n_n2;
  const S o2_out = anode_fraction(n_o2, t_k, m) * gas3;
  const S h2_an_out = anode_fraction(n_h2, t_k, m) * gas3;
  const S n2_out = anode_fraction(n_n2, t_k, m) * gas3;
  const S prod = h2_product(i, t_k, t_prev_k, dt_s, m);
  const S vap4 = cathode_vapor_out(i, t_k, t_prev_k, dt_s, m);
  const S liq4 = drag_flux(i, t_k, m) - vap4;
  const S v_total = electrochem::undegraded_voltage_t(i, t_k, m.electrochem) + extra_deg_v;
  const S rhs = balances::energy_rhs(t_k, liq3 + liq4, vap3 + vap4, o2_out,
                                     h2_an_out + prod, n2_out, v_total, i,
                                     m.geometry, m.balance.t_ambient_k);
  return (t_k - t_prev_k) - dt_s * rhs;
}

// Stack + BoP + compressor electric power, W.
template <class S>
S stack_power_w(const S& i, const S& v_total, const PlantModel& m) {
  return m.geometry.n_cells * i * m.geometry.cell_area_cm2 * v_total;
}

template <class S>
S bop_power_w(const S& h2_prod_mol_s, const PlantModel& m) {
  // kWh/kg * kg/h == kW
  const S kg_per_h = h2_prod_mol_s * (3600.0 * constants::kMolarMassH2);
  return m.opcost.bop_kwh_per_kg * kg_per_h * 1000.0;
}

}  // namespace pemopt::schedmodel
