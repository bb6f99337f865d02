#pragma once

#include <cmath>
#include <stdexcept>

#include "pemopt/constants.hpp"
#include "pemopt/thermo.hpp"

namespace pemopt {

// Cell-level electrochemical parameters. Charge-transfer coefficients and the
// exchange-current temperature correction are fit/literature inputs, not
// derived here.
//
// Note on electrode assignment: the roughness-corrected reference exchange
// current densities ship with the small value (5e-12 A/cm2, gamma 1198)
// attached to the electrode carrying the large charge-transfer coefficient
// (1.28) and the large value (1e-3 A/cm2, gamma 286) attached to alpha 0.58.
// This pairing reproduces the reported polarization anchors (1.78 V at
// 1 A/cm2 / 60 C and 1.70 V at 80 C with a 30 bar cathode); the source
// material labels the two pairs inconsistently between its parameter table
// and its fit captions. Swapping the pairs between electrodes changes nothing
// in the total voltage because the two activation terms are summed.
struct ElectrochemParams {
  double alpha_an = 0.58;        // dimensionless
  double alpha_cat = 1.28;       // dimensionless
  double i0_an_ref = 1.0e-3;     // A/cm2 at t_ref, before roughness
  double i0_cat_ref = 5.0e-12;   // A/cm2 at t_ref, before roughness
  double gamma_an = 286.0;       // roughness factor
  double gamma_cat = 1198.0;     // roughness factor
  double activation_energy = 42.9e3;  // J/mol, calibrated to the anchors
  double membrane_thickness = 1.75e-2;  // cm
  double hydration_factor = 21.0;       // mol H2O / mol SO3
  double p_cathode = 30.0;  // bar, taken as P_H2 in the Nernst term
  double p_anode = 1.0;     // bar, taken as P_O2 in the Nernst term
  double t_ref = constants::kTRefK;         // K
  double faraday = constants::kFaraday;     // C/mol
  double gas_constant = constants::kGasConstant;  // J/(mol K)

  void validate() const {
    if (alpha_an + alpha_cat > 2.0 + 1e-12)
      throw std::invalid_argument("electrochem: alpha_an + alpha_cat must not exceed 2");
    if (!(i0_an_ref > 0) || !(i0_cat_ref > 0) || !(membrane_thickness > 0) ||
        !(p_cathode > 0) || !(p_anode > 0))
      throw std::invalid_argument(
          "electrochem: pressures, thickness and exchange currents must be positive");
  }
};

struct CellCondition {
  double current_density = 0.0;  // A/cm2
  double temperature = constants::kTRefK;  // K
};

namespace electrochem {

// Temperature- and roughness-corrected exchange current density, A/cm2.
template <class S>
S exchange_current(double i0_ref, double gamma, const S& temperature_k,
                   const ElectrochemParams& p) {
  using std::exp;
  const S arrhenius =
      exp(-(p.activation_energy / p.gas_constant) *
          (1.0 / temperature_k - 1.0 / p.t_ref));
  return gamma * i0_ref * arrhenius;
}

// Reversible potential at reference pressure, from Delta G(T) = Delta H - T Delta S.
template <class S>
S reversible_voltage(const S& temperature_k, const ElectrochemParams& p) {
  return thermo::reaction_gibbs(temperature_k) / (2.0 * p.faraday);
}

template <class S>
S open_circuit_voltage_t(const S& temperature_k, const ElectrochemParams& p) {
  using std::log;
  using std::sqrt;
  const S nernst = (p.gas_constant * temperature_k / (2.0 * p.faraday)) *
                   log((p.p_cathode / constants::kPRefBar) *
                       sqrt(p.p_anode / constants::kPRefBar));
  return reversible_voltage(temperature_k, p) + nernst;
}

template <class S>
S activation_overpotential_t(const S& current_density, const S& temperature_k,
                             const ElectrochemParams& p) {
  using std::asinh;
  const S i0_an = exchange_current(p.i0_an_ref, p.gamma_an, temperature_k, p);
  const S i0_cat = exchange_current(p.i0_cat_ref, p.gamma_cat, temperature_k, p);
  const S rt_f = p.gas_constant * temperature_k / p.faraday;
  return (rt_f / p.alpha_an) * asinh(current_density / (2.0 * i0_an)) +
         (rt_f / p.alpha_cat) * asinh(current_density / (2.0 * i0_cat));
}

// Membrane conductivity, S/cm, at fixed hydration.
template <class S>
S membrane_conductivity(const S& temperature_k, const ElectrochemParams& p) {
  using std::exp;
  return (0.00514 * p.hydration_factor - 0.00326) *
         exp(1268.0 * (1.0 / 303.0 - 1.0 / temperature_k));
}

template <class S>
S ohmic_overpotential_t(const S& current_density, const S& temperature_k,
                        const ElectrochemParams& p) {
  return p.membrane_thickness * current_density /
         membrane_conductivity(temperature_k, p);
}

template <class S>
S total_voltage_t(const S& current_density, const S& temperature_k,
                  const S& cumulative_degradation, const ElectrochemParams& p) {
  return open_circuit_voltage_t(temperature_k, p) +
         activation_overpotential_t(current_density, temperature_k, p) +
         ohmic_overpotential_t(current_density, temperature_k, p) +
         cumulative_degradation;
}

template <class S>
S undegraded_voltage_t(const S& current_density, const S& temperature_k,
                       const ElectrochemParams& p) {
  return open_circuit_voltage_t(temperature_k, p) +
         activation_overpotential_t(current_density, temperature_k, p) +
         ohmic_overpotential_t(current_density, temperature_k, p);
}

}  // namespace electrochem

inline double open_circuit_voltage(const CellCondition& cond,
                                   const ElectrochemParams& params) {
  thermo::check_thermo_range(cond.temperature, "open_circuit_voltage");
  return electrochem::open_circuit_voltage_t(cond.temperature, params);
}

inline double activation_overpotential(const CellCondition& cond,
                                       const ElectrochemParams& params) {
  if (cond.current_density < 0)
    throw std::domain_error("activation_overpotential: current density < 0");
  return electrochem::activation_overpotential_t(cond.current_density,
                                                 cond.temperature, params);
}

inline double ohmic_overpotential(const CellCondition& cond,
                                  const ElectrochemParams& params) {
  return electrochem::ohmic_overpotential_t(cond.current_density,
                                            cond.temperature, params);
}

inline double total_voltage(const CellCondition& cond,
                            double cumulative_degradation,
                            const ElectrochemParams& params) {
  if (cumulative_degradation < 0)
    throw std::domain_error("total_voltage: cumulative degradation < 0");
  thermo::check_thermo_range(cond.temperature, "total_voltage");
  return electrochem::total_voltage_t(cond.current_density, cond.temperature,
                                      cumulative_degradation, params);
}

}  // namespace pemopt
