#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "pemopt/constants.hpp"

namespace pemopt::thermo {

// NIST-format Shomate coefficients. t = T/1000:
//   H(T) - H(298.15) [kJ/mol] = A t + B t^2/2 + C t^3/3 + D t^4/4 - E/t + F - Hc
//   S(T) [J/(mol K)]          = A ln t + B t + C t^2/2 + D t^3/3 - E/(2 t^2) + G
struct ShomateCoeffs {
  double a, b, c, d, e, f, g, hc;
  double t_min_k, t_max_k;
  double hf298;  // J/mol, standard formation enthalpy
};

// One fixed coefficient set per species/phase. The same table is shipped as
// data/shomate.json; tests assert the two stay in sync.
inline constexpr ShomateCoeffs kWaterLiquid{
    -203.6060, 1523.290,  -3196.413, 2474.455, 3.855326,
    -256.5478, -488.7163, -285.8304, 273.15,   500.0,
    -285830.0};
inline constexpr ShomateCoeffs kWaterVapor{
    30.09200, 6.832514, 6.793435, -2.534480, 0.082139,
    -250.8810, 223.3967, -241.8264, 273.15,  1700.0,
    -241826.0};
inline constexpr ShomateCoeffs kHydrogen{
    33.066178, -11.363417, 11.432816, -2.772874, -0.158558,
    -9.980797, 172.707974, 0.0,       250.0,     1000.0,
    0.0};
inline constexpr ShomateCoeffs kOxygen{
    31.32234, -20.23531, 57.86644, -36.50624, -0.007374,
    -8.903471, 246.7945, 0.0,      100.0,     700.0,
    0.0};
inline constexpr ShomateCoeffs kNitrogen{
    28.98641, 1.853978, -9.647459, 16.63537, 0.000117,
    -8.671914, 226.4168, 0.0,      100.0,    500.0,
    0.0};

inline constexpr double kHvap298 = kWaterVapor.hf298 - kWaterLiquid.hf298;  // 44004 J/mol

// Sensible enthalpy H(T) - H(298.15) in J/mol.
template <class S>
S enthalpy_sensible(const ShomateCoeffs& sp, const S& temperature_k) {
  const S t = temperature_k * 1e-3;
  const S t2 = t * t;
  const S h_kj = sp.a * t + sp.b * t2 * 0.5 + sp.c * t2 * t / 3.0 +
                 sp.d * t2 * t2 * 0.25 - sp.e / t + sp.f - sp.hc;
  return h_kj * 1e3;
}

// Absolute entropy in J/(mol K).
template <class S>
S entropy(const ShomateCoeffs& sp, const S& temperature_k) {
  using std::log;
  const S t = temperature_k * 1e-3;
  const S t2 = t * t;
  return sp.a * log(t) + sp.b * t + sp.c * t2 * 0.5 + sp.d * t2 * t / 3.0 -
         sp.e / (2.0 * t2) + sp.g;
}

template <class S>
S heat_capacity(const ShomateCoeffs& sp, const S& temperature_k) {
  const S t = temperature_k * 1e-3;
  const S t2 = t * t;
  return sp.a + sp.b * t + sp.c * t2 + sp.d * t2 * t + sp.e / t2;
}

// Reaction H2O(l) -> H2 + 1/2 O2.
template <class S>
S reaction_enthalpy(const S& temperature_k) {
  return (kHydrogen.hf298 + enthalpy_sensible(kHydrogen, temperature_k)) +
         0.5 * (kOxygen.hf298 + enthalpy_sensible(kOxygen, temperature_k)) -
         (kWaterLiquid.hf298 + enthalpy_sensible(kWaterLiquid, temperature_k));
}

template <class S>
S reaction_entropy(const S& temperature_k) {
  return entropy(kHydrogen, temperature_k) +
         0.5 * entropy(kOxygen, temperature_k) -
         entropy(kWaterLiquid, temperature_k);
}

template <class S>
S reaction_gibbs(const S& temperature_k) {
  return reaction_enthalpy(temperature_k) -
         temperature_k * reaction_entropy(temperature_k);
}

// Antoine correlation for water, 1-100 degC fit, returned in bar.
template <class S>
S water_psat_bar(const S& temperature_k) {
  using std::exp;
  const S t_c = temperature_k - 273.15;
  const S log10_mmhg = 8.07131 - 1730.63 / (233.426 + t_c);
  return exp(2.302585092994046 * log10_mmhg) * 1.333224e-3;
}

inline void check_thermo_range(double temperature_k, const std::string& where) {
  if (!(temperature_k >= 273.15 && temperature_k <= 373.15)) {
    throw std::domain_error(where + ": temperature " +
                            std::to_string(temperature_k) +
                            " K outside correlation validity (273.15-373.15 K)");
  }
}

}  // namespace pemopt::thermo
