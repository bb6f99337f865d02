#pragma once

namespace pemopt {

// Physical constants shared across the model.
namespace constants {

inline constexpr double kFaraday = 96485.0;     // C/mol
inline constexpr double kGasConstant = 8.314;   // J/(mol K)
inline constexpr double kTRefK = 298.15;        // K, thermo/kinetics reference
inline constexpr double kTAmbientK = 298.15;    // K, inlet water and surroundings
inline constexpr double kPRefBar = 1.0;         // bar, Nernst reference pressure
inline constexpr double kThermoneutralV = 1.48; // V, liquid-water HHV basis

inline constexpr double kMolarMassH2 = 2.01588e-3;   // kg/mol
inline constexpr double kMolarMassH2O = 18.0153e-3;  // kg/mol
inline constexpr double kMolarMassN2 = 28.0134e-3;   // kg/mol

inline constexpr double kHoursPerYear = 8760.0;
inline constexpr int kHoursPerDay = 24;

// 1000 US gallons of water in mol (3785.41 kg / molar mass).
inline constexpr double kMolPerKgal = 3785.411784 / kMolarMassH2O;

}  // namespace constants

}  // namespace pemopt
