#include <doctest.h>

#include "pemopt/electrochem.hpp"

using namespace pemopt;

namespace {
const ElectrochemParams kDefault{};
}

TEST_CASE("standard-state open circuit voltage") {
  ElectrochemParams p;
  p.p_cathode = 1.0;
  p.p_anode = 1.0;
  CHECK(open_circuit_voltage({0.0, 298.15}, p) == doctest::Approx(1.229).epsilon(0.005 / 1.229));
}

TEST_CASE("nernst shift at 30 bar cathode") {
  // 1.229 + (R*298.15/2F) ln 30
  CHECK(open_circuit_voltage({0.0, 298.15}, kDefault) == doctest::Approx(1.2727).epsilon(1e-3));
}

TEST_CASE("open circuit voltage decreases with temperature") {
  for (double t = 333.15; t <= 352.15; t += 1.0) {
    const double dv = open_circuit_voltage({0, t + 0.5}, kDefault) -
                      open_circuit_voltage({0, t - 0.5}, kDefault);
    CHECK(dv < 0.0);
  }
}

TEST_CASE("open circuit voltage rejects out-of-range temperature") {
  CHECK_THROWS_AS(open_circuit_voltage({0.0, 250.0}, kDefault), std::domain_error);
  CHECK_THROWS_AS(open_circuit_voltage({0.0, 400.0}, kDefault), std::domain_error);
}

TEST_CASE("activation overpotential basics") {
  CHECK(activation_overpotential({0.0, 333.15}, kDefault) == 0.0);
  double prev = 0.0;
  for (double i = 0.1; i <= 4.0; i += 0.1) {
    const double v = activation_overpotential({i, 333.15}, kDefault);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(activation_overpotential({-0.1, 333.15}, kDefault), std::domain_error);
}

TEST_CASE("ohmic overpotential at the reference hydration point") {
  ElectrochemParams p;
  CHECK(ohmic_overpotential({0.0, 303.0}, p) == 0.0);
  // sigma(21, 303 K) = 0.00514*21 - 0.00326 = 0.10468 S/cm exactly,
  // V_ohm(1 A/cm2) = 0.0175/0.10468.
  CHECK(ohmic_overpotential({1.0, 303.0}, p) == doctest::Approx(0.0175 / 0.10468).epsilon(1e-12));
  // Conductivity improves with temperature.
  CHECK(ohmic_overpotential({1.0, 343.0}, p) < ohmic_overpotential({1.0, 323.0}, p));
}

TEST_CASE("polarization anchors at 1 A/cm2") {
  CHECK(total_voltage({1.0, 333.15}, 0.0, kDefault) == doctest::Approx(1.78).epsilon(0.02 / 1.78));
  CHECK(total_voltage({1.0, 353.15}, 0.0, kDefault) == doctest::Approx(1.70).epsilon(0.02 / 1.70));
  // Fit-condition sanity: 76 C, 1 A/cm2 lands between the two anchors.
  const double v76 = total_voltage({1.0, 349.15}, 0.0, kDefault);
  CHECK(v76 > 1.70);
  CHECK(v76 < 1.78);
}

TEST_CASE("degradation enters additively and exactly") {
  for (double i : {0.1, 1.0, 2.5, 4.0}) {
    for (double t : {333.15, 345.0, 353.15}) {
      const double base = total_voltage({i, t}, 0.0, kDefault);
      CHECK(total_voltage({i, t}, 0.3, kDefault) - base == doctest::Approx(0.3).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(total_voltage({1.0, 333.15}, -0.1, kDefault), std::domain_error);
}

TEST_CASE("polarization curve strictly increasing in current density") {
  for (double t : {333.15, 343.15, 353.15}) {
    double prev = -1.0;
    for (double i = 0.0; i <= 4.0; i += 0.05) {
      const double v = total_voltage({i, t}, 0.0, kDefault);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("total voltage decreases with temperature across the operating box") {
  // Finite differences on a >= 20 point grid, 0.5..4 A/cm2, 333..353 K.
  int points = 0;
  for (double i = 0.5; i <= 4.0; i += 0.5) {
    for (double t = 334.0; t <= 352.0; t += 4.0) {
      const double dv = total_voltage({i, t + 0.5}, 0.0, kDefault) -
                        total_voltage({i, t - 0.5}, 0.0, kDefault);
      CHECK(dv < 0.0);
      ++points;
    }
  }
  CHECK(points >= 20);
}

TEST_CASE("alpha sum invariant is enforced") {
  ElectrochemParams p;
  p.alpha_an = 1.2;
  p.alpha_cat = 0.9;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
