#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pemopt/thermo.hpp"

using namespace pemopt;

TEST_CASE("shomate values reproduce standard-state data") {
  // Absolute entropies at 298.15 K, J/(mol K).
  CHECK(thermo::entropy(thermo::kHydrogen, 298.15) == doctest::Approx(130.68).epsilon(1e-3));
  CHECK(thermo::entropy(thermo::kOxygen, 298.15) == doctest::Approx(205.15).epsilon(1e-3));
  CHECK(thermo::entropy(thermo::kWaterLiquid, 298.15) == doctest::Approx(69.95).epsilon(2e-3));
  // Sensible enthalpy vanishes at the reference temperature.
  CHECK(std::abs(thermo::enthalpy_sensible(thermo::kHydrogen, 298.15)) < 5.0);
  CHECK(std::abs(thermo::enthalpy_sensible(thermo::kWaterLiquid, 298.15)) < 5.0);
}

TEST_CASE("reaction gibbs energy at standard state") {
  // Delta G of H2O(l) -> H2 + 1/2 O2 at 298.15 K is 237.1-237.2 kJ/mol.
  CHECK(thermo::reaction_gibbs(298.15) == doctest::Approx(237.15e3).epsilon(2e-3));
  // Negative temperature slope (Delta S > 0 for the splitting direction).
  CHECK(thermo::reaction_gibbs(350.0) < thermo::reaction_gibbs(300.0));
}

TEST_CASE("antoine vapor pressure of water") {
  CHECK(thermo::water_psat_bar(333.15) == doctest::Approx(0.1994).epsilon(5e-3));
  CHECK(thermo::water_psat_bar(353.15) == doctest::Approx(0.4739).epsilon(5e-3));
  CHECK(thermo::water_psat_bar(373.15) == doctest::Approx(1.0133).epsilon(1e-2));
}

TEST_CASE("liquid water heat capacity near 75 J/mol K") {
  CHECK(thermo::heat_capacity(thermo::kWaterLiquid, 330.0) ==
        doctest::Approx(75.5).epsilon(0.03));
}

TEST_CASE("shipped shomate data file matches built-in coefficients") {
  std::ifstream in(std::string(PEMOPT_SOURCE_DIR) + "/data/shomate.json");
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  const auto j = nlohmann::json::parse(ss.str());
  const auto check = [&](const char* key, const thermo::ShomateCoeffs& c) {
    const auto& s = j.at("species").at(key);
    CHECK(s.at("A").get<double>() == doctest::Approx(c.a));
    CHECK(s.at("B").get<double>() == doctest::Approx(c.b));
    CHECK(s.at("C").get<double>() == doctest::Approx(c.c));
    CHECK(s.at("D").get<double>() == doctest::Approx(c.d));
    CHECK(s.at("E").get<double>() == doctest::Approx(c.e));
    CHECK(s.at("F").get<double>() == doctest::Approx(c.f));
    CHECK(s.at("G").get<double>() == doctest::Approx(c.g));
    CHECK(s.at("H").get<double>() == doctest::Approx(c.hc));
    CHECK(s.at("hf298_j_per_mol").get<double>() == doctest::Approx(c.hf298));
  };
  check("H2O_liquid", thermo::kWaterLiquid);
  check("H2O_vapor", thermo::kWaterVapor);
  check("H2", thermo::kHydrogen);
  check("O2", thermo::kOxygen);
  check("N2", thermo::kNitrogen);
}
