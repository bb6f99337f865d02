#pragma once

#include <cstdint>
#include <string>

#include "pemopt/prices.hpp"

namespace pemopt {

enum class PricePattern {
  kFlat,            // constant value
  kDiurnal,         // two-level day/night cycle
  kSpikyVolatile,   // diurnal base with lognormal noise and scarcity spikes
  kDurationMatched, // spiky generator rescaled to an exact target mean
};

struct SyntheticPriceSpec {
  PricePattern pattern = PricePattern::kFlat;
  double mean_usd_per_mwh = 50.0;
  double volatility = 1.0;  // relative dispersion knob for the spiky patterns
  std::uint64_t seed = 1;
};

PricePattern parse_price_pattern(const std::string& name);

// Deterministic 8760-hour synthetic series (means are exact for flat,
// diurnal and duration-matched patterns).
PriceSeries generate_prices(const SyntheticPriceSpec& spec);

// Writes the standard CSV format (timestamp,price_usd_per_mwh).
void write_price_csv(const PriceSeries& series, const std::string& path);

}  // namespace pemopt
