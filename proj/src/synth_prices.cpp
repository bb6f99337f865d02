#include "pemopt/synth_prices.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "pemopt/util/rng.hpp"

namespace pemopt {

PricePattern parse_price_pattern(const std::string& name) {
  if (name == "flat") return PricePattern::kFlat;
  if (name == "diurnal") return PricePattern::kDiurnal;
  if (name == "spiky") return PricePattern::kSpikyVolatile;
  if (name == "duration-matched") return PricePattern::kDurationMatched;
  throw std::invalid_argument("unknown price pattern '" + name +
                              "' (flat | diurnal | spiky | duration-matched)");
}

namespace {

std::vector<double> spiky_values(const SyntheticPriceSpec& spec) {
  util::Rng rng(spec.seed);
  std::vector<double> v(8760);
  // Day-level regime factor plus an hourly diurnal swing, lognormal jitter
  // and occasional evening scarcity spikes; shaped after present-day ERCOT
  // style duration curves (long cheap tail, short expensive head).
  double regime = 1.0;
  for (int d = 0; d < 365; ++d) {
    regime = std::clamp(0.9 * regime + 0.1 + 0.25 * spec.volatility * rng.next_normal(),
                        0.15, 4.0);
    const double seasonal = 1.0 + 0.25 * std::sin(2 * M_PI * (d - 20) / 365.0);
    for (int h = 0; h < 24; ++h) {
      const double diurnal =
          1.0 + 0.55 * std::sin(2 * M_PI * (h - 9) / 24.0);
      double p = regime * seasonal * diurnal *
                 std::exp(0.18 * spec.volatility * rng.next_normal());
      if (h >= 17 && h <= 20 && rng.next_double() < 0.02 * spec.volatility)
        p *= 8.0 + 10.0 * rng.next_double();  // scarcity event
      if (rng.next_double() < 0.01 * spec.volatility) p = -0.2 * p;  // negative-price hour
      v[d * 24 + h] = p;
    }
  }
  return v;
}

}  // namespace

PriceSeries generate_prices(const SyntheticPriceSpec& spec) {
  std::vector<double> v(8760, spec.mean_usd_per_mwh);
  switch (spec.pattern) {
    case PricePattern::kFlat:
      break;
    case PricePattern::kDiurnal: {
      // 12 cheap night hours and 12 expensive day hours around the mean.
      const double swing = 0.8 * spec.volatility * spec.mean_usd_per_mwh;
      for (int h = 0; h < 8760; ++h)
        v[h] = spec.mean_usd_per_mwh + ((h % 24) < 12 ? -swing : swing);
      break;
    }
    case PricePattern::kSpikyVolatile: {
      v = spiky_values(spec);
      for (double& x : v) x *= spec.mean_usd_per_mwh;
      break;
    }
    case PricePattern::kDurationMatched: {
      v = spiky_values(spec);
      double mean = 0;
      for (double x : v) mean += x / v.size();
      const double scale = spec.mean_usd_per_mwh / mean;
      for (double& x : v) x *= scale;
      break;
    }
  }
  return PriceSeries::from_values(std::move(v), "synthetic");
}

void write_price_csv(const PriceSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "timestamp,price_usd_per_mwh\n";
  char buf[64];
  for (int h = 0; h < series.n_hours(); ++h) {
    const int day = h / 24;
    std::snprintf(buf, sizeof buf, "d%03d-h%02d,%.10g\n", day, h % 24,
                  series.values[h]);
    out << buf;
  }
}

}  // namespace pemopt
