#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pemopt {

// Hourly electricity prices, $/MWh. Files must cover exactly one year
// (365 x 24); in-memory series may use shorter synthetic "years" for tests.
struct PriceSeries {
  std::vector<double> values;  // $/MWh per hour
  std::string label;

  int n_days() const { return static_cast<int>(values.size()) / 24; }
  int n_hours() const { return static_cast<int>(values.size()); }
  std::span<const double> day(int d) const {
    return {values.data() + static_cast<std::size_t>(d) * 24, 24};
  }

  static PriceSeries from_values(std::vector<double> v, std::string label = "");
  double mean() const;
};

enum class PriceCsvFormat {
  kTimestampPrice,  // header "timestamp,price_usd_per_mwh"
  kSingleColumn,    // headerless, one price per row
};

// Loads and validates an hourly price CSV. Leap-year files (8784 rows) have
// Feb 29 dropped with a warning. Any other row count is an error.
PriceSeries load_prices(const std::string& path,
                        PriceCsvFormat format = PriceCsvFormat::kTimestampPrice,
                        std::vector<std::string>* warnings = nullptr);

// k representative day profiles with cluster weights and the day -> rep-day
// mapping. Every rep day is an actual day of the input (cluster medoid).
struct RepDaySet {
  int k = 0;
  int n_days = 0;
  std::vector<std::vector<double>> rep_days;  // k x 24, $/MWh
  std::vector<int> weights;                   // counts, sum == n_days
  std::vector<int> mapping;                   // n_days, day -> cluster
  std::vector<int> medoid_day;                // k, day-of-year (0-based)
  std::string source_label;

  // Price held constant within each hour when stepping at sub-hourly dt.
  double price(int r, double hour_of_day) const {
    int h = static_cast<int>(hour_of_day);
    if (h > 23) h = 23;
    return rep_days[r][h];
  }

  void validate() const;
  std::string to_json() const;
  static RepDaySet from_json(const std::string& text);
};

// Lloyd's k-means on 24-dimensional day vectors with k-means++ seeding.
// Deterministic for a fixed seed. Empty clusters are reseeded from the point
// farthest from its centroid. If the input has fewer distinct day vectors
// than k, k is reduced (with a warning).
RepDaySet cluster_rep_days(const PriceSeries& series, int k, std::uint64_t seed,
                           std::vector<std::string>* warnings = nullptr);

// Expands a per-rep-day quantity to a full-year series via the mapping.
std::vector<double> reconstruct_annual(std::span<const double> per_rep_day,
                                       std::span<const int> mapping);

}  // namespace pemopt
