#include "pemopt/prices.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pemopt/util/rng.hpp"

namespace pemopt {

namespace {

// RFC-4180 field splitting: quoted fields may contain commas and doubled
// quotes.
std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_price(const std::string& field, int row) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(field, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("price csv: unparseable value '" + field + "' at data row " +
                             std::to_string(row));
  }
  while (pos < field.size() && std::isspace(static_cast<unsigned char>(field[pos]))) ++pos;
  if (pos != field.size())
    throw std::runtime_error("price csv: trailing characters in '" + field + "' at data row " +
                             std::to_string(row));
  if (!std::isfinite(v))
    throw std::runtime_error("price csv: non-finite value at data row " + std::to_string(row));
  return v;
}

double sq_dist24(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (int h = 0; h < 24; ++h) {
    const double d = a[h] - b[h];
    s += d * d;
  }
  return s;
}

}  // namespace

PriceSeries PriceSeries::from_values(std::vector<double> v, std::string label) {
  if (v.empty() || v.size() % 24 != 0)
    throw std::invalid_argument("PriceSeries: value count must be a positive multiple of 24");
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("PriceSeries: non-finite value");
  return PriceSeries{std::move(v), std::move(label)};
}

double PriceSeries::mean() const {
  return std::accumulate(values.begin(), values.end(), 0.0) / values.size();
}

PriceSeries load_prices(const std::string& path, PriceCsvFormat format,
                        std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("price csv: cannot open " + path);

  std::vector<double> values;
  values.reserve(8784);
  std::string line;
  int row = 0;
  bool header_done = (format == PriceCsvFormat::kSingleColumn);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (!header_done) {
      header_done = true;
      const auto fields = split_csv_row(line);
      if (fields.size() < 2 || fields[0] != "timestamp" ||
          fields[1] != "price_usd_per_mwh")
        throw std::runtime_error(
            "price csv: expected header 'timestamp,price_usd_per_mwh' in " + path);
      continue;
    }
    ++row;
    const auto fields = split_csv_row(line);
    const std::string& price_field =
        (format == PriceCsvFormat::kTimestampPrice)
            ? (fields.size() >= 2
                   ? fields[1]
                   : throw std::runtime_error("price csv: missing price column at data row " +
                                              std::to_string(row)))
            : fields[0];
    values.push_back(parse_price(price_field, row));
  }

  if (values.size() == 8784) {
    // Leap year: drop Feb 29 (day 60 of the year) to force 365 days.
    const std::size_t feb29_start = 59 * 24;
    values.erase(values.begin() + feb29_start, values.begin() + feb29_start + 24);
    if (warnings)
      warnings->push_back("price csv: 8784 rows (leap year); dropped Feb 29");
  }
  if (values.size() != 8760)
    throw std::runtime_error("price csv: expected 8760 hourly rows, got " +
                             std::to_string(values.size()) + " in " + path);
  return PriceSeries::from_values(std::move(values), path);
}

void RepDaySet::validate() const {
  if (k <= 0 || static_cast<int>(rep_days.size()) != k ||
      static_cast<int>(weights.size()) != k ||
      static_cast<int>(medoid_day.size()) != k)
    throw std::invalid_argument("RepDaySet: inconsistent k");
  if (static_cast<int>(mapping.size()) != n_days)
    throw std::invalid_argument("RepDaySet: mapping must cover every day");
  int wsum = 0;
  std::vector<int> counts(k, 0);
  for (int d = 0; d < n_days; ++d) {
    if (mapping[d] < 0 || mapping[d] >= k)
      throw std::invalid_argument("RepDaySet: mapping index out of range");
    ++counts[mapping[d]];
  }
  for (int r = 0; r < k; ++r) {
    wsum += weights[r];
    if (weights[r] != counts[r])
      throw std::invalid_argument("RepDaySet: weights inconsistent with mapping");
    if (rep_days[r].size() != 24)
      throw std::invalid_argument("RepDaySet: rep day must have 24 prices");
  }
  if (wsum != n_days) throw std::invalid_argument("RepDaySet: weights must sum to n_days");
}

std::string RepDaySet::to_json() const {
  nlohmann::json j;
  j["k"] = k;
  j["n_days"] = n_days;
  j["weights"] = weights;
  j["mapping"] = mapping;
  j["medoid_day_of_year"] = medoid_day;
  j["prices"] = rep_days;
  j["source"] = source_label;
  return j.dump(2);
}

RepDaySet RepDaySet::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RepDaySet s;
  s.k = j.at("k").get<int>();
  s.n_days = j.at("n_days").get<int>();
  s.weights = j.at("weights").get<std::vector<int>>();
  s.mapping = j.at("mapping").get<std::vector<int>>();
  s.medoid_day = j.at("medoid_day_of_year").get<std::vector<int>>();
  s.rep_days = j.at("prices").get<std::vector<std::vector<double>>>();
  s.source_label = j.value("source", "");
  s.validate();
  return s;
}

RepDaySet cluster_rep_days(const PriceSeries& series, int k, std::uint64_t seed,
                           std::vector<std::string>* warnings) {
  const int n = series.n_days();
  if (k < 1 || k > n)
    throw std::invalid_argument("cluster: k must be within [1, n_days]");

  // Count distinct day vectors; k cannot exceed that.
  {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const auto da = series.day(a), db = series.day(b);
      return std::lexicographical_compare(da.begin(), da.end(), db.begin(), db.end());
    });
    int distinct = n == 0 ? 0 : 1;
    for (int i = 1; i < n; ++i) {
      const auto da = series.day(order[i - 1]), db = series.day(order[i]);
      if (!std::equal(da.begin(), da.end(), db.begin())) ++distinct;
    }
    if (k > distinct) {
      if (warnings)
        warnings->push_back("cluster: reduced k from " + std::to_string(k) + " to " +
                            std::to_string(distinct) + " (distinct day profiles)");
      k = distinct;
    }
  }

  util::Rng rng(seed);
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);

  // k-means++ seeding.
  {
    const int first = static_cast<int>(rng.next_index(static_cast<std::uint64_t>(n)));
    centroids.emplace_back(series.day(first).begin(), series.day(first).end());
    std::vector<double> d2(n);
    while (static_cast<int>(centroids.size()) < k) {
      double total = 0;
      for (int d = 0; d < n; ++d) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : centroids) best = std::min(best, sq_dist24(series.day(d), c));
        d2[d] = best;
        total += best;
      }
      int pick = 0;
      if (total > 0) {
        const double target = rng.next_double() * total;
        double acc = 0;
        for (int d = 0; d < n; ++d) {
          acc += d2[d];
          if (acc >= target) {
            pick = d;
            break;
          }
        }
      } else {
        pick = static_cast<int>(rng.next_index(static_cast<std::uint64_t>(n)));
      }
      centroids.emplace_back(series.day(pick).begin(), series.day(pick).end());
    }
  }

  std::vector<int> assign(n, -1);
  constexpr int kMaxIters = 200;
  for (int iter = 0; iter < kMaxIters; ++iter) {
    bool changed = false;
    for (int d = 0; d < n; ++d) {
      int best = 0;
      double bestd = std::numeric_limits<double>::infinity();
      for (int r = 0; r < k; ++r) {
        const double dist = sq_dist24(series.day(d), centroids[r]);
        if (dist < bestd) {
          bestd = dist;
          best = r;
        }
      }
      if (assign[d] != best) {
        assign[d] = best;
        changed = true;
      }
    }
    // Recompute centroids; reseed empty clusters from the farthest point.
    std::vector<std::vector<double>> sums(k, std::vector<double>(24, 0.0));
    std::vector<int> counts(k, 0);
    for (int d = 0; d < n; ++d) {
      ++counts[assign[d]];
      const auto day = series.day(d);
      for (int h = 0; h < 24; ++h) sums[assign[d]][h] += day[h];
    }
    for (int r = 0; r < k; ++r) {
      if (counts[r] == 0) {
        int far_day = 0;
        double far_dist = -1;
        for (int d = 0; d < n; ++d) {
          const double dist = sq_dist24(series.day(d), centroids[assign[d]]);
          if (dist > far_dist) {
            far_dist = dist;
            far_day = d;
          }
        }
        centroids[r].assign(series.day(far_day).begin(), series.day(far_day).end());
        assign[far_day] = r;
        changed = true;
      } else {
        for (int h = 0; h < 24; ++h) centroids[r][h] = sums[r][h] / counts[r];
      }
    }
    if (!changed) break;
  }

  RepDaySet out;
  out.k = k;
  out.n_days = n;
  out.mapping = assign;
  out.weights.assign(k, 0);
  for (int d = 0; d < n; ++d) ++out.weights[assign[d]];
  out.medoid_day.assign(k, -1);
  std::vector<double> medoid_dist(k, std::numeric_limits<double>::infinity());
  for (int d = 0; d < n; ++d) {
    const int r = assign[d];
    const double dist = sq_dist24(series.day(d), centroids[r]);
    if (dist < medoid_dist[r]) {
      medoid_dist[r] = dist;
      out.medoid_day[r] = d;
    }
  }
  out.rep_days.resize(k);
  for (int r = 0; r < k; ++r) {
    const auto day = series.day(out.medoid_day[r]);
    out.rep_days[r].assign(day.begin(), day.end());
  }
  out.source_label = series.label;
  out.validate();
  return out;
}

std::vector<double> reconstruct_annual(std::span<const double> per_rep_day,
                                       std::span<const int> mapping) {
  std::vector<double> out(mapping.size());
  for (std::size_t d = 0; d < mapping.size(); ++d) {
    const int r = mapping[d];
    if (r < 0 || static_cast<std::size_t>(r) >= per_rep_day.size())
      throw std::out_of_range("reconstruct_annual: mapping index out of range");
    out[d] = per_rep_day[r];
  }
  return out;
}

}  // namespace pemopt
