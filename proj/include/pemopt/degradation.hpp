#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace pemopt {

struct DegradationParams {
  double coefficient_a_uv_per_h = 30.0;  // uV/h below the knee
  double knee_current = 1.0;             // A/cm2
  double replacement_threshold_v = 1.0;  // V
  double softplus_beta = 50.0;           // smoothing sharpness used inside the NLP
  // Replacement interval assumed when no use-dependent degradation is modeled.
  int no_degradation_interval_years = 7;

  double coefficient_a_v_per_h() const { return coefficient_a_uv_per_h * 1e-6; }

  void validate() const {
    if (!(coefficient_a_uv_per_h > 0) || !(replacement_threshold_v > 0))
      throw std::invalid_argument("degradation: coefficient and threshold must be positive");
  }
};

namespace degradation {

// Piecewise rate in V/h: constant a below the knee, a*i^2 above. Continuous
// at the knee.
inline double rate_v_per_h(double i, const DegradationParams& p) {
  if (i < 0) throw std::domain_error("degradation rate: current density < 0");
  const double a = p.coefficient_a_v_per_h();
  const double x = i / p.knee_current;
  return x <= 1.0 ? a : a * x * x;
}

// C1 surrogate used inside the NLP: a * (1 + softplus_beta(i^2 - 1)).
// Matches the piecewise law away from the knee; reporting uses the piecewise
// values.
template <class S>
S rate_smooth_v_per_h(const S& i, const DegradationParams& p) {
  using std::exp;
  using std::log;
  const double a = p.coefficient_a_v_per_h();
  const double beta = p.softplus_beta;
  const S z = (i / p.knee_current) * (i / p.knee_current) - 1.0;
  // log1p(exp(beta z))/beta, stabilized for large positive z.
  const S bz = beta * z;
  S softplus = bz > 35.0 ? z : S(log(1.0 + exp(bz)) / beta);
  return a * (1.0 + softplus);
}

}  // namespace degradation

inline double degradation_rate(double current_density, const DegradationParams& params) {
  return degradation::rate_v_per_h(current_density, params);
}

// Left-endpoint-free rectangle rule matching the scheduler's implicit-Euler
// quadrature: each step contributes rate(i_t) * dt.
inline double accumulate_degradation(std::span<const double> current_schedule,
                                     double dt_hours, const DegradationParams& params) {
  double total = 0.0;
  for (double i : current_schedule) total += degradation::rate_v_per_h(i, params) * dt_hours;
  return total;
}

// Replacement interval in whole years. A stack that degrades past the
// threshold within a year still runs to year end, hence the floor at 1.
inline int replacement_interval_years(double end_of_year_v, const DegradationParams& params) {
  if (end_of_year_v < 0)
    throw std::domain_error("replacement_interval: negative degradation");
  if (end_of_year_v == 0.0) return params.no_degradation_interval_years;
  if (end_of_year_v > params.replacement_threshold_v) return 1;
  return static_cast<int>(std::floor(params.replacement_threshold_v / end_of_year_v));
}

// Per-representative-day degradation deltas expanded over the real-day
// mapping.
struct DegradationLedger {
  std::vector<double> per_rep_day_delta;   // V, delta over one occurrence of rep day r
  std::vector<double> cumulative_by_day;   // V at the END of real day d (0-based)
  double end_of_year = 0.0;                // V, Delta^1

  static DegradationLedger build(std::span<const double> per_rep_day_delta,
                                 std::span<const int> day_to_rep) {
    DegradationLedger ledger;
    ledger.per_rep_day_delta.assign(per_rep_day_delta.begin(), per_rep_day_delta.end());
    ledger.cumulative_by_day.resize(day_to_rep.size());
    double cum = 0.0;  // fresh stack starts at 0 V
    for (std::size_t d = 0; d < day_to_rep.size(); ++d) {
      const int r = day_to_rep[d];
      if (r < 0 || static_cast<std::size_t>(r) >= ledger.per_rep_day_delta.size())
        throw std::out_of_range("degradation ledger: mapping index out of range");
      cum += ledger.per_rep_day_delta[r];
      ledger.cumulative_by_day[d] = cum;
    }
    ledger.end_of_year = cum;
    return ledger;
  }

  // Cumulative degradation carried into day d (0-based), i.e. after d days.
  double carried_into_day(std::size_t d) const {
    return d == 0 ? 0.0 : cumulative_by_day[d - 1];
  }
};

}  // namespace pemopt
