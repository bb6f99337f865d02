#pragma once

#include <string>
#include <vector>

#include "pemopt/schedule/model.hpp"
#include "pemopt/schedule/simulate.hpp"

namespace pemopt {

// One CSV per representative day: schedule_r<k>.csv.
std::vector<std::string> write_schedule_csvs(const Schedule& schedule,
                                             const std::string& dir);

std::string schedule_summary_json(const Schedule& schedule);

// Reads per-step controls back from a schedule CSV (columns located by
// header name; i_a_cm2 is required, the rest default to zero).
std::vector<StepControls> read_schedule_controls(const std::string& csv_path,
                                                 int expected_steps);

std::string simulation_report_json(const SimulationResult& sim);

// Plot-ready data: weight-weighted current-density histogram of a schedule
// and the sorted annual price duration curve.
std::string current_histogram_csv(const Schedule& schedule, int bins = 40);
std::string duration_curve_csv(const RepDaySet& days);

}  // namespace pemopt
