#pragma once

#include <functional>
#include <vector>

#include "pemopt/design/gss.hpp"
#include "pemopt/economics.hpp"
#include "pemopt/schedule/build.hpp"

namespace pemopt {

struct OptimizeOptions {
  OptimizeOptions() { ipm.max_iter = 3000; }
  SearchBox box;
  nlp::IpmOptions ipm;
  int jobs = 1;
  bool grid_audit = false;
  std::function<void(const std::string&)> log;
};

struct TrialLog {
  Design design;
  double pv = 0;
  double vopex = 0;
  SolveStatus status = SolveStatus::kSolverFailure;
  int iterations = 0;
  bool warm_started = false;
};

struct GridAuditPoint {
  Design design;
  double pv = 0;
};

struct OptimizeResult {
  bool ok = false;
  std::string message;
  Design design;          // incumbent, rounded cell count in `rounded_cells`
  long long rounded_cells = 0;
  Schedule schedule;      // final cold re-solve at the incumbent
  CostReport costs;
  GssResult gss;
  std::vector<TrialLog> trials;
  std::vector<GridAuditPoint> audit;
  bool audit_unimodal = true;
};

// Bilevel design optimization: golden-section search over (cells, storage)
// with the inner operating problem solved at every trial point. Trial
// evaluations within an iteration may run concurrently; warm starts are drawn
// from trials completed in earlier iterations only, so results do not depend
// on evaluation order.
OptimizeResult optimize_design(const PlantModel& model, const RepDaySet& days,
                               const CostParams& costs, const OptimizeOptions& opt);

// Fixed-design evaluation (no outer search): inner solve + economics.
OptimizeResult evaluate_design(const PlantModel& model, const RepDaySet& days,
                               const CostParams& costs, const Design& design,
                               const OptimizeOptions& opt);

}  // namespace pemopt
