#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pemopt/schedule/model.hpp"

namespace pemopt {

struct SearchBox {
  double n_cells_lo = 40000.0;
  double n_cells_hi = 300000.0;
  double storage_days_lo = 0.1;
  double storage_days_hi = 14.0;
  int max_iterations = 60;
  // Relative to the initial axis widths; both axes must shrink below it.
  double tolerance = 1e-3;
};

struct GssTraceRow {
  int iteration = 0;
  Design trial[4];       // A=(x1,y1) B=(x2,y1) C=(x1,y2) D=(x2,y2)
  double pv[4] = {0, 0, 0, 0};
  double n_cells_lo = 0, n_cells_hi = 0, storage_lo = 0, storage_hi = 0;
};

struct GssResult {
  Design best;
  double best_pv = 0;
  int iterations = 0;
  bool converged = false;
  std::string message;
  std::vector<GssTraceRow> trace;
};

// 2-D golden-section search with quadrant elimination: four interior trial
// points per iteration, the smallest present value discards the opposite
// quadrant. Assumes unimodality along each axis. Evaluations are requested
// in per-iteration batches (callers may run them concurrently); previously
// evaluated designs are cached on a rounded key and never re-requested.
class GoldenSearch2D {
 public:
  // Returns one PV per design; +infinity marks an infeasible design.
  using BatchEvaluator =
      std::function<std::vector<double>(std::span<const Design>)>;

  static GssResult minimize(const SearchBox& box, const BatchEvaluator& evaluate);
};

std::string gss_trace_csv(const GssResult& result);

}  // namespace pemopt
