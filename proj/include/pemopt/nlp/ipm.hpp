#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pemopt/nlp/problem.hpp"

namespace pemopt::nlp {

struct IpmOptions {
  double tol_kkt = 1e-6;    // scaled dual infeasibility / complementarity
  double tol_feas = 1e-8;   // scaled constraint violation
  double mu_init = 0.1;
  int max_iter = 600;
  int max_ls = 25;
  double bound_push = 1e-2;
  bool verbose = false;
  std::function<void(const std::string&)> log;
};

struct IterStat {
  int iter = 0;
  double objective = 0, feas = 0, dual = 0, mu = 0, alpha = 0, delta_w = 0;
};

struct IpmResult {
  enum class Status { kConverged, kMaxIter, kStalled, kNumericalError };
  Status status = Status::kNumericalError;
  std::vector<double> x;  // model units
  std::vector<double> y;  // constraint multipliers (internal scaling)
  double objective = 0.0;
  double kkt_error = 0.0;
  double feas_error = 0.0;
  int iterations = 0;
  std::string message;
  std::vector<IterStat> trace;

  bool ok() const { return status == Status::kConverged; }
};

// Primal-dual interior-point solve with slacks for range constraints, exact
// second derivatives from the term expressions, inertia-corrected sparse LDLT
// steps and an l1-penalty line search.
IpmResult solve_ipm(const Problem& p, const IpmOptions& opt = {},
                    std::span<const double> x_warm = {},
                    std::span<const double> y_warm = {});

}  // namespace pemopt::nlp
