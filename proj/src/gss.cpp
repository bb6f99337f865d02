#include "pemopt/design/gss.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace pemopt {

namespace {

constexpr double kInvPhi = 0.6180339887498949;  // 1/phi

std::pair<long long, long long> cache_key(const Design& d) {
  return {std::llround(d.n_cells * 1e3), std::llround(d.storage_days * 1e6)};
}

}  // namespace

GssResult GoldenSearch2D::minimize(const SearchBox& box, const BatchEvaluator& evaluate) {
  GssResult res;
  double x_lo = box.n_cells_lo, x_hi = box.n_cells_hi;
  double y_lo = box.storage_days_lo, y_hi = box.storage_days_hi;
  if (!(x_lo < x_hi) || !(y_lo < y_hi) || !(box.tolerance > 0)) {
    res.message = "invalid search box";
    return res;
  }
  const double w0_x = x_hi - x_lo, w0_y = y_hi - y_lo;
  // An axis counts as converged when it has shrunk to the tolerance times its
  // initial width, or when the box is already tight relative to the bound
  // magnitudes (handles pre-converged inputs).
  const auto axis_done = [&box](double lo, double hi, double w0) {
    const double w = hi - lo;
    return w <= box.tolerance * w0 ||
           w <= 0.1 * box.tolerance * std::max(std::abs(lo), std::abs(hi));
  };

  std::map<std::pair<long long, long long>, double> cache;
  res.best_pv = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < box.max_iterations; ++iter) {
    if (axis_done(x_lo, x_hi, w0_x) && axis_done(y_lo, y_hi, w0_y)) {
      res.converged = true;
      break;
    }
    const double x1 = x_hi - (x_hi - x_lo) * kInvPhi;
    const double x2 = x_lo + (x_hi - x_lo) * kInvPhi;
    const double y1 = y_hi - (y_hi - y_lo) * kInvPhi;
    const double y2 = y_lo + (y_hi - y_lo) * kInvPhi;
    const Design trials[4] = {{x1, y1}, {x2, y1}, {x1, y2}, {x2, y2}};

    std::vector<Design> fresh;
    std::vector<int> fresh_slot;
    for (int q = 0; q < 4; ++q) {
      if (!cache.count(cache_key(trials[q]))) {
        fresh.push_back(trials[q]);
        fresh_slot.push_back(q);
      }
    }
    if (!fresh.empty()) {
      const auto pvs = evaluate(fresh);
      for (std::size_t k = 0; k < fresh.size(); ++k)
        cache[cache_key(fresh[k])] = pvs[k];
    }

    double pv[4];
    int best_q = -1;
    for (int q = 0; q < 4; ++q) {
      pv[q] = cache.at(cache_key(trials[q]));
      if (best_q < 0 || pv[q] < pv[best_q]) best_q = q;
    }
    if (!std::isfinite(pv[best_q])) {
      res.message =
          "all four trial designs infeasible: the demand target is unreachable "
          "anywhere in the current search box";
      res.iterations = iter;
      return res;
    }

    GssTraceRow row;
    row.iteration = iter;
    for (int q = 0; q < 4; ++q) {
      row.trial[q] = trials[q];
      row.pv[q] = pv[q];
    }
    row.n_cells_lo = x_lo;
    row.n_cells_hi = x_hi;
    row.storage_lo = y_lo;
    row.storage_hi = y_hi;
    res.trace.push_back(row);

    if (pv[best_q] < res.best_pv) {
      res.best_pv = pv[best_q];
      res.best = trials[best_q];
    }

    // Quadrant elimination: the minimum cannot lie beyond the far trial on
    // either axis.
    switch (best_q) {
      case 0:  // A = (x1, y1)
        x_hi = x2;
        y_hi = y2;
        break;
      case 1:  // B = (x2, y1)
        x_lo = x1;
        y_hi = y2;
        break;
      case 2:  // C = (x1, y2)
        x_hi = x2;
        y_lo = y1;
        break;
      default:  // D = (x2, y2)
        x_lo = x1;
        y_lo = y1;
        break;
    }
    res.iterations = iter + 1;
  }
  if (!res.converged)
    res.converged = axis_done(x_lo, x_hi, w0_x) && axis_done(y_lo, y_hi, w0_y);
  if (!std::isfinite(res.best_pv)) res.message = "no feasible design evaluated";
  return res;
}

std::string gss_trace_csv(const GssResult& result) {
  std::ostringstream out;
  out << "iteration,n_cells_a,storage_a,pv_a,n_cells_b,storage_b,pv_b,"
         "n_cells_c,storage_c,pv_c,n_cells_d,storage_d,pv_d,"
         "box_n_cells_lo,box_n_cells_hi,box_storage_lo,box_storage_hi\n";
  char buf[512];
  for (const auto& r : result.trace) {
    std::snprintf(buf, sizeof buf,
                  "%d,%.6f,%.9f,%.6e,%.6f,%.9f,%.6e,%.6f,%.9f,%.6e,%.6f,%.9f,"
                  "%.6e,%.6f,%.6f,%.9f,%.9f\n",
                  r.iteration, r.trial[0].n_cells, r.trial[0].storage_days, r.pv[0],
                  r.trial[1].n_cells, r.trial[1].storage_days, r.pv[1],
                  r.trial[2].n_cells, r.trial[2].storage_days, r.pv[2],
                  r.trial[3].n_cells, r.trial[3].storage_days, r.pv[3],
                  r.n_cells_lo, r.n_cells_hi, r.storage_lo, r.storage_hi);
    out << buf;
  }
  return out.str();
}

}  // namespace pemopt
