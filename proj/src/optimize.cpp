#include "pemopt/design/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace pemopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CachedTrial {
  double pv = kInf;
  Schedule schedule;  // kept for warm starts
};

using TrialCache = std::map<std::pair<long long, long long>, CachedTrial>;

std::pair<long long, long long> key_of(const Design& d) {
  return {std::llround(d.n_cells * 1e3), std::llround(d.storage_days * 1e6)};
}

// Nearest previously solved trial in (log cells, storage days); deterministic
// tie-break toward smaller cell counts (map order is ascending in the key).
const CachedTrial* nearest_warm(const TrialCache& cache, const Design& d) {
  const CachedTrial* best = nullptr;
  double best_dist = kInf;
  for (const auto& [key, trial] : cache) {
    if (trial.schedule.info.status != SolveStatus::kOptimal) continue;
    const double dx = std::log(key.first / 1e3) - std::log(d.n_cells);
    const double dy = key.second / 1e6 - d.storage_days;
    const double dist = dx * dx + dy * dy;
    if (dist < best_dist - 1e-15) {
      best_dist = dist;
      best = &trial;
    }
  }
  return best;
}

struct Evaluation {
  double pv = kInf;
  Schedule schedule;
  TrialLog log;
};

Evaluation evaluate_one(const PlantModel& model, const RepDaySet& days,
                        const CostParams& costs, const Design& design,
                        const nlp::IpmOptions& ipm, const Schedule* warm) {
  Evaluation ev;
  ev.log.design = design;
  ev.log.warm_started = warm != nullptr;
  ScheduleModel sm(model, design, days);
  ScheduleSolveOptions sopt;
  sopt.ipm = ipm;
  sopt.warm_start = warm;
  ev.schedule = solve_schedule(sm, sopt);
  ev.log.status = ev.schedule.info.status;
  ev.log.iterations = ev.schedule.info.iterations;
  if (ev.schedule.info.status == SolveStatus::kOptimal) {
    const auto report = evaluate_costs(design, ev.schedule, costs, model.degradation,
                                       model.geometry.cell_area_cm2);
    ev.pv = report.pv_total;
    ev.log.pv = report.pv_total;
    ev.log.vopex = ev.schedule.vopex.total;
  }
  return ev;
}

}  // namespace

OptimizeResult optimize_design(const PlantModel& model, const RepDaySet& days,
                               const CostParams& costs, const OptimizeOptions& opt) {
  OptimizeResult out;
  TrialCache cache;
  std::mutex cache_mu;
  std::vector<TrialLog> trials;

  const auto batch = [&](std::span<const Design> designs) {
    // Snapshot the cache: warm starts see only fully completed iterations, so
    // concurrent evaluation order cannot change any result.
    std::vector<const CachedTrial*> warm(designs.size(), nullptr);
    {
      std::lock_guard<std::mutex> lock(cache_mu);
      for (std::size_t k = 0; k < designs.size(); ++k)
        warm[k] = nearest_warm(cache, designs[k]);
    }
    std::vector<Evaluation> evals(designs.size());
    const int jobs = std::max(1, opt.jobs);
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex next_mu;
    auto worker = [&] {
      for (;;) {
        std::size_t k;
        {
          std::lock_guard<std::mutex> lock(next_mu);
          if (next >= designs.size()) return;
          k = next++;
        }
        evals[k] = evaluate_one(model, days, costs, designs[k], opt.ipm,
                                warm[k] ? &warm[k]->schedule : nullptr);
      }
    };
    if (jobs == 1 || designs.size() == 1) {
      worker();
    } else {
      for (int j = 0; j < std::min<std::size_t>(jobs, designs.size()); ++j)
        pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    std::vector<double> pvs(designs.size());
    {
      std::lock_guard<std::mutex> lock(cache_mu);
      for (std::size_t k = 0; k < designs.size(); ++k) {
        pvs[k] = evals[k].pv;
        cache[key_of(designs[k])] =
            CachedTrial{evals[k].pv, std::move(evals[k].schedule)};
        trials.push_back(evals[k].log);
        if (opt.log) {
          char buf[200];
          std::snprintf(buf, sizeof buf,
                        "trial n_cells=%.1f storage=%.4f d -> pv=%.6e (%s, %d iters%s)",
                        designs[k].n_cells, designs[k].storage_days, evals[k].pv,
                        evals[k].log.status == SolveStatus::kOptimal ? "ok"
                        : evals[k].log.status == SolveStatus::kInfeasible
                            ? "infeasible"
                            : "failed",
                        evals[k].log.iterations,
                        evals[k].log.warm_started ? ", warm" : "");
          opt.log(buf);
        }
      }
    }
    return pvs;
  };

  out.gss = GoldenSearch2D::minimize(opt.box, batch);
  out.trials = std::move(trials);
  if (!out.gss.converged || !std::isfinite(out.gss.best_pv)) {
    out.message = out.gss.message.empty() ? "golden-section search did not converge"
                                          : out.gss.message;
    return out;
  }

  if (opt.grid_audit) {
    // Coarse 5x5 sweep to flag non-unimodal landscapes the quadrant
    // elimination could mishandle.
    std::vector<Design> grid;
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b)
        grid.push_back({opt.box.n_cells_lo +
                            (opt.box.n_cells_hi - opt.box.n_cells_lo) * a / 4.0,
                        opt.box.storage_days_lo +
                            (opt.box.storage_days_hi - opt.box.storage_days_lo) * b / 4.0});
    const auto pvs = batch(grid);
    for (std::size_t g = 0; g < grid.size(); ++g)
      out.audit.push_back({grid[g], pvs[g]});
    int local_minima = 0;
    auto at = [&](int a, int b) { return pvs[a * 5 + b]; };
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) {
        bool is_min = std::isfinite(at(a, b));
        if (a > 0) is_min = is_min && at(a, b) < at(a - 1, b);
        if (a < 4) is_min = is_min && at(a, b) < at(a + 1, b);
        if (b > 0) is_min = is_min && at(a, b) < at(a, b - 1);
        if (b < 4) is_min = is_min && at(a, b) < at(a, b + 1);
        if (is_min) ++local_minima;
      }
    out.audit_unimodal = local_minima <= 1;
    if (opt.log && !out.audit_unimodal)
      opt.log("grid audit: landscape shows multiple local minima; quadrant "
              "elimination may have discarded the global optimum");
  }

  // Final answer: re-solve the incumbent cold so that reported trajectories
  // are reproducible independently of the warm-start path.
  out.design = out.gss.best;
  out.rounded_cells = std::llround(out.design.n_cells);
  const auto final_eval =
      evaluate_one(model, days, costs, out.design, opt.ipm, nullptr);
  if (final_eval.schedule.info.status != SolveStatus::kOptimal) {
    out.message = "final re-solve at the incumbent failed: " +
                  final_eval.schedule.info.message;
    out.schedule = final_eval.schedule;
    return out;
  }
  out.schedule = final_eval.schedule;
  out.costs = evaluate_costs(out.design, out.schedule, costs, model.degradation,
                             model.geometry.cell_area_cm2);
  out.ok = true;
  return out;
}

OptimizeResult evaluate_design(const PlantModel& model, const RepDaySet& days,
                               const CostParams& costs, const Design& design,
                               const OptimizeOptions& opt) {
  OptimizeResult out;
  out.design = design;
  out.rounded_cells = std::llround(design.n_cells);
  const auto ev = evaluate_one(model, days, costs, design, opt.ipm, nullptr);
  out.schedule = ev.schedule;
  out.trials.push_back(ev.log);
  if (ev.schedule.info.status != SolveStatus::kOptimal) {
    out.message = ev.schedule.info.status == SolveStatus::kInfeasible
                      ? ev.schedule.info.message
                      : "inner solve failed: " + ev.schedule.info.message;
    return out;
  }
  out.costs = evaluate_costs(design, ev.schedule, costs, model.degradation,
                             model.geometry.cell_area_cm2);
  out.ok = true;
  return out;
}

}  // namespace pemopt
