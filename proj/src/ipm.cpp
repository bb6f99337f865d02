#include "pemopt/nlp/ipm.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace pemopt::nlp {

namespace {

constexpr double kKappaEps = 10.0;    // barrier error threshold relative to mu
constexpr double kKappaMu = 0.2;      // linear mu reduction factor
constexpr double kThetaMu = 1.5;      // superlinear mu reduction exponent
constexpr double kKappaSigma = 1e10;  // multiplier clamp width
constexpr double kArmijoEta = 1e-4;

struct Work {
  const Problem* p = nullptr;
  int n = 0;   // model variables
  int mi = 0;  // inequality constraints (slacked)
  int m = 0;   // all constraints
  int nt = 0;  // n + mi

  std::vector<double> vscale;        // variable scales
  std::vector<int> slack_of_con;     // -1 for equalities
  std::vector<double> rhs_eq;        // scaled equality rhs
  std::vector<double> cscale;        // constraint row scales
  double fscale = 1.0;

  std::vector<double> bl, bu;   // bounds on [x; s], scaled
  std::vector<char> fixed;      // variables pinned by coincident bounds
  std::vector<double> xu;       // unscaled model variables buffer

  // Per-iteration evaluation results.
  double f = 0;                          // scaled objective
  std::vector<double> grad;              // scaled objective gradient, size nt
  std::vector<double> e;                 // scaled constraint residuals c(x) - rhs/slack
  std::vector<Eigen::Triplet<double>> kkt;  // lower-triangular triplets
  int dw_slot_begin = 0;                 // triplet slots for delta_w diag
  int dc_slot_begin = 0;                 // triplet slots for delta_c diag

  void unscale_into_xu(const std::vector<double>& xs) {
    for (int i = 0; i < n; ++i) xu[i] = xs[i] * vscale[i];
  }
};

double inf_norm(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool is_finite(double v) { return std::isfinite(v); }

// Minimizes ||e(x)||^2 over the bound box with damped Gauss-Newton steps.
// Used as a restoration fallback when the filter line search stalls far from
// feasibility. Returns the achieved ||e||_inf.
double restore_feasibility(Work& w, std::vector<double>& xs, double target_inf,
                           int max_iter,
                           const std::function<void(const std::string&)>& log);

// Evaluates objective and constraint VALUES only (fast path for line search).
// Returns false if anything is non-finite.
bool eval_values(Work& w, const std::vector<double>& xs, double* f_out,
                 std::vector<double>* e_out) {
  w.unscale_into_xu(xs);
  double f = 0;
  for (const auto& t : w.p->objective()) f += t->value(w.xu.data());
  if (!is_finite(f)) return false;
  *f_out = f * w.fscale;
  auto& e = *e_out;
  const auto& cons = w.p->constraints();
  for (int j = 0; j < w.m; ++j) {
    const double cv = cons[j].term->value(w.xu.data()) * w.cscale[j];
    if (!is_finite(cv)) return false;
    e[j] = cv - (w.slack_of_con[j] < 0 ? w.rhs_eq[j] : xs[w.n + w.slack_of_con[j]]);
  }
  return true;
}

double restore_feasibility(Work& w, std::vector<double>& xs, double target_inf,
                           int max_iter,
                           const std::function<void(const std::string&)>& log) {
  const auto& cons = w.p->constraints();
  LocalVec lg;
  LocalMat lh;
  std::vector<double> e(w.m);
  double f_unused;
  if (!eval_values(w, xs, &f_unused, &e)) return kInf;
  double theta = inf_norm(e);
  double lambda = 1e-4;

  Eigen::SparseMatrix<double> a(w.nt, w.nt);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd g(w.nt), dx(w.nt);

  for (int it = 0; it < max_iter && theta > target_inf; ++it) {
    // Assemble J^T J and J^T e from per-constraint local gradients.
    trip.clear();
    g.setZero();
    w.unscale_into_xu(xs);
    for (int j = 0; j < w.m; ++j) {
      const auto& term = *cons[j].term;
      const auto& vars = term.vars();
      const int na = term.arity();
      std::vector<double> jrow(na + 1, 0.0);
      if (term.is_linear()) {
        const auto& co = static_cast<const LinearTerm&>(term).coeffs();
        for (int k = 0; k < na; ++k)
          jrow[k] = w.fixed[vars[k]] ? 0.0 : w.cscale[j] * co[k] * w.vscale[vars[k]];
      } else {
        term.value_grad_hess(w.xu.data(), lg, lh);
        for (int k = 0; k < na; ++k)
          jrow[k] = w.fixed[vars[k]] ? 0.0 : w.cscale[j] * lg(k) * w.vscale[vars[k]];
      }
      const int slack = w.slack_of_con[j];
      auto col_of = [&](int k) { return k < na ? vars[k] : w.n + slack; };
      const int ncols = na + (slack >= 0 ? 1 : 0);
      if (slack >= 0) jrow[na] = -1.0;
      for (int a1 = 0; a1 < ncols; ++a1) {
        g(col_of(a1)) += jrow[a1] * e[j];
        for (int a2 = 0; a2 <= a1; ++a2)
          trip.emplace_back(std::max(col_of(a1), col_of(a2)),
                            std::min(col_of(a1), col_of(a2)), jrow[a1] * jrow[a2]);
      }
    }
    for (int i = 0; i < w.nt; ++i) trip.emplace_back(i, i, lambda);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt(a);
    if (ldlt.info() != Eigen::Success) {
      lambda *= 10.0;
      continue;
    }
    dx = ldlt.solve(-g);
    if (!dx.allFinite()) {
      lambda *= 10.0;
      continue;
    }
    // Projected backtracking on ||e||^2: blocked coordinates stick to their
    // bounds instead of collapsing the whole step.
    double alpha = 1.0;
    const double theta2_0 = [&] {
      double s = 0;
      for (double v : e) s += v * v;
      return s;
    }();
    auto clamp_interior = [&](double v, int i) {
      if (std::isfinite(w.bl[i])) {
        const double margin = 1e-9 * std::max(1.0, std::abs(w.bl[i]));
        v = std::max(v, w.bl[i] + margin);
      }
      if (std::isfinite(w.bu[i])) {
        const double margin = 1e-9 * std::max(1.0, std::abs(w.bu[i]));
        v = std::min(v, w.bu[i] - margin);
      }
      return v;
    };
    std::vector<double> xt(w.nt), et(w.m);
    bool ok = false;
    for (int ls = 0; ls < 20; ++ls) {
      for (int i = 0; i < w.nt; ++i) xt[i] = clamp_interior(xs[i] + alpha * dx(i), i);
      double fu;
      if (eval_values(w, xt, &fu, &et)) {
        double s = 0;
        for (double v : et) s += v * v;
        if (s < theta2_0 * (1.0 - 1e-8 * alpha)) {
          ok = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (log) {
      char buf[120];
      std::snprintf(buf, sizeof buf, "      rest it=%d theta=%.3e lam=%.1e alpha=%.2e ok=%d",
                    it, theta, lambda, alpha, ok ? 1 : 0);
      log(buf);
    }
    if (!ok) {
      lambda *= 10.0;
      if (lambda > 1e12) break;
      continue;
    }
    xs = xt;
    e = et;
    theta = inf_norm(e);
    lambda = std::max(1e-10, lambda / 3.0);
  }
  return theta;
}

}  // namespace

IpmResult solve_ipm(const Problem& p, const IpmOptions& opt,
                    std::span<const double> x_warm, std::span<const double> y_warm) {
  IpmResult res;
  Work w;
  w.p = &p;
  w.n = p.n_vars();
  w.m = p.n_cons();
  w.vscale = p.var_scale();
  for (double s : w.vscale)
    if (!(s > 0)) {
      res.message = "nonpositive variable scale";
      return res;
    }

  // Slack layout.
  w.slack_of_con.assign(w.m, -1);
  w.rhs_eq.assign(w.m, 0.0);
  const auto& cons = p.constraints();
  for (int j = 0; j < w.m; ++j) {
    if (!cons[j].is_equality()) w.slack_of_con[j] = w.mi++;
  }
  w.nt = w.n + w.mi;
  w.xu.resize(w.n);

  // Scaled bounds for variables and slacks (constraint scales are set below,
  // slack bounds are filled after cscale is known). Variables with coincident
  // bounds become parameters: no barrier terms, zeroed KKT coupling, unit
  // diagonal pivot and a zero step.
  w.bl.assign(w.nt, -kInf);
  w.bu.assign(w.nt, kInf);
  w.fixed.assign(w.nt, 0);
  for (int i = 0; i < w.n; ++i) {
    w.bl[i] = p.lb()[i] / w.vscale[i];
    w.bu[i] = p.ub()[i] / w.vscale[i];
    if (std::isfinite(w.bl[i]) && std::isfinite(w.bu[i]) &&
        w.bu[i] - w.bl[i] <= 1e-10 * std::max(1.0, std::abs(w.bu[i]))) {
      w.fixed[i] = 1;
    }
  }

  // Initial point, pushed strictly inside bounds.
  std::vector<double> xs(w.nt, 0.0);
  for (int i = 0; i < w.n; ++i) {
    if (w.fixed[i]) {
      xs[i] = 0.5 * (w.bl[i] + w.bu[i]);
      w.bl[i] = -kInf;
      w.bu[i] = kInf;
      continue;
    }
    double x0 = (x_warm.size() == static_cast<std::size_t>(w.n) ? x_warm[i] : p.x0()[i]) /
                w.vscale[i];
    const double lo = w.bl[i], hi = w.bu[i];
    if (std::isfinite(lo) && std::isfinite(hi)) {
      const double pl = std::min(opt.bound_push * std::max(1.0, std::abs(lo)),
                                 0.5 * (hi - lo));
      const double pu = std::min(opt.bound_push * std::max(1.0, std::abs(hi)),
                                 0.5 * (hi - lo));
      x0 = std::clamp(x0, lo + pl, hi - pu);
    } else if (std::isfinite(lo)) {
      x0 = std::max(x0, lo + opt.bound_push * std::max(1.0, std::abs(lo)));
    } else if (std::isfinite(hi)) {
      x0 = std::min(x0, hi - opt.bound_push * std::max(1.0, std::abs(hi)));
    }
    xs[i] = x0;
  }

  // Gradient-based objective/constraint scaling at the initial point.
  // Linear terms expose static coefficients and may have any arity; only
  // nonlinear terms go through the (arity-capped) AD path.
  w.unscale_into_xu(xs);
  LocalVec lg;
  LocalMat lh;
  const auto local_grad = [&](const Term& t, std::size_t k) {
    return t.is_linear() ? static_cast<const LinearTerm&>(t).coeffs()[k]
                         : lg(static_cast<int>(k));
  };
  {
    std::vector<double> g(w.n, 0.0);
    for (const auto& t : p.objective()) {
      if (!t->is_linear()) t->value_grad_hess(w.xu.data(), lg, lh);
      const auto& vars = t->vars();
      for (std::size_t k = 0; k < vars.size(); ++k)
        g[vars[k]] += local_grad(*t, k) * w.vscale[vars[k]];
    }
    const double gmax = inf_norm(g);
    w.fscale = (gmax > 100.0) ? 100.0 / gmax : 1.0;
  }
  w.cscale.assign(w.m, 1.0);
  for (int j = 0; j < w.m; ++j) {
    if (!cons[j].term->is_linear()) cons[j].term->value_grad_hess(w.xu.data(), lg, lh);
    const auto& vars = cons[j].term->vars();
    double gmax = 0;
    for (std::size_t k = 0; k < vars.size(); ++k)
      gmax = std::max(gmax, std::abs(local_grad(*cons[j].term, k)) * w.vscale[vars[k]]);
    w.cscale[j] = (gmax > 100.0) ? 100.0 / gmax : 1.0;
    if (cons[j].is_equality()) w.rhs_eq[j] = cons[j].lo * w.cscale[j];
  }
  for (int j = 0; j < w.m; ++j) {
    if (w.slack_of_con[j] >= 0) {
      const int si = w.n + w.slack_of_con[j];
      w.bl[si] = std::isfinite(cons[j].lo) ? cons[j].lo * w.cscale[j] : -kInf;
      w.bu[si] = std::isfinite(cons[j].hi) ? cons[j].hi * w.cscale[j] : kInf;
    }
  }

  // Initialize slacks at the constraint values, pushed inside their bounds.
  {
    std::vector<double> c0(w.m);
    for (int j = 0; j < w.m; ++j) c0[j] = cons[j].term->value(w.xu.data()) * w.cscale[j];
    for (int j = 0; j < w.m; ++j) {
      if (w.slack_of_con[j] < 0) continue;
      const int si = w.n + w.slack_of_con[j];
      double s0 = c0[j];
      const double lo = w.bl[si], hi = w.bu[si];
      const double width = (std::isfinite(lo) && std::isfinite(hi)) ? hi - lo : 1.0;
      if (std::isfinite(lo))
        s0 = std::max(s0, lo + std::min(opt.bound_push * std::max(1.0, std::abs(lo)),
                                        0.5 * width));
      if (std::isfinite(hi))
        s0 = std::min(s0, hi - std::min(opt.bound_push * std::max(1.0, std::abs(hi)),
                                        0.5 * width));
      xs[si] = s0;
    }
  }

  double mu = opt.mu_init;
  std::vector<double> y(w.m, 0.0);
  if (y_warm.size() == static_cast<std::size_t>(w.m))
    y.assign(y_warm.begin(), y_warm.end());
  std::vector<double> zl(w.nt, 0.0), zu(w.nt, 0.0);
  auto dl_of = [&](int i) { return xs[i] - w.bl[i]; };
  auto du_of = [&](int i) { return w.bu[i] - xs[i]; };
  for (int i = 0; i < w.nt; ++i) {
    if (std::isfinite(w.bl[i])) zl[i] = std::clamp(mu / dl_of(i), 1e-8, 1e8);
    if (std::isfinite(w.bu[i])) zu[i] = std::clamp(mu / du_of(i), 1e-8, 1e8);
  }

  const int kn = w.nt + w.m;
  Eigen::SparseMatrix<double> kktm(kn, kn);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                        Eigen::AMDOrdering<int>>
      ldlt;
  bool pattern_analyzed = false;

  w.grad.assign(w.nt, 0.0);
  w.e.assign(w.m, 0.0);
  std::vector<double> jt_y(w.nt), rd(w.nt);
  Eigen::VectorXd rhs(kn), sol(kn), resid(kn);

  double delta_w_last = 0.0;
  int consecutive_small_steps = 0;
  IpmResult::Status status = IpmResult::Status::kMaxIter;
  std::string message;

  // Filter line search state (theta = ||e||_1, phi = barrier objective).
  struct FilterEntry {
    double theta, phi;
  };
  std::vector<FilterEntry> filter;
  double theta_min = -1, theta_max = -1;  // set from the first iterate
  constexpr double kGammaTheta = 1e-5, kGammaPhi = 1e-5;
  constexpr double kSTheta = 1.1, kSPhi = 2.3, kDeltaSw = 1.0;

  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    // ---- Derivative evaluation -------------------------------------------
    w.unscale_into_xu(xs);
    std::fill(w.grad.begin(), w.grad.end(), 0.0);
    w.kkt.clear();

    double f = 0;
    bool eval_ok = true;
    for (const auto& t : p.objective()) {
      const auto& vars = t->vars();
      const int a = t->arity();
      double v;
      if (t->is_linear()) {
        v = t->value(w.xu.data());
        const auto& co = static_cast<const LinearTerm&>(*t).coeffs();
        for (int k = 0; k < a; ++k)
          w.grad[vars[k]] += w.fscale * co[k] * w.vscale[vars[k]];
      } else {
        v = t->value_grad_hess(w.xu.data(), lg, lh);
        if (!lg.allFinite() || !lh.allFinite()) eval_ok = false;
        for (int k = 0; k < a; ++k)
          w.grad[vars[k]] += w.fscale * lg(k) * w.vscale[vars[k]];
        // All structural entries are always emplaced (zeros included) so the
        // KKT pattern stays fixed across iterations.
        for (int r = 0; r < a; ++r)
          for (int c = 0; c <= r; ++c) {
            const int gr = vars[r], gc = vars[c];
            const double v2 = (w.fixed[gr] || w.fixed[gc])
                                  ? 0.0
                                  : w.fscale * lh(r, c) * w.vscale[gr] * w.vscale[gc];
            w.kkt.emplace_back(std::max(gr, gc), std::min(gr, gc), v2);
          }
      }
      if (!is_finite(v)) eval_ok = false;
      f += v;
    }
    w.f = f * w.fscale;

    for (int j = 0; j < w.m; ++j) {
      const auto& term = *cons[j].term;
      const auto& vars = term.vars();
      const int a = term.arity();
      const int row = w.nt + j;
      double cv;
      if (term.is_linear()) {
        cv = term.value(w.xu.data()) * w.cscale[j];
        const auto& co = static_cast<const LinearTerm&>(term).coeffs();
        for (int k = 0; k < a; ++k)
          w.kkt.emplace_back(row, vars[k],
                             w.fixed[vars[k]] ? 0.0
                                              : w.cscale[j] * co[k] * w.vscale[vars[k]]);
      } else {
        cv = term.value_grad_hess(w.xu.data(), lg, lh) * w.cscale[j];
        if (!lg.allFinite() || !lh.allFinite()) {
          eval_ok = false;
          if (opt.log) opt.log("      non-finite derivatives in constraint " + std::to_string(j));
        }
        for (int k = 0; k < a; ++k)
          w.kkt.emplace_back(row, vars[k],
                             w.fixed[vars[k]] ? 0.0
                                              : w.cscale[j] * lg(k) * w.vscale[vars[k]]);
        const double wj = y[j] * w.cscale[j];
        for (int r = 0; r < a; ++r)
          for (int c = 0; c <= r; ++c) {
            const int gr = vars[r], gc = vars[c];
            const double v2 = (w.fixed[gr] || w.fixed[gc])
                                  ? 0.0
                                  : wj * lh(r, c) * w.vscale[gr] * w.vscale[gc];
            w.kkt.emplace_back(std::max(gr, gc), std::min(gr, gc), v2);
          }
      }
      if (!is_finite(cv)) eval_ok = false;
      w.e[j] = cv - (w.slack_of_con[j] < 0 ? w.rhs_eq[j]
                                           : xs[w.n + w.slack_of_con[j]]);
      if (w.slack_of_con[j] >= 0)
        w.kkt.emplace_back(row, w.n + w.slack_of_con[j], -1.0);
    }
    if (!eval_ok) {
      status = IpmResult::Status::kNumericalError;
      message = "non-finite function evaluation at iterate";
      break;
    }

    // ---- Optimality errors -----------------------------------------------
    // J^T y accumulated from the Jacobian triplets (rows >= nt at this point
    // are exactly the constraint rows; barrier/regularization diagonals are
    // appended later).
    std::fill(jt_y.begin(), jt_y.end(), 0.0);
    std::vector<double> sigma(w.nt, 0.0);
    for (const auto& t : w.kkt) {
      if (t.row() >= w.nt && t.col() < w.nt) jt_y[t.col()] += t.value() * y[t.row() - w.nt];
    }
    for (int i = 0; i < w.nt; ++i) {
      if (std::isfinite(w.bl[i])) sigma[i] += zl[i] / dl_of(i);
      if (std::isfinite(w.bu[i])) sigma[i] += zu[i] / du_of(i);
    }

    double y_norm1 = 0, z_norm1 = 0;
    int n_bnd = 0;
    for (int j = 0; j < w.m; ++j) y_norm1 += std::abs(y[j]);
    for (int i = 0; i < w.nt; ++i) {
      if (std::isfinite(w.bl[i])) {
        z_norm1 += std::abs(zl[i]);
        ++n_bnd;
      }
      if (std::isfinite(w.bu[i])) {
        z_norm1 += std::abs(zu[i]);
        ++n_bnd;
      }
    }
    const double sd =
        std::max(100.0, (y_norm1 + z_norm1) / std::max(1, w.m + n_bnd)) / 100.0;
    const double sc = std::max(100.0, z_norm1 / std::max(1, n_bnd)) / 100.0;

    double dual_err = 0, compl0 = 0, compl_mu = 0;
    for (int i = 0; i < w.nt; ++i) {
      if (w.fixed[i]) {
        rd[i] = 0.0;
        continue;
      }
      const double r = w.grad[i] + jt_y[i] -
                       (std::isfinite(w.bl[i]) ? zl[i] : 0.0) +
                       (std::isfinite(w.bu[i]) ? zu[i] : 0.0);
      rd[i] = r;
      dual_err = std::max(dual_err, std::abs(r));
      if (std::isfinite(w.bl[i])) {
        const double cl = zl[i] * dl_of(i);
        compl0 = std::max(compl0, std::abs(cl));
        compl_mu = std::max(compl_mu, std::abs(cl - mu));
      }
      if (std::isfinite(w.bu[i])) {
        const double cu = zu[i] * du_of(i);
        compl0 = std::max(compl0, std::abs(cu));
        compl_mu = std::max(compl_mu, std::abs(cu - mu));
      }
    }
    const double feas = inf_norm(w.e);
    const double kkt0 = std::max(dual_err / sd, compl0 / sc);
    res.trace.push_back({iter, w.f / w.fscale, feas, dual_err / sd, mu, 0.0, delta_w_last});
    if (opt.log) {
      int arg = 0;
      for (int i = 0; i < w.nt; ++i)
        if (std::abs(rd[i]) > std::abs(rd[arg])) arg = i;
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "ipm %4d f=%.8e feas=%.2e dual=%.2e mu=%.1e rdmax@%s", iter,
                    w.f / w.fscale, feas, dual_err / sd, mu,
                    arg < w.n ? p.names()[arg].c_str() : "slack");
      opt.log(buf);
    }

    if (kkt0 <= opt.tol_kkt && feas <= opt.tol_feas) {
      status = IpmResult::Status::kConverged;
      break;
    }

    // Barrier parameter update (monotone); the filter resets with mu.
    {
      bool mu_changed = false;
      while (std::max({dual_err / sd, compl_mu / sc, feas}) <= kKappaEps * mu &&
             mu > opt.tol_kkt / 10.0) {
        mu = std::max(opt.tol_kkt / 10.0,
                      std::min(kKappaMu * mu, std::pow(mu, kThetaMu)));
        mu_changed = true;
        compl_mu = 0;
        for (int i = 0; i < w.nt; ++i) {
          if (std::isfinite(w.bl[i]))
            compl_mu = std::max(compl_mu, std::abs(zl[i] * dl_of(i) - mu));
          if (std::isfinite(w.bu[i]))
            compl_mu = std::max(compl_mu, std::abs(zu[i] * du_of(i) - mu));
        }
      }
      if (mu_changed) filter.clear();
    }
    const double tau = std::max(0.99, 1.0 - mu);

    // ---- KKT assembly + inertia-corrected factorization ------------------
    const std::size_t base_size = w.kkt.size();
    for (int i = 0; i < w.nt; ++i) w.kkt.emplace_back(i, i, sigma[i]);
    w.dw_slot_begin = static_cast<int>(w.kkt.size());
    for (int i = 0; i < w.nt; ++i) w.kkt.emplace_back(i, i, 0.0);
    const double delta_c = 1e-8 * std::pow(std::max(mu, 1e-20), 0.25);
    w.dc_slot_begin = static_cast<int>(w.kkt.size());
    for (int j = 0; j < w.m; ++j) w.kkt.emplace_back(w.nt + j, w.nt + j, -delta_c);
    (void)base_size;

    double delta_w = 0.0;
    bool factorized = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      for (int i = 0; i < w.nt; ++i)
        w.kkt[w.dw_slot_begin + i] =
            Eigen::Triplet<double>(i, i, w.fixed[i] ? 1.0 : delta_w);
      kktm.setFromTriplets(w.kkt.begin(), w.kkt.end());
      if (!pattern_analyzed) {
        ldlt.analyzePattern(kktm);
        pattern_analyzed = true;
      }
      ldlt.factorize(kktm);
      bool ok = (ldlt.info() == Eigen::Success);
      if (ok) {
        int pos = 0, neg = 0, zero = 0;
        const auto& d = ldlt.vectorD();
        for (int i = 0; i < d.size(); ++i) {
          if (!std::isfinite(d(i)) || std::abs(d(i)) < 1e-300)
            ++zero;
          else if (d(i) > 0)
            ++pos;
          else
            ++neg;
        }
        ok = (zero == 0 && pos == w.nt && neg == w.m);
        if (!ok && opt.log) {
          char buf[120];
          std::snprintf(buf, sizeof buf,
                        "      inertia pos=%d/%d neg=%d/%d zero=%d dw=%.1e", pos,
                        w.nt, neg, w.m, zero, delta_w);
          opt.log(buf);
          if (delta_w > 1e20) {
            for (int i = 0; i < d.size(); ++i) {
              if (!std::isfinite(d(i)) || std::abs(d(i)) < 1e-300) {
                const int orig = ldlt.permutationPinv().indices()(i);
                std::snprintf(buf, sizeof buf,
                              "      bad pivot %d -> entry %d (%s) d=%g", i, orig,
                              orig < w.n ? p.names()[orig].c_str()
                                         : (orig < w.nt ? "slack" : "conrow"),
                              d(i));
                opt.log(buf);
              }
            }
          }
        }
      } else if (opt.log) {
        opt.log("      factorize: numerical issue dw=" + std::to_string(delta_w));
      }
      if (ok) {
        factorized = true;
        break;
      }
      delta_w = (delta_w == 0.0)
                    ? std::max(1e-20, (delta_w_last == 0.0 ? 1e-4 : delta_w_last / 3.0))
                    : delta_w * 8.0;
      if (delta_w > 1e40) break;
    }
    if (!factorized) {
      status = IpmResult::Status::kNumericalError;
      message = "KKT factorization failed (inertia correction exhausted)";
      break;
    }
    if (delta_w > 0) delta_w_last = delta_w;

    // ---- Step computation -------------------------------------------------
    for (int i = 0; i < w.nt; ++i) {
      if (w.fixed[i]) {
        rhs(i) = 0.0;
        continue;
      }
      double g = w.grad[i] + jt_y[i];
      if (std::isfinite(w.bl[i])) g -= mu / dl_of(i);
      if (std::isfinite(w.bu[i])) g += mu / du_of(i);
      rhs(i) = -g;
    }
    for (int j = 0; j < w.m; ++j) rhs(w.nt + j) = -w.e[j];
    sol = ldlt.solve(rhs);
    // One round of iterative refinement.
    resid = rhs - kktm.selfadjointView<Eigen::Lower>() * sol;
    sol += ldlt.solve(resid);
    if (!sol.allFinite()) {
      status = IpmResult::Status::kNumericalError;
      message = "KKT solve produced non-finite step";
      break;
    }

    // Bound multiplier steps.
    std::vector<double> dzl(w.nt, 0.0), dzu(w.nt, 0.0);
    for (int i = 0; i < w.nt; ++i) {
      if (std::isfinite(w.bl[i]))
        dzl[i] = mu / dl_of(i) - zl[i] - (zl[i] / dl_of(i)) * sol(i);
      if (std::isfinite(w.bu[i]))
        dzu[i] = mu / du_of(i) - zu[i] + (zu[i] / du_of(i)) * sol(i);
    }

    // Fraction-to-boundary step limits.
    double alpha_max = 1.0, alpha_z = 1.0;
    for (int i = 0; i < w.nt; ++i) {
      if (std::isfinite(w.bl[i]) && sol(i) < 0)
        alpha_max = std::min(alpha_max, -tau * dl_of(i) / sol(i));
      if (std::isfinite(w.bu[i]) && sol(i) > 0)
        alpha_max = std::min(alpha_max, tau * du_of(i) / sol(i));
      if (std::isfinite(w.bl[i]) && dzl[i] < 0)
        alpha_z = std::min(alpha_z, -tau * zl[i] / dzl[i]);
      if (std::isfinite(w.bu[i]) && dzu[i] < 0)
        alpha_z = std::min(alpha_z, -tau * zu[i] / dzu[i]);
    }

    // ---- Filter line search -------------------------------------------------
    auto barrier = [&](const std::vector<double>& xv, double fv) {
      double phi = fv;
      for (int i = 0; i < w.nt; ++i) {
        if (std::isfinite(w.bl[i])) phi -= mu * std::log(xv[i] - w.bl[i]);
        if (std::isfinite(w.bu[i])) phi -= mu * std::log(w.bu[i] - xv[i]);
      }
      return phi;
    };
    auto e_norm1 = [&](const std::vector<double>& ev) {
      double s = 0;
      for (double v : ev) s += std::abs(v);
      return s;
    };

    double grad_phi_dx = 0;
    for (int i = 0; i < w.nt; ++i) {
      double g = w.grad[i];
      if (std::isfinite(w.bl[i])) g -= mu / dl_of(i);
      if (std::isfinite(w.bu[i])) g += mu / du_of(i);
      grad_phi_dx += g * sol(i);
    }

    const double theta0 = e_norm1(w.e);
    const double phi0 = barrier(xs, w.f);
    if (theta_min < 0) {
      theta_min = 1e-4 * std::max(1.0, theta0);
      theta_max = 1e4 * std::max(1.0, theta0);
    }

    auto filter_blocks = [&](double th, double ph) {
      if (th > theta_max) return true;
      for (const auto& fe : filter) {
        if (th >= (1.0 - kGammaTheta) * fe.theta && ph >= fe.phi - kGammaPhi * fe.theta)
          return true;
      }
      return false;
    };
    // Acceptance of a trial point at step fraction a against the current
    // point: either an f-type (Armijo on the barrier, only when feasibility
    // is already small and the model predicts sufficient descent) or an
    // h-type (progress in the filter sense).
    bool augment_filter = false;
    auto acceptable = [&](double th, double ph, double a) {
      if (filter_blocks(th, ph)) return false;
      const double m_alpha = a * grad_phi_dx;
      const bool switching =
          theta0 <= theta_min && m_alpha < 0 &&
          std::pow(-m_alpha, kSPhi) > kDeltaSw * std::pow(theta0, kSTheta);
      if (switching) {
        if (ph <= phi0 + kArmijoEta * m_alpha) {
          augment_filter = false;
          return true;
        }
        return false;
      }
      if (th <= (1.0 - kGammaTheta) * theta0 || ph <= phi0 - kGammaPhi * theta0) {
        augment_filter = true;
        return true;
      }
      return false;
    };

    std::vector<double> xtrial(w.nt), etrial(w.m);
    double alpha = alpha_max;
    bool accepted = false;
    for (int ls = 0; ls < opt.max_ls; ++ls) {
      for (int i = 0; i < w.nt; ++i) xtrial[i] = xs[i] + alpha * sol(i);
      double ftrial;
      if (eval_values(w, xtrial, &ftrial, &etrial)) {
        if (acceptable(e_norm1(etrial), barrier(xtrial, ftrial), alpha)) {
          accepted = true;
          break;
        }
        // Second-order correction on the first rejection when infeasibility
        // grew: re-solve with the corrected constraint right-hand side.
        if (ls == 0 && e_norm1(etrial) >= theta0) {
          Eigen::VectorXd rhs2 = rhs;
          for (int j = 0; j < w.m; ++j) rhs2(w.nt + j) = -(etrial[j] + alpha * w.e[j]);
          Eigen::VectorXd sol2 = ldlt.solve(rhs2);
          if (sol2.allFinite()) {
            double amax2 = 1.0;
            for (int i = 0; i < w.nt; ++i) {
              if (std::isfinite(w.bl[i]) && sol2(i) < 0)
                amax2 = std::min(amax2, -tau * dl_of(i) / sol2(i));
              if (std::isfinite(w.bu[i]) && sol2(i) > 0)
                amax2 = std::min(amax2, tau * du_of(i) / sol2(i));
            }
            for (int i = 0; i < w.nt; ++i) xtrial[i] = xs[i] + amax2 * sol2(i);
            double fsoc;
            if (eval_values(w, xtrial, &fsoc, &etrial) &&
                acceptable(e_norm1(etrial), barrier(xtrial, fsoc), amax2)) {
              accepted = true;
              for (int i = 0; i < w.nt; ++i) sol(i) = sol2(i);
              for (int j = 0; j < w.m; ++j) sol(w.nt + j) = sol2(w.nt + j);
              alpha = amax2;
              break;
            }
          }
        }
      }
      alpha *= 0.5;
    }
    if (accepted && augment_filter) {
      filter.push_back({(1.0 - kGammaTheta) * theta0, phi0 - kGammaPhi * theta0});
    }
    if (!accepted) {
      // Keep the smallest step rather than stopping outright; repeated
      // failures escalate below.
      alpha = std::min(1e-12, alpha_max);
      for (int i = 0; i < w.nt; ++i) xtrial[i] = xs[i] + alpha * sol(i);
    }

    xs = xtrial;
    for (int j = 0; j < w.m; ++j) y[j] += alpha * sol(w.nt + j);
    for (int i = 0; i < w.nt; ++i) {
      if (std::isfinite(w.bl[i])) {
        zl[i] += alpha_z * dzl[i];
        const double d = dl_of(i);
        zl[i] = std::clamp(zl[i], mu / (kKappaSigma * d), kKappaSigma * mu / d);
      }
      if (std::isfinite(w.bu[i])) {
        zu[i] += alpha_z * dzu[i];
        const double d = du_of(i);
        zu[i] = std::clamp(zu[i], mu / (kKappaSigma * d), kKappaSigma * mu / d);
      }
    }
    res.trace.back().alpha = alpha;
    res.trace.back().delta_w = delta_w;

    if (opt.log) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "      alpha=%.2e alpha_max=%.2e dw=%.1e filter=%zu",
                    alpha, alpha_max, delta_w, filter.size());
      opt.log(buf);
    }
    if (alpha < 1e-10) {
      ++consecutive_small_steps;
      if (consecutive_small_steps == 2) {
        // Restoration phase: pull the iterate back toward the constraint
        // manifold, then restart the barrier machinery from there.
        const double theta_before = inf_norm(w.e);
        const double achieved = restore_feasibility(
            w, xs, std::max(opt.tol_feas, 1e-4 * theta_before), 60, opt.log);
        if (opt.log)
          opt.log("      restoration: theta " + std::to_string(theta_before) +
                  " -> " + std::to_string(achieved));
        if (achieved < 0.9 * theta_before) {
          std::fill(y.begin(), y.end(), 0.0);
          mu = std::max(mu, 1e-2);
          for (int i = 0; i < w.nt; ++i) {
            if (std::isfinite(w.bl[i])) zl[i] = std::clamp(mu / dl_of(i), 1e-8, 1e8);
            if (std::isfinite(w.bu[i])) zu[i] = std::clamp(mu / du_of(i), 1e-8, 1e8);
          }
          filter.clear();
          theta_min = theta_max = -1;
          consecutive_small_steps = 0;
        }
      } else if (consecutive_small_steps >= 4) {
        status = IpmResult::Status::kStalled;
        message = "line search stalled";
        break;
      }
    } else {
      consecutive_small_steps = 0;
    }
  }

  // ---- Final report --------------------------------------------------------
  res.status = status;
  res.message = message;
  res.iterations = iter;
  res.x.resize(w.n);
  w.unscale_into_xu(xs);
  res.x = w.xu;
  res.y = y;
  res.objective = p.eval_objective(res.x.data());
  {
    double f;
    std::vector<double> e(w.m);
    if (eval_values(w, xs, &f, &e)) {
      res.feas_error = inf_norm(e);
    }
    res.kkt_error = res.trace.empty() ? kInf : res.trace.back().dual;
  }
  return res;
}

}  // namespace pemopt::nlp
