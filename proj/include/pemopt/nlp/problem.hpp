#pragma once

#include <array>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pemopt/nlp/dual.hpp"

namespace pemopt::nlp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// One scalar expression over a small set of variables. Terms are summed into
// the objective or used as constraint bodies.
class Term {
 public:
  explicit Term(std::vector<int> vars) : vars_(std::move(vars)) {}
  virtual ~Term() = default;

  const std::vector<int>& vars() const { return vars_; }
  int arity() const { return static_cast<int>(vars_.size()); }

  virtual double value(const double* x) const = 0;
  // Returns the value; fills the local gradient and (row-major lower usage is
  // fine, H is symmetric) dense Hessian over vars().
  virtual double value_grad_hess(const double* x, LocalVec& g, LocalMat& h) const = 0;
  virtual bool is_linear() const { return false; }

 protected:
  std::vector<int> vars_;
};

using TermPtr = std::unique_ptr<Term>;

// c0 + sum(coeff_i * x_i). Hessian-free.
class LinearTerm final : public Term {
 public:
  LinearTerm(std::vector<int> vars, std::vector<double> coeffs, double c0 = 0.0)
      : Term(std::move(vars)), coeffs_(std::move(coeffs)), c0_(c0) {}

  double value(const double* x) const override {
    double s = c0_;
    for (std::size_t k = 0; k < vars_.size(); ++k) s += coeffs_[k] * x[vars_[k]];
    return s;
  }
  double value_grad_hess(const double* x, LocalVec& g, LocalMat& h) const override {
    const int n = arity();
    g.resize(n);
    for (int k = 0; k < n; ++k) g(k) = coeffs_[k];
    h.setZero(n, n);
    return value(x);
  }
  bool is_linear() const override { return true; }

  const std::vector<double>& coeffs() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
  double c0_;
};

// Wraps a callable f(span<const S>) -> S evaluated with doubles for values and
// with Dual2 for derivatives.
template <class F>
class FnTerm final : public Term {
 public:
  FnTerm(std::vector<int> vars, F f) : Term(std::move(vars)), f_(std::move(f)) {
    if (arity() > kMaxArity)
      throw std::logic_error("FnTerm arity exceeds kMaxArity");
  }

  double value(const double* x) const override {
    std::array<double, kMaxArity> loc;
    const int n = arity();
    for (int k = 0; k < n; ++k) loc[k] = x[vars_[k]];
    return f_(std::span<const double>(loc.data(), n));
  }

  double value_grad_hess(const double* x, LocalVec& g, LocalMat& h) const override {
    std::array<Dual2, kMaxArity> loc;
    const int n = arity();
    for (int k = 0; k < n; ++k) loc[k] = Dual2::seed(x[vars_[k]], n, k);
    const Dual2 out = f_(std::span<const Dual2>(loc.data(), n));
    if (out.is_const()) {
      g.setZero(n);
      h.setZero(n, n);
    } else {
      g = out.grad();
      h = out.hess();
    }
    return out.value();
  }

 private:
  F f_;
};

template <class F>
TermPtr make_term(std::vector<int> vars, F f) {
  return std::make_unique<FnTerm<F>>(std::move(vars), std::move(f));
}

inline TermPtr make_linear(std::vector<int> vars, std::vector<double> coeffs,
                           double c0 = 0.0) {
  return std::make_unique<LinearTerm>(std::move(vars), std::move(coeffs), c0);
}

struct Constraint {
  TermPtr term;
  double lo = 0.0;
  double hi = 0.0;
  bool is_equality() const { return lo == hi; }
};

// General NLP: min sum(objective terms) s.t. lo <= c(x) <= hi, lb <= x <= ub.
// Variable scales bring each variable to order one inside the solver.
class Problem {
 public:
  int add_var(std::string name, double lb, double ub, double x0, double scale = 1.0) {
    names_.push_back(std::move(name));
    lb_.push_back(lb);
    ub_.push_back(ub);
    x0_.push_back(x0);
    scale_.push_back(scale);
    return static_cast<int>(lb_.size()) - 1;
  }

  void add_objective(TermPtr t) { objective_.push_back(std::move(t)); }
  int add_constraint(double lo, TermPtr t, double hi) {
    cons_.push_back(Constraint{std::move(t), lo, hi});
    return static_cast<int>(cons_.size()) - 1;
  }
  int add_eq(TermPtr t, double rhs = 0.0) { return add_constraint(rhs, std::move(t), rhs); }

  int n_vars() const { return static_cast<int>(lb_.size()); }
  int n_cons() const { return static_cast<int>(cons_.size()); }

  const std::vector<double>& lb() const { return lb_; }
  const std::vector<double>& ub() const { return ub_; }
  const std::vector<double>& x0() const { return x0_; }
  const std::vector<double>& var_scale() const { return scale_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<TermPtr>& objective() const { return objective_; }
  const std::vector<Constraint>& constraints() const { return cons_; }

  void set_x0(std::span<const double> x0) { x0_.assign(x0.begin(), x0.end()); }

  double eval_objective(const double* x) const {
    double f = 0;
    for (const auto& t : objective_) f += t->value(x);
    return f;
  }

 private:
  std::vector<std::string> names_;
  std::vector<double> lb_, ub_, x0_, scale_;
  std::vector<TermPtr> objective_;
  std::vector<Constraint> cons_;
};

}  // namespace pemopt::nlp
