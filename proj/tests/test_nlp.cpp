#include <doctest.h>

#include <cmath>
#include <span>

#include "pemopt/nlp/dual.hpp"
#include "pemopt/nlp/ipm.hpp"
#include "pemopt/nlp/problem.hpp"

using namespace pemopt::nlp;

namespace {

// Finite-difference check of a FnTerm's gradient and Hessian.
template <class F>
void check_derivatives(F f, std::vector<double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<int> vars(n);
  for (int i = 0; i < n; ++i) vars[i] = i;
  auto term = make_term(vars, f);
  LocalVec g;
  LocalMat h;
  term->value_grad_hess(x.data(), g, h);

  const double eps = 1e-6;
  for (int i = 0; i < n; ++i) {
    auto xp = x, xm = x;
    xp[i] += eps;
    xm[i] -= eps;
    const double fd = (term->value(xp.data()) - term->value(xm.data())) / (2 * eps);
    CHECK(g(i) == doctest::Approx(fd).epsilon(1e-5));
    LocalVec gp, gm;
    LocalMat hp;
    term->value_grad_hess(xp.data(), gp, hp);
    term->value_grad_hess(xm.data(), gm, hp);
    for (int j = 0; j < n; ++j) {
      const double hd = (gp(j) - gm(j)) / (2 * eps);
      CHECK(h(i, j) == doctest::Approx(hd).epsilon(1e-4).scale(1.0));
    }
  }
}

}  // namespace

TEST_CASE("dual2 derivatives of a composite expression") {
  auto f = []<class S>(std::span<const S> v) -> S {
    using std::asinh;
    using std::exp;
    using std::log;
    using std::sqrt;
    const S& a = v[0];
    const S& b = v[1];
    const S& c = v[2];
    return a * asinh(b / (2.0 * 0.3)) + exp(-1.3 * c) * log(a + 2.0) / sqrt(b + 3.0) -
           a * b * c + 0.5 * (a / c);
  };
  check_derivatives(f, {1.2, 0.7, 1.9});
}

TEST_CASE("dual2 constants mix transparently") {
  auto f = []<class S>(std::span<const S> v) -> S {
    S acc = 3.0;  // constant seed
    acc = acc + v[0] * 2.0;
    acc = acc - 1.0 / v[0];
    return acc;
  };
  check_derivatives(f, {0.8});
}

TEST_CASE("ipm solves HS71") {
  Problem p;
  for (int i = 0; i < 4; ++i) p.add_var("x" + std::to_string(i), 1.0, 5.0, 0.0);
  std::vector<double> x0{1.0, 5.0, 5.0, 1.0};
  p.set_x0(x0);
  p.add_objective(make_term({0, 1, 2, 3}, []<class S>(std::span<const S> v) -> S {
    return v[0] * v[3] * (v[0] + v[1] + v[2]) + v[2];
  }));
  p.add_constraint(25.0, make_term({0, 1, 2, 3},
                                   []<class S>(std::span<const S> v) -> S {
                                     return v[0] * v[1] * v[2] * v[3];
                                   }),
                   kInf);
  p.add_eq(make_term({0, 1, 2, 3},
                     []<class S>(std::span<const S> v) -> S {
                       return v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
                     }),
           40.0);

  const auto res = solve_ipm(p);
  REQUIRE(res.ok());
  CHECK(res.objective == doctest::Approx(17.0140173).epsilon(1e-5));
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(res.x[1] == doctest::Approx(4.742994).epsilon(1e-3));
  CHECK(res.x[2] == doctest::Approx(3.8211503).epsilon(1e-3));
  CHECK(res.x[3] == doctest::Approx(1.3794082).epsilon(1e-3));
  CHECK(res.feas_error <= 1e-8);
}

TEST_CASE("ipm solves a bound-constrained rosenbrock") {
  Problem p;
  p.add_var("x", -2.0, 2.0, -1.2);
  p.add_var("y", -1.0, 3.0, 1.0);
  p.add_objective(make_term({0, 1}, []<class S>(std::span<const S> v) -> S {
    const S a = 1.0 - v[0];
    const S b = v[1] - v[0] * v[0];
    return a * a + 100.0 * b * b;
  }));
  const auto res = solve_ipm(p);
  REQUIRE(res.ok());
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("ipm respects active bounds in a linear program") {
  // min x + 2y s.t. x + y >= 1, x,y in [0, 10]; optimum at (1, 0).
  Problem p;
  p.add_var("x", 0.0, 10.0, 5.0);
  p.add_var("y", 0.0, 10.0, 5.0);
  p.add_objective(make_linear({0, 1}, {1.0, 2.0}));
  p.add_constraint(1.0, make_linear({0, 1}, {1.0, 1.0}), kInf);
  const auto res = solve_ipm(p);
  REQUIRE(res.ok());
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.x[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
}

TEST_CASE("ipm handles scaled variables") {
  // Same QP expressed in wildly different units; scales bring it back.
  Problem p;
  p.add_var("big", 0.0, 1e9, 1e6, 1e6);
  p.add_var("small", 0.0, 1e-3, 1e-4, 1e-4);
  p.add_objective(make_term({0, 1}, []<class S>(std::span<const S> v) -> S {
    const S a = v[0] * 1e-6 - 0.25;
    const S b = v[1] * 1e4 - 0.5;
    return a * a + b * b;
  }));
  const auto res = solve_ipm(p);
  REQUIRE(res.ok());
  CHECK(res.x[0] * 1e-6 == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(res.x[1] * 1e4 == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("ipm reports failure on an infeasible system") {
  // x >= 2 and x <= 1 cannot hold: encoded as two constraints.
  Problem p;
  p.add_var("x", -10.0, 10.0, 0.0);
  p.add_constraint(2.0, make_linear({0}, {1.0}), kInf);
  p.add_constraint(-kInf, make_linear({0}, {1.0}), 1.0);
  IpmOptions opt;
  opt.max_iter = 150;
  const auto res = solve_ipm(p, opt);
  CHECK_FALSE(res.ok());
}

TEST_CASE("ipm equality-only quadratic") {
  // min (x-3)^2 + (y+1)^2 s.t. x + y = 1 -> x = 3.5... compute: gradient
  // condition x - 3 = y + 1 with x + y = 1 gives x = 2.5, y = -1.5.
  Problem p;
  p.add_var("x", -kInf, kInf, 0.0);
  p.add_var("y", -kInf, kInf, 0.0);
  p.add_objective(make_term({0, 1}, []<class S>(std::span<const S> v) -> S {
    const S a = v[0] - 3.0;
    const S b = v[1] + 1.0;
    return a * a + b * b;
  }));
  p.add_eq(make_linear({0, 1}, {1.0, 1.0}), 1.0);
  const auto res = solve_ipm(p);
  REQUIRE(res.ok());
  CHECK(res.x[0] == doctest::Approx(2.5).epsilon(1e-7));
  CHECK(res.x[1] == doctest::Approx(-1.5).epsilon(1e-7));
}
