#pragma once

#include <Eigen/Core>
#include <cmath>

namespace pemopt::nlp {

// Largest number of distinct variables a single expression term may touch.
inline constexpr int kMaxArity = 24;

using LocalVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxArity, 1>;
using LocalMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxArity, kMaxArity>;

// Forward-mode scalar carrying value, gradient and dense Hessian over a small
// local variable set. A Dual2 with empty gradient represents a constant;
// binary operators promote as needed, so model code can freely mix doubles
// into expressions.
class Dual2 {
 public:
  Dual2() : v_(0) {}
  Dual2(double v) : v_(v) {}  // NOLINT: implicit by design

  static Dual2 seed(double v, int n, int index) {
    Dual2 d(v);
    d.g_.setZero(n);
    d.g_(index) = 1.0;
    d.h_.setZero(n, n);
    return d;
  }

  double value() const { return v_; }
  bool is_const() const { return g_.size() == 0; }
  const LocalVec& grad() const { return g_; }
  const LocalMat& hess() const { return h_; }

  friend Dual2 operator-(const Dual2& a) {
    Dual2 r(-a.v_);
    if (!a.is_const()) {
      r.g_ = -a.g_;
      r.h_ = -a.h_;
    }
    return r;
  }

  friend Dual2 operator+(const Dual2& a, const Dual2& b) {
    Dual2 r(a.v_ + b.v_);
    if (a.is_const()) {
      r.g_ = b.g_;
      r.h_ = b.h_;
    } else if (b.is_const()) {
      r.g_ = a.g_;
      r.h_ = a.h_;
    } else {
      r.g_ = a.g_ + b.g_;
      r.h_ = a.h_ + b.h_;
    }
    return r;
  }
  friend Dual2 operator-(const Dual2& a, const Dual2& b) { return a + (-b); }

  friend Dual2 operator*(const Dual2& a, const Dual2& b) {
    Dual2 r(a.v_ * b.v_);
    if (a.is_const() && b.is_const()) return r;
    if (a.is_const()) {
      r.g_ = a.v_ * b.g_;
      r.h_ = a.v_ * b.h_;
    } else if (b.is_const()) {
      r.g_ = b.v_ * a.g_;
      r.h_ = b.v_ * a.h_;
    } else {
      r.g_ = a.v_ * b.g_ + b.v_ * a.g_;
      r.h_ = a.v_ * b.h_ + b.v_ * a.h_;
      r.h_.noalias() += a.g_ * b.g_.transpose();
      r.h_.noalias() += b.g_ * a.g_.transpose();
    }
    return r;
  }

  friend Dual2 operator/(const Dual2& a, const Dual2& b) { return a * inverse(b); }

  // Applies a scalar map given f(v), f'(v), f''(v).
  static Dual2 chain(const Dual2& a, double f, double df, double d2f) {
    Dual2 r(f);
    if (!a.is_const()) {
      r.g_ = df * a.g_;
      r.h_ = df * a.h_;
      r.h_.noalias() += d2f * (a.g_ * a.g_.transpose());
    }
    return r;
  }

  friend Dual2 inverse(const Dual2& a) {
    const double inv = 1.0 / a.v_;
    return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
  }

  friend bool operator<(const Dual2& a, const Dual2& b) { return a.v_ < b.v_; }
  friend bool operator>(const Dual2& a, const Dual2& b) { return a.v_ > b.v_; }
  friend bool operator<=(const Dual2& a, const Dual2& b) { return a.v_ <= b.v_; }
  friend bool operator>=(const Dual2& a, const Dual2& b) { return a.v_ >= b.v_; }

 private:
  double v_;
  LocalVec g_;  // empty when constant
  LocalMat h_;
};

inline Dual2 exp(const Dual2& a) {
  const double e = std::exp(a.value());
  return Dual2::chain(a, e, e, e);
}

inline Dual2 log(const Dual2& a) {
  const double inv = 1.0 / a.value();
  return Dual2::chain(a, std::log(a.value()), inv, -inv * inv);
}

inline Dual2 sqrt(const Dual2& a) {
  const double s = std::sqrt(a.value());
  return Dual2::chain(a, s, 0.5 / s, -0.25 / (s * s * s));
}

inline Dual2 asinh(const Dual2& a) {
  const double x = a.value();
  const double w = 1.0 + x * x;
  const double sw = std::sqrt(w);
  return Dual2::chain(a, std::asinh(x), 1.0 / sw, -x / (w * sw));
}

inline double value_of(double x) { return x; }
inline double value_of(const Dual2& x) { return x.value(); }

}  // namespace pemopt::nlp
