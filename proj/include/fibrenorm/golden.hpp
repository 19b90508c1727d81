#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace fibrenorm {

using Integer = mpz_class;
using Rational = mpq_class;

/// Element a + b*gamma of the field Q(gamma), where gamma = (1+sqrt(5))/2
/// is the golden mean, satisfying gamma^2 = gamma + 1. All arithmetic and
/// comparisons are exact; no floating point is used on exact paths.
class GoldenRational {
 public:
  GoldenRational() = default;
  GoldenRational(long v) : a_(v) {}                       // NOLINT implicit
  GoldenRational(Rational a) : a_(std::move(a)) {}        // NOLINT implicit
  GoldenRational(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {}

  static GoldenRational gamma() { return {Rational(0), Rational(1)}; }

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }

  bool is_zero() const { return a_ == 0 && b_ == 0; }
  bool is_rational() const { return b_ == 0; }

  GoldenRational operator-() const { return {-a_, -b_}; }

  GoldenRational& operator+=(const GoldenRational& o) {
    a_ += o.a_;
    b_ += o.b_;
    return *this;
  }
  GoldenRational& operator-=(const GoldenRational& o) {
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
  }
  // (a+bg)(c+dg) = (ac+bd) + (ad+bc+bd)g, using g^2 = g+1.
  GoldenRational& operator*=(const GoldenRational& o) {
    Rational na = a_ * o.a_ + b_ * o.b_;
    Rational nb = a_ * o.b_ + b_ * o.a_ + b_ * o.b_;
    a_ = std::move(na);
    b_ = std::move(nb);
    return *this;
  }
  GoldenRational& operator/=(const GoldenRational& o) { return *this *= o.inverse(); }

  friend GoldenRational operator+(GoldenRational x, const GoldenRational& y) { return x += y; }
  friend GoldenRational operator-(GoldenRational x, const GoldenRational& y) { return x -= y; }
  friend GoldenRational operator*(GoldenRational x, const GoldenRational& y) { return x *= y; }
  friend GoldenRational operator/(GoldenRational x, const GoldenRational& y) { return x /= y; }

  /// Multiplicative inverse via the conjugate a + b(1-gamma):
  /// (a+bg)((a+b)-bg) = a^2 + ab - b^2, a nonzero rational for (a,b) != 0.
  GoldenRational inverse() const {
    if (is_zero()) throw std::domain_error("GoldenRational: division by zero");
    Rational norm = a_ * a_ + a_ * b_ - b_ * b_;
    return {(a_ + b_) / norm, -b_ / norm};
  }

  /// Exact sign. A mixed-sign combination a + bg reduces to comparing the
  /// rational t = -a/b against gamma, decided by the sign of t^2 - t - 1
  /// (gamma is the positive root of X^2 - X - 1).
  int sign() const;

  /// Exact floor, computed by bracketing with Fibonacci convergents of gamma
  /// and adjusting with exact comparisons.
  Integer floor() const;

  double to_double() const;

  std::string str() const;

  friend bool operator==(const GoldenRational& x, const GoldenRational& y) {
    return x.a_ == y.a_ && x.b_ == y.b_;
  }
  friend bool operator!=(const GoldenRational& x, const GoldenRational& y) { return !(x == y); }
  friend bool operator<(const GoldenRational& x, const GoldenRational& y) {
    return (x - y).sign() < 0;
  }
  friend bool operator<=(const GoldenRational& x, const GoldenRational& y) {
    return (x - y).sign() <= 0;
  }
  friend bool operator>(const GoldenRational& x, const GoldenRational& y) { return y < x; }
  friend bool operator>=(const GoldenRational& x, const GoldenRational& y) { return y <= x; }

 private:
  Rational a_{0};
  Rational b_{0};
};

/// Three-way exact comparison: -1, 0, +1.
inline int compare(const GoldenRational& x, const GoldenRational& y) {
  return (x - y).sign();
}

/// Fibonacci numbers with the shifted indexing
/// F_{-2} = 1, F_{-1} = 0, F_0 = 1, F_1 = 1, F_{n+2} = F_{n+1} + F_n.
Integer fib(long n);

/// fib(n) as long; throws if it does not fit.
long fib_long(long n);

/// A point of the circle [0,1) with exact golden-rational coordinate.
class CirclePoint {
 public:
  CirclePoint() = default;  // the point 0

  const GoldenRational& value() const { return t_; }
  double to_double() const { return t_.to_double(); }

  friend bool operator==(const CirclePoint& x, const CirclePoint& y) {
    return x.t_ == y.t_;
  }
  friend bool operator!=(const CirclePoint& x, const CirclePoint& y) { return !(x == y); }

 private:
  friend CirclePoint mod1(const GoldenRational& x);
  explicit CirclePoint(GoldenRational t) : t_(std::move(t)) {}
  GoldenRational t_;  // invariant: 0 <= t < 1
};

/// x - floor(x), exact.
CirclePoint mod1(const GoldenRational& x);

/// k steps of the golden rotation T_gamma: t -> t + k*gamma (mod 1).
CirclePoint rotate(const CirclePoint& t, long k);

}  // namespace fibrenorm
