#pragma once

#include <functional>
#include <map>

#include "fibrenorm/metric.hpp"

namespace fibrenorm {

/// Density g of a potential in X_alpha, locally constant on depth-m
/// cylinders. Values are kept exact so that measure integrals can be
/// computed in Q(gamma) where the identities are exact.
class DensitySpec {
 public:
  static DensitySpec constant(GoldenRational c);
  static DensitySpec depth_table(int m, std::map<Word, GoldenRational> table);
  /// The density of the fixed point: gamma^2/(2*gamma-1) on [0],
  /// gamma/(2*gamma-1) on [1].
  static DensitySpec tilde();

  int depth() const { return depth_; }
  bool is_tilde() const { return tilde_; }
  const GoldenRational& value(const Word& leading) const;
  double value_d(const Word& leading) const { return value(leading).to_double(); }
  GoldenRational max_value() const;
  GoldenRational min_value() const;

 private:
  DensitySpec() = default;
  int depth_ = 0;
  bool tilde_ = false;
  std::map<Word, GoldenRational> table_;  // keyed by depth-m words; "" for constants
};

struct Potential {
  double alpha = 1.0;
  DensitySpec density = DensitySpec::constant(GoldenRational(1));
};

/// V(x) = g(x) / n^alpha with d(x,K) = 2^{-n}; 0 on K.
/// Throws CapExhaustedError when the distance scan cannot resolve.
double eval_potential(const Potential& V, const Point& x, size_t cap = kDefaultCap);

using PointEvaluator = std::function<double(const Point&)>;

/// One application of the renormalization operator to an arbitrary
/// evaluator: V(sigma H x) + V(H x) on [0], V(H x) on [1].
double apply_R(const PointEvaluator& V, const Point& x);

/// n-fold composition of apply_R, evaluated recursively. Test oracle for
/// the closed form below.
double iterate_R_direct(const Potential& V, int n, const Point& x, size_t cap = kDefaultCap);

/// Closed form: (R^n V)(x) = sum_{j=0}^{F_{n*}-1} V(sigma^j H^n(x)), with
/// the j-th distance equal to N(x,n) - j for
/// N(x,n) = F_{n+1} k0 + F_n k1 + F_{n+2} - 2 (no accident occurs in this
/// range, so the distances are exact).
double iterate_R_closed(const Potential& V, int n, const Point& x, size_t cap = kDefaultCap);

/// The exact fixed point of R (0 on K, by convention).
double tilde_V(const Point& x, size_t cap = kDefaultCap);

/// Verifies, in exact Q(gamma) arithmetic, that one R-step maps the
/// log-argument of the fixed point at counters (k0,k1) back to itself.
bool fixed_point_check_exact(long k0, long k1, char first_symbol);

/// Exact mu_K-measure of the cylinder of w (arc length of its coding
/// interval); zero iff w is not a factor.
GoldenRational mu_K_cylinder(const Word& w);

/// Integral of a locally constant density against mu_K, exact.
GoldenRational integrate_density(const DensitySpec& g);

/// Riemann sum (1/F) * sum_{j=0}^{F} 1/(X - j/F); converges to
/// log(X/(X-1)) as F grows.
double toeplitz_limit_check(double X, long F);

struct ConvergenceRow {
  int k = 0;
  double value = 0;
  double target = 0;  // NaN when alpha != 1
  double ratio = 0;   // NaN when alpha != 1
};

/// R^k V(x) for k = 0..k_max via the closed form, with the limit
/// integral(g) * tilde_V(x) as target when alpha = 1.
std::vector<ConvergenceRow> convergence_experiment(const Potential& V, const Point& x,
                                                   int k_max, size_t cap = kDefaultCap);

}  // namespace fibrenorm
