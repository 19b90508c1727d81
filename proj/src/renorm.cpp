#include "fibrenorm/renorm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fibrenorm {

namespace {

const double kGammaD = (1.0 + std::sqrt(5.0)) / 2.0;

GoldenRational two_gamma_minus_one() {
  return GoldenRational(Rational(-1), Rational(2));
}

}  // namespace

DensitySpec DensitySpec::constant(GoldenRational c) {
  if (c.sign() <= 0) throw std::invalid_argument("density must be strictly positive");
  DensitySpec d;
  d.depth_ = 0;
  d.table_[""] = std::move(c);
  return d;
}

DensitySpec DensitySpec::depth_table(int m, std::map<Word, GoldenRational> table) {
  if (m < 0) throw std::invalid_argument("depth must be >= 0");
  size_t expected = size_t{1} << m;
  if (table.size() != expected)
    throw std::invalid_argument("depth table must cover all 2^m words");
  for (const auto& [w, v] : table) {
    if (w.size() != static_cast<size_t>(m))
      throw std::invalid_argument("depth table key of wrong length");
    if (is_factor(w) && v.sign() <= 0)
      throw std::invalid_argument("density must be strictly positive on factor cylinders");
  }
  DensitySpec d;
  d.depth_ = m;
  d.table_ = std::move(table);
  return d;
}

DensitySpec DensitySpec::tilde() {
  GoldenRational g = GoldenRational::gamma();
  GoldenRational d = two_gamma_minus_one();
  DensitySpec spec = depth_table(1, {{"0", g * g / d}, {"1", g / d}});
  spec.tilde_ = true;
  return spec;
}

const GoldenRational& DensitySpec::value(const Word& leading) const {
  if (depth_ == 0) return table_.at("");
  if (leading.size() < static_cast<size_t>(depth_))
    throw std::invalid_argument("density lookup needs more leading symbols");
  auto it = table_.find(leading.substr(0, static_cast<size_t>(depth_)));
  if (it == table_.end()) throw std::logic_error("density table miss");
  return it->second;
}

GoldenRational DensitySpec::max_value() const {
  GoldenRational best = table_.begin()->second;
  for (const auto& [w, v] : table_)
    if (v > best) best = v;
  return best;
}

GoldenRational DensitySpec::min_value() const {
  GoldenRational best = table_.begin()->second;
  for (const auto& [w, v] : table_)
    if (v < best) best = v;
  return best;
}

double eval_potential(const Potential& V, const Point& x, size_t cap) {
  if (x.provably_in_K()) return 0.0;
  DistanceResult d = dist_to_K(x, cap);
  if (d.status == DistanceResult::Status::CapExhausted)
    throw CapExhaustedError("eval_potential: distance scan cap exhausted");
  if (d.status == DistanceResult::Status::Infinite) return 0.0;
  double g = V.density.value_d(x.prefix_word(static_cast<size_t>(V.density.depth())));
  return g / std::pow(static_cast<double>(d.n), V.alpha);
}

double apply_R(const PointEvaluator& V, const Point& x) {
  Point hx = x.substituted(1);
  if (x.symbol(0) == '0') return V(hx.shifted(1)) + V(hx);
  return V(hx);
}

double iterate_R_direct(const Potential& V, int n, const Point& x, size_t cap) {
  if (n < 0) throw std::domain_error("iterate_R_direct: negative n");
  if (n == 0) return eval_potential(V, x, cap);
  PointEvaluator inner = [&V, n, cap](const Point& y) {
    return iterate_R_direct(V, n - 1, y, cap);
  };
  return apply_R(inner, x);
}

double iterate_R_closed(const Potential& V, int n, const Point& x, size_t cap) {
  if (n < 0) throw std::domain_error("iterate_R_closed: negative n");
  if (x.provably_in_K()) return 0.0;
  KappaTilde kt = kappa_tilde_both(x, cap);
  long nstar = x.symbol(0) == '0' ? n + 1 : n;
  long terms = fib_long(nstar);
  long big_n = fib_long(n + 1) * kt.k0 + fib_long(n) * kt.k1 + fib_long(n + 2) - 2;

  Point hx = x.substituted(n);
  size_t m = static_cast<size_t>(V.density.depth());
  double sum = 0.0, comp = 0.0;  // Kahan
  for (long j = 0; j < terms; ++j) {
    Word leading;
    leading.reserve(m);
    for (size_t i = 0; i < m; ++i) leading += hx.symbol(static_cast<size_t>(j) + i);
    double g = V.density.value_d(leading);
    double term = g / std::pow(static_cast<double>(big_n - j), V.alpha);
    double t = term - comp;
    double s = sum + t;
    comp = (s - sum) - t;
    sum = s;
  }
  return sum;
}

double tilde_V(const Point& x, size_t cap) {
  if (x.provably_in_K()) return 0.0;
  DistanceResult d = dist_to_K(x, cap);
  if (d.status != DistanceResult::Status::Finite) return 0.0;  // extends by 0 on K
  KappaTilde kt = kappa_tilde_both(x, cap);
  double k0 = static_cast<double>(kt.k0);
  double k1 = static_cast<double>(kt.k1);
  if (x.symbol(0) == '0') {
    double u = k0 + k1 / kGammaD + kGammaD;
    return std::log(u / (u - 1.0));
  }
  double u = kGammaD * k0 + k1 + kGammaD * kGammaD;
  return std::log(u / (u - 1.0));
}

namespace {

// Log-argument of the fixed point at counters (k0,k1): numerator and
// denominator of the fraction inside the logarithm.
struct Frac {
  GoldenRational num, den;
};

Frac tilde_frac(char sym, long k0, long k1) {
  GoldenRational g = GoldenRational::gamma();
  GoldenRational num;
  if (sym == '0') {
    // k0 + k1/gamma + gamma, with 1/gamma = gamma - 1
    num = GoldenRational(Rational(k0)) + GoldenRational(Rational(k1)) * (g - GoldenRational(1)) + g;
  } else {
    num = g * GoldenRational(Rational(k0)) + GoldenRational(Rational(k1)) + g * g;
  }
  return {num, num - GoldenRational(1)};
}

}  // namespace

bool fixed_point_check_exact(long k0, long k1, char first_symbol) {
  if (k0 < 0 || k1 < 0) throw std::domain_error("counters must be nonnegative");
  Frac fx = tilde_frac(first_symbol, k0, k1);
  // One H-step: the counters become (k0+k1+1, k0); after a further shift,
  // (k0+k1, k0). H(x) always starts with 0.
  Frac fh = tilde_frac('0', k0 + k1 + 1, k0);
  if (first_symbol == '1') return fh.num * fx.den == fh.den * fx.num;
  Frac fs = tilde_frac('1', k0 + k1, k0);  // sigma(H(x)) starts with 1 when x is in [0]
  return fh.num * fs.num * fx.den == fh.den * fs.den * fx.num;
}

GoldenRational mu_K_cylinder(const Word& w) { return cylinder_interval(w).length(); }

GoldenRational integrate_density(const DensitySpec& g) {
  GoldenRational total(0);
  for (const Word& w : factors_of_length(static_cast<size_t>(g.depth())))
    total += g.value(w) * mu_K_cylinder(w);
  return total;
}

double toeplitz_limit_check(double X, long F) {
  if (!(X > 1.0) || F < 1) throw std::invalid_argument("toeplitz_limit_check: need X > 1, F >= 1");
  double sum = 0.0;
  for (long j = 0; j <= F; ++j)
    sum += 1.0 / (X - static_cast<double>(j) / static_cast<double>(F));
  return sum / static_cast<double>(F);
}

std::vector<ConvergenceRow> convergence_experiment(const Potential& V, const Point& x,
                                                   int k_max, size_t cap) {
  if (k_max < 0 || k_max > 22)
    throw std::domain_error("convergence_experiment: k_max must be in [0, 22]");
  double target = std::numeric_limits<double>::quiet_NaN();
  if (V.alpha == 1.0) target = integrate_density(V.density).to_double() * tilde_V(x, cap);
  std::vector<ConvergenceRow> rows;
  rows.reserve(static_cast<size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    ConvergenceRow row;
    row.k = k;
    row.value = iterate_R_closed(V, k, x, cap);
    row.target = target;
    row.ratio = row.value / target;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fibrenorm
