#include "fibrenorm/golden.hpp"

#include <cmath>
#include <sstream>

namespace fibrenorm {

int GoldenRational::sign() const {
  int sa = sgn(a_);
  int sb = sgn(b_);
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  // a and b of opposite sign: a + b*gamma = b * (gamma - t) with t = -a/b > 0.
  Rational t = -a_ / b_;
  Rational disc = t * t - t - 1;  // < 0 iff t < gamma
  int sd = sgn(disc);
  if (sd == 0) throw std::logic_error("GoldenRational: rational root of X^2-X-1");
  return sd < 0 ? sb : -sb;
}

Integer GoldenRational::floor() const {
  if (b_ == 0) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a_.get_num_mpz_t(), a_.get_den_mpz_t());
    return q;
  }
  // Bracket gamma between consecutive Fibonacci convergents p/q with
  // q^2 > |b|, so that |b| * |gamma - p/q| < 1 and the initial guess is
  // off by at most one.
  Integer p = 2, q = 1;  // F_3/F_2 in classic indexing
  Integer babs = abs(b_.get_num()) / b_.get_den() + 1;
  while (q * q <= babs) {
    Integer np = p + q;
    q = p;
    p = np;
  }
  Rational est = a_ + b_ * Rational(p) / Rational(q);
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), est.get_num_mpz_t(), est.get_den_mpz_t());
  while (*this < GoldenRational(Rational(f))) f -= 1;
  while (*this >= GoldenRational(Rational(f + 1))) f += 1;
  return f;
}

double GoldenRational::to_double() const {
  static const double kGamma = (1.0 + std::sqrt(5.0)) / 2.0;
  return a_.get_d() + b_.get_d() * kGamma;
}

std::string GoldenRational::str() const {
  std::ostringstream os;
  if (b_ == 0) {
    os << a_;
  } else {
    os << a_ << (sgn(b_) < 0 ? "" : "+") << b_ << "g";
  }
  return os.str();
}

Integer fib(long n) {
  if (n < -2) throw std::domain_error("fib: index below -2");
  if (n == -2) return 1;
  Integer prev = 1, cur = 0;  // F_{-2}, F_{-1}
  for (long i = -1; i < n; ++i) {
    Integer next = prev + cur;
    prev = cur;
    cur = next;
  }
  return cur;
}

long fib_long(long n) {
  Integer f = fib(n);
  if (!f.fits_slong_p()) throw std::overflow_error("fib_long: value does not fit in long");
  return f.get_si();
}

CirclePoint mod1(const GoldenRational& x) {
  return CirclePoint(x - GoldenRational(Rational(x.floor())));
}

CirclePoint rotate(const CirclePoint& t, long k) {
  if (k == 0) return t;
  return mod1(t.value() + GoldenRational(Rational(0), Rational(k)));
}

}  // namespace fibrenorm
