#include "fibrenorm/metric.hpp"

#include <stdexcept>

namespace fibrenorm {

namespace {

bool prefix_is_factor(const Point& x, size_t k) { return is_factor(x.prefix_word(k)); }

}  // namespace

DistanceResult dist_to_K(const Point& x, size_t cap) {
  if (cap < 1) throw std::invalid_argument("dist_to_K: cap must be >= 1");
  if (x.provably_in_K()) return {DistanceResult::Status::Infinite, 0};

  // The set of factor prefixes is downward closed, so exponential probing
  // followed by bisection finds the longest one.
  size_t good = 0;
  size_t bad = 0;
  for (size_t probe = 1;; probe *= 2) {
    if (probe > cap) probe = cap;
    if (prefix_is_factor(x, probe)) {
      good = probe;
      if (probe == cap) return {DistanceResult::Status::CapExhausted, 0};
    } else {
      bad = probe;
      break;
    }
  }
  while (bad - good > 1) {
    size_t mid = good + (bad - good) / 2;
    (prefix_is_factor(x, mid) ? good : bad) = mid;
  }
  return {DistanceResult::Status::Finite, good};
}

KappaTilde kappa_tilde_both(const Point& x, size_t cap) {
  DistanceResult d = dist_to_K(x, cap);
  if (!d.finite())
    throw std::domain_error("kappa_tilde: counters undefined on K (or cap exhausted)");
  KappaTilde kt;
  for (size_t i = 0; i < d.n; ++i) (x.symbol(i) == '0' ? kt.k0 : kt.k1)++;
  return kt;
}

long kappa_tilde(const Point& x, char a, size_t cap) {
  KappaTilde kt = kappa_tilde_both(x, cap);
  return a == '0' ? kt.k0 : kt.k1;
}

std::vector<size_t> accidents(const Point& x, size_t horizon, size_t cap) {
  if (horizon < 1) throw std::invalid_argument("accidents: horizon must be >= 1");
  std::vector<size_t> out;
  if (x.provably_in_K()) return out;

  auto dist_n = [&](size_t j) -> std::optional<size_t> {
    DistanceResult d = dist_to_K(x.shifted(j), cap);
    if (d.status == DistanceResult::Status::CapExhausted)
      throw CapExhaustedError("accidents: distance scan cap exhausted");
    if (d.status == DistanceResult::Status::Infinite) return std::nullopt;
    return d.n;
  };

  std::optional<size_t> prev = dist_n(0);
  for (size_t j = 1; j <= horizon; ++j) {
    std::optional<size_t> cur = dist_n(j);
    // Accident: d(sigma^j x) <= d(sigma^{j-1} x). Shifts landing in K have
    // infinite n and are never reported.
    if (prev.has_value() && cur.has_value() && *cur >= *prev) out.push_back(j);
    prev = cur;
  }
  return out;
}

size_t coincidence_length(const Point& x, const Point& y, int n, size_t scan_limit) {
  Point hx = x.substituted(n);
  Point hy = y.substituted(n);
  for (size_t i = 0; i < scan_limit; ++i)
    if (hx.symbol(i) != hy.symbol(i)) return i;
  throw std::runtime_error("coincidence_length: streams identical up to scan limit");
}

Point closest_K_point(const Point& x, size_t cap) {
  DistanceResult d = dist_to_K(x, cap);
  if (!d.finite()) throw std::domain_error("closest_K_point: x is in K (or cap exhausted)");
  return Point::k_point_with_prefix(x.prefix_word(d.n));
}

bool check_no_accident(const Point& x, int n, size_t cap) {
  if (n < 0) throw std::domain_error("check_no_accident: negative n");
  long nstar = x.symbol(0) == '0' ? n + 1 : n;
  long horizon = fib_long(nstar) - 1;
  if (horizon < 1) return true;
  return accidents(x.substituted(n), static_cast<size_t>(horizon), cap).empty();
}

bool check_H_preserves_closest(const Point& x, int n, size_t cap) {
  Point y = closest_K_point(x, cap);
  size_t coincide = coincidence_length(x, y, n, cap);
  DistanceResult d = dist_to_K(x.substituted(n), cap);
  if (!d.finite())
    throw CapExhaustedError("check_H_preserves_closest: distance scan unresolved");
  return d.n == coincide;
}

}  // namespace fibrenorm
