#pragma once

#include <optional>
#include <vector>

#include "fibrenorm/point.hpp"

namespace fibrenorm {

/// Default scan bound: 10 * F_15. All lemma checks at supported depths stay
/// far below this; exceeding it is reported, never silently truncated.
inline constexpr size_t kDefaultCap = 9870;

/// Raised when a distance scan runs past its cap without resolving.
class CapExhaustedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// d(x,K) = 2^{-n} where n is the length of the longest prefix of x that is
/// a factor of rho.
struct DistanceResult {
  enum class Status { Finite, Infinite, CapExhausted };
  Status status = Status::Finite;
  size_t n = 0;  // meaningful only when Finite

  bool finite() const { return status == Status::Finite; }
};

DistanceResult dist_to_K(const Point& x, size_t cap = kDefaultCap);

/// Count of symbol a among the first n symbols of x, n from dist_to_K.
/// Throws std::domain_error when x is in K (or the scan cap is exhausted).
long kappa_tilde(const Point& x, char a, size_t cap = kDefaultCap);

/// Both counters at once.
struct KappaTilde {
  long k0 = 0;
  long k1 = 0;
};
KappaTilde kappa_tilde_both(const Point& x, size_t cap = kDefaultCap);

/// Positions 1 <= j <= horizon where the distance to K fails to double,
/// i.e. d(sigma^j x, K) <= d(sigma^{j-1} x, K) with both distances finite.
/// Points of K produce no accidents, and shifts that land in K are never
/// reported. Throws CapExhaustedError if a scan cannot resolve.
std::vector<size_t> accidents(const Point& x, size_t horizon, size_t cap = kDefaultCap);

/// Length of the maximal common prefix of H^n(x) and H^n(y); throws
/// std::runtime_error if the streams agree past scan_limit.
size_t coincidence_length(const Point& x, const Point& y, int n,
                          size_t scan_limit = kDefaultCap);

/// A point of K realizing d(x,K): the itinerary of the left endpoint of the
/// cylinder of x's maximal factor prefix. Any realizing extension is
/// equivalent for the checks below.
Point closest_K_point(const Point& x, size_t cap = kDefaultCap);

/// True iff H^n(x) has no accident in its first F_{n*} - 1 shifts,
/// n* = n+1 on [0] and n on [1].
bool check_no_accident(const Point& x, int n, size_t cap = kDefaultCap);

/// True iff d(H^n(x), K) equals the coincidence length of H^n(x) with
/// H^n(y) for y in K closest to x.
bool check_H_preserves_closest(const Point& x, int n, size_t cap = kDefaultCap);

}  // namespace fibrenorm
