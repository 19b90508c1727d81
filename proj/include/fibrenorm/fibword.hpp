#pragma once

#include <string>
#include <vector>

#include "fibrenorm/golden.hpp"

namespace fibrenorm {

/// Finite binary word over {0,1}, stored as a string of '0'/'1'.
using Word = std::string;

/// n-fold Fibonacci substitution H: 0 -> 01, 1 -> 0, extended to words by
/// concatenation.
Word substitute(const Word& w, int n = 1);

/// Number of occurrences of symbol a ('0' or '1') in w.
long kappa(const Word& w, char a);

/// First `len` symbols of the fixed word rho = 0100101001001...
/// The memoized buffer grows monotonically and is safe for concurrent use.
Word rho_prefix(size_t len);

/// Left inverse of substitute(.,1): splits w into blocks "01" -> 0 and
/// "0" -> 1. Throws std::invalid_argument if w starts with 1 or contains
/// a "1" that does not follow a "0" (i.e. a "11" factor). A trailing lone
/// "0" is accepted as a complete block.
Word inverse_substitute(const Word& w);

/// Arc of the circle: the exact set of t whose rotation itinerary starts
/// with a given word. Coding convention: 0 on [0, gamma-1), 1 on
/// [gamma-1, 1), half-open.
struct CylinderInterval {
  bool empty = true;
  bool wraps = false;               // arc passes through 0
  GoldenRational lo;                // in [0,1)
  GoldenRational hi;                // in (0,1]; wraps: hi < lo, arc = [lo,1) u [0,hi)

  GoldenRational length() const {
    if (empty) return GoldenRational(0);
    return wraps ? hi + GoldenRational(1) - lo : hi - lo;
  }
  bool contains(const CirclePoint& t) const;
};

CylinderInterval cylinder_interval(const Word& w);

/// Exact factor oracle: w is a factor of rho iff its cylinder is nonempty.
bool is_factor_interval(const Word& w);

/// Fast factor oracle: substring search in a prefix window of rho of length
/// ceil(gamma^3 * |w|) + 8. Cross-checked against the interval oracle in the
/// test suite.
bool is_factor(const Word& w);

/// Window length used by the fast oracle.
size_t factor_window(size_t n);

/// All distinct factors of rho of length n, in lexicographic order.
std::vector<Word> factors_of_length(size_t n);

/// Number of factors of length n (n+1 for a Sturmian word).
long complexity(long n);

struct SpecialWords {
  Word left;   // the unique w with 0w and 1w both factors
  Word right;  // the unique w with w0 and w1 both factors
};

/// The unique left- and right-special factors of length n >= 1, found by
/// brute-force extension checks and verified against the rho prefix.
SpecialWords special_words(size_t n);

/// All n <= max_len whose left-special word is also right-special; these
/// are exactly the numbers F_m - 2, m >= 3.
std::vector<long> bispecial_lengths(long max_len);

namespace testing {
/// Fault-injection hook for the selftest: flips one symbol in the memoized
/// rho buffer (growing it first if needed).
void corrupt_rho_buffer(size_t position);
}  // namespace testing

}  // namespace fibrenorm
