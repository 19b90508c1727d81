#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "fibrenorm/fibword.hpp"
#include "fibrenorm/golden.hpp"

namespace fibrenorm {

/// Lazily evaluated infinite symbol stream over {0,1}.
class SymbolStream {
 public:
  virtual ~SymbolStream() = default;
  virtual char at(size_t i) const = 0;
};

/// A point of the full shift: an infinite binary sequence with exact,
/// on-demand symbol access. Shifts are offsets; the substitution H wraps
/// the underlying stream so that H^n(x) stays exact for any tail type.
class Point {
 public:
  /// Point of K given by a circle coordinate (its rotation itinerary).
  static Point k_point(const CirclePoint& t);
  /// The fixed word rho itself.
  static Point rho();
  /// prefix followed by the periodic repetition of p (p nonempty).
  static Point periodic(const Word& prefix, const Word& period);
  /// prefix followed by the symbols of tail.
  static Point prefixed(const Word& prefix, const Point& tail);
  /// prefix followed by rho.
  static Point word_then_rho(const Word& prefix);
  /// Point of K whose itinerary starts with the factor w (left endpoint of
  /// the cylinder arc). Throws if w is not a factor.
  static Point k_point_with_prefix(const Word& w);

  char symbol(size_t i) const { return stream_->at(offset_ + i); }
  Word prefix_word(size_t n) const;

  Point shifted(size_t k) const;
  /// H^n applied to this point (exact, lazily expanded).
  Point substituted(int n = 1) const;

  /// Exact K-membership where it is decidable. For itinerary points, rho,
  /// and words glued onto them the answer is computed from the circle
  /// coordinate of the tail (membership forces the point to be a coding of
  /// one specific circle point, which is checked symbol by symbol in exact
  /// arithmetic). Eventually periodic points are never in K. False only
  /// means "not provably in K".
  bool provably_in_K() const;

 private:
  enum class KStatus {
    InK,       // definitely in K (closed under shift and substitution)
    NeverInK,  // no shift is in K (eventually periodic)
    NotInK,    // this point is not in K; its shifts may still be
    Unknown,
  };
  // Tail coordinate: stream symbol at index i >= lead is the coding of
  // rotate(t, i - lead). lower_ok marks tails whose forward orbit avoids the
  // partition endpoints, so the non-canonical (lower limit) coding can only
  // differ from the stream inside the prefix.
  struct KTrace {
    CirclePoint t;
    long lead = 0;
    bool lower_ok = false;
  };

  Point(std::shared_ptr<const SymbolStream> s, size_t offset, KStatus status,
        std::optional<KTrace> trace = std::nullopt)
      : stream_(std::move(s)), offset_(offset), status_(status), trace_(std::move(trace)) {}

  KStatus resolve() const;

  std::shared_ptr<const SymbolStream> stream_;
  size_t offset_ = 0;
  KStatus status_ = KStatus::Unknown;
  std::optional<KTrace> trace_;
};

}  // namespace fibrenorm
