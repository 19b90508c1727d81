#include "fibrenorm/point.hpp"

#include <stdexcept>

namespace fibrenorm {

namespace {

char code(const CirclePoint& t) {
  static const GoldenRational kSplit = GoldenRational::gamma() - GoldenRational(1);
  return t.value() < kSplit ? '0' : '1';
}

class KOrbitStream : public SymbolStream {
 public:
  explicit KOrbitStream(CirclePoint t) : next_(std::move(t)) {}

  char at(size_t i) const override {
    std::lock_guard<std::mutex> lock(mutex_);
    while (cache_.size() <= i) {
      cache_ += code(next_);
      next_ = rotate(next_, 1);
    }
    return cache_[i];
  }

 private:
  mutable std::mutex mutex_;
  mutable std::string cache_;
  mutable CirclePoint next_;
};

class RhoStream : public SymbolStream {
 public:
  char at(size_t i) const override {
    // Grow geometrically to amortize the substitution work in rho_prefix.
    size_t need = i + 1;
    return rho_prefix(need + need / 2)[i];
  }
};

class PeriodicStream : public SymbolStream {
 public:
  explicit PeriodicStream(Word p) : period_(std::move(p)) {
    if (period_.empty()) throw std::invalid_argument("empty period");
  }
  char at(size_t i) const override { return period_[i % period_.size()]; }

 private:
  Word period_;
};

class PrefixedStream : public SymbolStream {
 public:
  PrefixedStream(Word prefix, std::shared_ptr<const SymbolStream> tail, size_t tail_offset)
      : prefix_(std::move(prefix)), tail_(std::move(tail)), tail_offset_(tail_offset) {}

  char at(size_t i) const override {
    if (i < prefix_.size()) return prefix_[i];
    return tail_->at(tail_offset_ + (i - prefix_.size()));
  }

 private:
  Word prefix_;
  std::shared_ptr<const SymbolStream> tail_;
  size_t tail_offset_;
};

// H^n of a (possibly shifted) stream, expanded symbol by symbol on demand.
class SubstitutedStream : public SymbolStream {
 public:
  SubstitutedStream(std::shared_ptr<const SymbolStream> base, size_t base_offset, int level)
      : base_(std::move(base)),
        base_offset_(base_offset),
        image0_(substitute("0", level)),
        image1_(substitute("1", level)) {}

  char at(size_t i) const override {
    std::lock_guard<std::mutex> lock(mutex_);
    while (cache_.size() <= i) {
      char c = base_->at(base_offset_ + consumed_++);
      cache_ += (c == '0') ? image0_ : image1_;
    }
    return cache_[i];
  }

 private:
  std::shared_ptr<const SymbolStream> base_;
  size_t base_offset_;
  Word image0_, image1_;
  mutable std::mutex mutex_;
  mutable std::string cache_;
  mutable size_t consumed_ = 0;
};

}  // namespace

Point Point::k_point(const CirclePoint& t) {
  return Point(std::make_shared<KOrbitStream>(t), 0, KStatus::InK, KTrace{t, 0, false});
}

Point Point::rho() {
  // rho is the itinerary of 2*gamma - 3 = rotate(0, 2); its forward orbit
  // never returns to a partition endpoint.
  static const CirclePoint t = mod1(GoldenRational(Rational(0), Rational(2)));
  return Point(std::make_shared<RhoStream>(), 0, KStatus::InK, KTrace{t, 0, true});
}

Point Point::periodic(const Word& prefix, const Word& period) {
  auto tail = std::make_shared<PeriodicStream>(period);
  if (prefix.empty()) return Point(tail, 0, KStatus::NeverInK);
  return Point(std::make_shared<PrefixedStream>(prefix, tail, 0), 0, KStatus::NeverInK);
}

Point Point::prefixed(const Word& prefix, const Point& tail) {
  if (prefix.empty()) return tail;
  auto stream = std::make_shared<PrefixedStream>(prefix, tail.stream_, tail.offset_);
  if (tail.status_ == KStatus::NeverInK) return Point(stream, 0, KStatus::NeverInK);
  std::optional<KTrace> trace;
  if (tail.trace_)
    trace = KTrace{tail.trace_->t, long(prefix.size()) + tail.trace_->lead - long(tail.offset_),
                   tail.trace_->lower_ok};
  return Point(stream, 0, KStatus::Unknown, trace);
}

Point Point::word_then_rho(const Word& prefix) { return prefixed(prefix, rho()); }

Point Point::k_point_with_prefix(const Word& w) {
  CylinderInterval c = cylinder_interval(w);
  if (c.empty) throw std::invalid_argument("k_point_with_prefix: word is not a factor");
  return k_point(mod1(c.lo));
}

Word Point::prefix_word(size_t n) const {
  Word out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) out += symbol(i);
  return out;
}

Point Point::shifted(size_t k) const {
  if (k == 0) return *this;
  KStatus s = status_;
  if (s == KStatus::NotInK || s == KStatus::Unknown) s = KStatus::Unknown;
  return Point(stream_, offset_ + k, s, trace_);
}

Point Point::substituted(int n) const {
  if (n < 0) throw std::domain_error("substituted: negative level");
  if (n == 0) return *this;
  // H maps K into K; conversely a point outside K stays outside (its image
  // keeps a finite distance by the coincidence law). The circle coordinate
  // of the tail is not carried through H, so shifts of the image fall back
  // to scanning.
  return Point(std::make_shared<SubstitutedStream>(stream_, offset_, n), 0, resolve());
}

bool Point::provably_in_K() const { return resolve() == KStatus::InK; }

Point::KStatus Point::resolve() const {
  if (status_ != KStatus::Unknown || !trace_) return status_;
  long lead = trace_->lead - long(offset_);
  if (lead <= 0) return KStatus::InK;
  // Membership forces the point to be a coding of rotate(t, -lead): either
  // the canonical itinerary or, when the backward orbit segment touches a
  // partition endpoint, the lower-limit coding (limit of itineraries from
  // below, which flips the symbol exactly at the endpoints).
  bool canon = true;
  bool lower = trace_->lower_ok;
  static const GoldenRational kZero(0);
  static const GoldenRational kSplit = GoldenRational::gamma() - GoldenRational(1);
  for (long i = 0; i < lead && (canon || lower); ++i) {
    CirclePoint p = rotate(trace_->t, i - lead);
    char sym = symbol(size_t(i));
    char canonical = p.value() < kSplit ? '0' : '1';
    if (sym != canonical) canon = false;
    if (lower) {
      char low = canonical;
      if (p.value() == kZero) low = '1';
      else if (p.value() == kSplit) low = '0';
      if (sym != low) lower = false;
    }
  }
  return (canon || lower) ? KStatus::InK : KStatus::NotInK;
}

}  // namespace fibrenorm
