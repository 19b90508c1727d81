#include "fibrenorm/fibword.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>
#include <stdexcept>

namespace fibrenorm {

namespace {

void check_alphabet(const Word& w) {
  for (char c : w)
    if (c != '0' && c != '1') throw std::invalid_argument("word symbol not in {0,1}");
}

std::mutex g_rho_mutex;
std::string g_rho_buffer = "0";

// Linear sub-intervals [lo,hi) of [0,1], lo < hi.
using Piece = std::pair<GoldenRational, GoldenRational>;

std::vector<Piece> intersect(const std::vector<Piece>& xs, const std::vector<Piece>& ys) {
  std::vector<Piece> out;
  for (const auto& x : xs)
    for (const auto& y : ys) {
      GoldenRational lo = std::max(x.first, y.first);
      GoldenRational hi = std::min(x.second, y.second);
      if (lo < hi) out.push_back({std::move(lo), std::move(hi)});
    }
  return out;
}

// The arc coding symbol a at rotation step k: T^{-k} of the base arc.
std::vector<Piece> coding_arc(char a, long k) {
  const GoldenRational gm1 = GoldenRational::gamma() - GoldenRational(1);
  GoldenRational lo = a == '0' ? GoldenRational(0) : gm1;
  GoldenRational len = a == '0' ? gm1 : GoldenRational(1) - gm1;
  GoldenRational slo = mod1(lo - GoldenRational(Rational(0), Rational(k))).value();
  GoldenRational shi = slo + len;
  if (shi <= GoldenRational(1)) return {{std::move(slo), std::move(shi)}};
  return {{GoldenRational(0), shi - GoldenRational(1)}, {std::move(slo), GoldenRational(1)}};
}

CylinderInterval from_pieces(std::vector<Piece> pieces) {
  CylinderInterval c;
  if (pieces.empty()) return c;
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& x, const Piece& y) { return x.first < y.first; });
  c.empty = false;
  if (pieces.size() == 1) {
    c.lo = std::move(pieces[0].first);
    c.hi = std::move(pieces[0].second);
    return c;
  }
  if (pieces.size() == 2 && pieces[0].first == GoldenRational(0) &&
      pieces[1].second == GoldenRational(1)) {
    c.wraps = true;
    c.lo = std::move(pieces[1].first);
    c.hi = std::move(pieces[0].second);
    return c;
  }
  throw std::logic_error("cylinder set is not an arc");
}

}  // namespace

Word substitute(const Word& w, int n) {
  if (n < 0) throw std::domain_error("substitute: negative iteration count");
  check_alphabet(w);
  Word cur = w;
  for (int i = 0; i < n; ++i) {
    Word next;
    next.reserve(cur.size() * 2);
    for (char c : cur) next += (c == '0') ? "01" : "0";
    cur = std::move(next);
  }
  return cur;
}

long kappa(const Word& w, char a) {
  if (a != '0' && a != '1') throw std::invalid_argument("kappa: symbol not in {0,1}");
  return static_cast<long>(std::count(w.begin(), w.end(), a));
}

Word rho_prefix(size_t len) {
  std::lock_guard<std::mutex> lock(g_rho_mutex);
  while (g_rho_buffer.size() < len) {
    std::string next;
    next.reserve(g_rho_buffer.size() * 2);
    for (char c : g_rho_buffer) next += (c == '0') ? "01" : "0";
    g_rho_buffer = std::move(next);
  }
  return g_rho_buffer.substr(0, len);
}

Word inverse_substitute(const Word& w) {
  check_alphabet(w);
  Word out;
  out.reserve(w.size());
  size_t i = 0;
  while (i < w.size()) {
    if (w[i] == '1') throw std::invalid_argument("inverse_substitute: no block starts with 1");
    if (i + 1 < w.size() && w[i + 1] == '1') {
      out += '0';  // block 01
      i += 2;
    } else {
      out += '1';  // block 0
      i += 1;
    }
  }
  return out;
}

bool CylinderInterval::contains(const CirclePoint& t) const {
  if (empty) return false;
  const GoldenRational& v = t.value();
  if (wraps) return v >= lo || v < hi;
  return v >= lo && v < hi;
}

CylinderInterval cylinder_interval(const Word& w) {
  check_alphabet(w);
  std::vector<Piece> pieces = {{GoldenRational(0), GoldenRational(1)}};
  for (size_t k = 0; k < w.size() && !pieces.empty(); ++k)
    pieces = intersect(pieces, coding_arc(w[k], static_cast<long>(k)));
  return from_pieces(std::move(pieces));
}

bool is_factor_interval(const Word& w) { return !cylinder_interval(w).empty; }

size_t factor_window(size_t n) {
  // gamma^3 = 2*gamma + 1; a generous multiple of the recurrence function.
  return static_cast<size_t>(std::ceil(4.2360679774997896 * static_cast<double>(n))) + 8;
}

bool is_factor(const Word& w) {
  check_alphabet(w);
  if (w.empty()) return true;
  return rho_prefix(factor_window(w.size())).find(w) != std::string::npos;
}

std::vector<Word> factors_of_length(size_t n) {
  if (n == 0) return {Word()};
  Word window = rho_prefix(factor_window(n));
  std::set<Word> out;
  for (size_t i = 0; i + n <= window.size(); ++i) out.insert(window.substr(i, n));
  return {out.begin(), out.end()};
}

long complexity(long n) {
  if (n < 0) throw std::domain_error("complexity: negative length");
  return static_cast<long>(factors_of_length(static_cast<size_t>(n)).size());
}

SpecialWords special_words(size_t n) {
  if (n == 0) throw std::domain_error("special_words: length must be >= 1");
  SpecialWords sw;
  bool have_left = false, have_right = false;
  for (const Word& w : factors_of_length(n)) {
    if (is_factor("0" + w) && is_factor("1" + w)) {
      if (have_left) throw std::logic_error("multiple left-special words");
      sw.left = w;
      have_left = true;
    }
    if (is_factor(w + "0") && is_factor(w + "1")) {
      if (have_right) throw std::logic_error("multiple right-special words");
      sw.right = w;
      have_right = true;
    }
  }
  if (!have_left || !have_right) throw std::logic_error("missing special word");
  return sw;
}

std::vector<long> bispecial_lengths(long max_len) {
  std::vector<long> out;
  for (long n = 1; n <= max_len; ++n) {
    SpecialWords sw = special_words(static_cast<size_t>(n));
    if (sw.left == sw.right) out.push_back(n);
  }
  return out;
}

namespace testing {
void corrupt_rho_buffer(size_t position) {
  rho_prefix(position + 1);
  std::lock_guard<std::mutex> lock(g_rho_mutex);
  g_rho_buffer[position] = g_rho_buffer[position] == '0' ? '1' : '0';
}
}  // namespace testing

}  // namespace fibrenorm
