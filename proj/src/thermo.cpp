#include "fibrenorm/thermo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace fibrenorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLog2 = std::log(2.0);

struct Kahan {
  double sum = 0, comp = 0;
  void add(double v) {
    double t = v - comp;
    double s = sum + t;
    comp = (s - sum) - t;
    sum = s;
  }
};

// Trie of all factors of rho up to max_depth, built from a prefix window
// long enough to contain every one of them.
class FactorTrie {
 public:
  explicit FactorTrie(size_t max_depth) {
    nodes_.push_back({});
    Word w = rho_prefix(factor_window(max_depth));
    for (size_t i = 0; i < w.size(); ++i) {
      int cur = 0;
      size_t end = std::min(w.size(), i + max_depth);
      for (size_t j = i; j < end; ++j) {
        int b = w[j] - '0';
        if (nodes_[static_cast<size_t>(cur)].child[b] < 0) {
          nodes_[static_cast<size_t>(cur)].child[b] = static_cast<int>(nodes_.size());
          nodes_.push_back({});
        }
        cur = nodes_[static_cast<size_t>(cur)].child[b];
      }
    }
  }

  // -1 when extending by b leaves the factor language (or max_depth).
  int step(int node, int b) const { return nodes_[static_cast<size_t>(node)].child[b]; }

 private:
  struct Node {
    int child[2] = {-1, -1};
  };
  std::vector<Node> nodes_;
};

// Precomputed per-(run length, leading pattern) terms of the induced
// potential, plus a per-run upper bound (max over patterns) for pruning.
struct TermTable {
  int depth = 0;
  std::vector<double> exact;  // index nk * (1 << depth) + pattern
  std::vector<double> upper;  // index nk

  double at(long nk, unsigned pat) const {
    return exact[static_cast<size_t>(nk) * (size_t{1} << depth) + pat];
  }
};

TermTable build_terms(const InducedPotential& pot, int max_len) {
  TermTable t;
  t.depth = pot.depth();
  size_t patterns = size_t{1} << t.depth;
  t.exact.assign(static_cast<size_t>(max_len + 1) * patterns, 0.0);
  t.upper.assign(static_cast<size_t>(max_len + 1), 0.0);
  for (long nk = 1; nk <= max_len; ++nk) {
    double best = -kInf;
    for (size_t pat = 0; pat < patterns; ++pat) {
      Word leading;
      for (int i = t.depth - 1; i >= 0; --i) leading += ((pat >> i) & 1) ? '1' : '0';
      double v = pot.term(nk, leading);
      t.exact[static_cast<size_t>(nk) * patterns + pat] = v;
      best = std::max(best, v);
    }
    t.upper[static_cast<size_t>(nk)] = best;
  }
  return t;
}

// DFS state at a cut point: enough to resume the enumeration elsewhere.
struct StemState {
  std::string word;
  std::vector<int> nk;
  std::vector<std::pair<int, int>> alive;  // (start position, trie node)
  double upper_sum = 0;
};

// Core depth-first enumerator. Maintains, per shift position, the trie node
// of the still-alive factor run; a run's length is frozen into nk[] when it
// dies, which always happens by the closing marker because "11" is not a
// factor.
class Engine {
 public:
  using WordFn = std::function<void(const std::string&, long, double)>;
  using PruneFn = std::function<void(double)>;
  using StemFn = std::function<void(StemState)>;

  Engine(const FactorTrie& trie, const TermTable& terms, int max_len,
         double threshold, double beta, double Z)
      : trie_(trie), terms_(terms), max_len_(max_len),
        threshold_(threshold), beta_(beta), z_(Z) {}

  WordFn on_word;
  PruneFn on_prune;
  StemFn on_stem;
  size_t stem_len = 0;  // 0: never cut

  void run_from_root() {
    word_ = "1";
    nk_.assign(1, 0);
    upper_sum_ = 0;
    std::vector<std::pair<int, int>> alive{{0, trie_.step(0, 1)}};
    child(alive, '1');
  }

  void run_from_stem(const StemState& s) {
    word_ = s.word;
    nk_ = s.nk;
    upper_sum_ = s.upper_sum;
    expand(s.alive);
  }

 private:
  void expand(const std::vector<std::pair<int, int>>& alive) {
    if (word_.size() >= static_cast<size_t>(max_len_)) return;
    child(alive, '0');
    child(alive, '1');
  }

  void child(const std::vector<std::pair<int, int>>& alive, char c) {
    size_t len = word_.size();
    int bit = c - '0';
    std::vector<std::pair<int, int>> next;
    next.reserve(alive.size() + 1);
    double add_upper = 0;
    for (auto [k, node] : alive) {
      int nx = trie_.step(node, bit);
      if (nx < 0) {
        nk_[static_cast<size_t>(k)] = static_cast<int>(len) - k;
        add_upper += terms_.upper[len - static_cast<size_t>(k)];
      } else {
        next.emplace_back(k, nx);
      }
    }
    next.emplace_back(static_cast<int>(len), trie_.step(0, bit));
    word_.push_back(c);
    nk_.push_back(0);
    upper_sum_ += add_upper;

    size_t sz = word_.size();
    bool completed = sz >= 4 && word_[sz - 1] == '1' && word_[sz - 2] == '1';
    if (completed) {
      emit(static_cast<long>(sz) - 2);
    } else if (stem_len != 0 && sz == stem_len) {
      on_stem(StemState{word_, nk_, next, upper_sum_});
    } else if (threshold_ > 0 && prune(sz)) {
      // cut: mass already reported
    } else {
      expand(next);
    }

    word_.pop_back();
    nk_.pop_back();
    upper_sum_ -= add_upper;
  }

  void emit(long n) {
    double s = 0;
    size_t patterns = size_t{1} << terms_.depth;
    for (long k = 0; k < n; ++k) {
      unsigned pat = 0;
      for (int i = 0; i < terms_.depth; ++i)
        pat = (pat << 1) | unsigned(word_[static_cast<size_t>(k + i)] - '0');
      s += terms_.exact[static_cast<size_t>(nk_[static_cast<size_t>(k)]) * patterns + pat];
    }
    on_word(word_, n, s);
  }

  // True when every completion below the current node weighs less than the
  // threshold; reports an upper bound on the discarded mass. Valid because
  // frozen terms only accumulate (each <= 0) and return times only grow.
  bool prune(size_t sz) {
    double best = std::exp(beta_ * upper_sum_ - (static_cast<double>(sz) - 1) * z_);
    if (best >= threshold_) return false;
    double mass = 0;
    double per_len = std::exp(beta_ * upper_sum_ - (static_cast<double>(sz) - 2) * z_);
    double ratio = 2.0 * std::exp(-z_);
    for (size_t fl = sz; fl <= static_cast<size_t>(max_len_); ++fl) {
      mass += per_len;
      per_len *= ratio;
    }
    on_prune(mass);
    return true;
  }

  const FactorTrie& trie_;
  const TermTable& terms_;
  int max_len_;
  double threshold_, beta_, z_;

  std::string word_;
  std::vector<int> nk_;
  double upper_sum_ = 0;
};

void validate_options(int l_max, const EnumerationOptions& opt) {
  if (l_max < 2) throw std::invalid_argument("l_max must be >= 2");
  if (opt.prune_threshold < 0) throw std::invalid_argument("prune_threshold must be >= 0");
  if (opt.beta < 0 || opt.Z < 0) throw std::invalid_argument("beta and Z must be >= 0");
  if (opt.threads < 1) throw std::invalid_argument("threads must be >= 1");
}

// Monotone decreasing f; returns the crossing of f(z) = 1 on [lo, hi] with
// f(lo) >= 1 > f(hi). Infinities on the left end are fine.
double bisect_root(const std::function<double(double)>& f, double lo, double hi, double ztol) {
  for (int it = 0; it < 200 && hi - lo > ztol; ++it) {
    double mid = lo + (hi - lo) / 2;
    (f(mid) >= 1.0 ? lo : hi) = mid;
  }
  return lo + (hi - lo) / 2;
}

double solve_pressure_root(const std::function<double(double)>& f, double ztol) {
  double hi = kLog2;
  while (f(hi) >= 1.0) {
    hi *= 2;
    if (hi > 64) throw std::runtime_error("pressure root: no bracket below Z = 64");
  }
  return bisect_root(f, 0.0, hi, ztol);
}

}  // namespace

double phi_log(const Point& x, size_t cap) {
  if (x.provably_in_K()) return 0.0;
  DistanceResult d = dist_to_K(x, cap);
  if (d.status == DistanceResult::Status::CapExhausted)
    throw CapExhaustedError("phi_log: distance scan cap exhausted");
  if (d.status == DistanceResult::Status::Infinite) return 0.0;
  return -std::log1p(1.0 / static_cast<double>(d.n));
}

InducedPotential InducedPotential::log_potential() { return InducedPotential(); }

InducedPotential InducedPotential::from_density(double alpha, DensitySpec g) {
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be > 0");
  if (g.depth() > 3)
    throw std::invalid_argument("density depth > 3 needs symbols past the closing marker");
  if (g.min_value().sign() <= 0)
    throw std::invalid_argument("density must be strictly positive on every word");
  InducedPotential p;
  p.log_ = false;
  p.alpha_ = alpha;
  p.density_ = std::move(g);
  return p;
}

double InducedPotential::term(long nk, const Word& leading) const {
  if (nk < 1) throw std::domain_error("run length must be >= 1");
  if (log_) return -std::log1p(1.0 / static_cast<double>(nk));
  return -density_.value_d(leading) / std::pow(static_cast<double>(nk), alpha_);
}

long return_time(const Word& w) {
  if (w.size() < 4 || w.compare(0, 2, kMarker) != 0)
    throw std::invalid_argument("return word must start with the marker and re-enter");
  for (char c : w)
    if (c != '0' && c != '1') throw std::invalid_argument("return word has a non-binary symbol");
  for (size_t p = 2; p + 2 <= w.size(); ++p) {
    if (w[p] == '1' && w[p + 1] == '1') {
      if (p + 2 != w.size())
        throw std::invalid_argument("marker re-entry before the end of the word");
      return static_cast<long>(p);
    }
  }
  throw std::invalid_argument("word does not end at the marker");
}

bool is_return_word(const Word& w) {
  try {
    return_time(w);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

double birkhoff_on_return(const Word& w) {
  return birkhoff_on_return(w, InducedPotential::log_potential());
}

double birkhoff_on_return(const Word& w, const InducedPotential& pot) {
  long n = return_time(w);
  size_t m = static_cast<size_t>(pot.depth());
  double s = 0;
  for (long k = 0; k < n; ++k) {
    // Longest factor prefix of the k-th shift; it ends strictly inside the
    // word since the suffix contains the closing marker.
    size_t kk = static_cast<size_t>(k);
    size_t run = 1;
    while (kk + run + 1 <= w.size() && is_factor(w.substr(kk, run + 1))) ++run;
    s += pot.term(static_cast<long>(run), w.substr(kk, m));
  }
  return s;
}

void enumerate_returns(int l_max, const InducedPotential& pot,
                       const std::function<void(const ReturnWord&)>& sink,
                       const EnumerationOptions& opt,
                       const std::function<void(double)>& on_pruned) {
  validate_options(l_max, opt);
  FactorTrie trie(static_cast<size_t>(l_max) + 2);
  TermTable terms = build_terms(pot, l_max + 2);
  Engine e(trie, terms, l_max + 2, opt.prune_threshold, opt.beta, opt.Z);
  e.on_word = [&sink](const std::string& w, long n, double s) {
    sink(ReturnWord{w, n, s});
  };
  e.on_prune = [&on_pruned](double mass) {
    if (on_pruned) on_pruned(mass);
  };
  e.run_from_root();
}

long ReturnTable::count(long n) const {
  if (n < 0 || n > l_max) return 0;
  return static_cast<long>(birkhoff_by_time[static_cast<size_t>(n)].size());
}

long ReturnTable::total_count() const {
  long total = 0;
  for (const auto& v : birkhoff_by_time) total += static_cast<long>(v.size());
  return total;
}

ReturnTable enumerate_return_table(int l_max, const InducedPotential& pot,
                                   const EnumerationOptions& opt) {
  validate_options(l_max, opt);
  FactorTrie trie(static_cast<size_t>(l_max) + 2);
  TermTable terms = build_terms(pot, l_max + 2);
  int max_len = l_max + 2;

  // The sequential stem phase fixes the merge order; worker results are
  // computed independently of scheduling, so the table is identical for
  // every thread count.
  struct Item {
    enum Kind { WordItem, StemItem, PruneItem } kind;
    long n = 0;
    double value = 0;  // birkhoff or pruned mass
    size_t stem = 0;
  };
  std::vector<Item> items;
  std::vector<StemState> stems;

  Engine collector(trie, terms, max_len, opt.prune_threshold, opt.beta, opt.Z);
  collector.stem_len = std::min<size_t>(static_cast<size_t>(max_len), 12);
  collector.on_word = [&items](const std::string&, long n, double s) {
    items.push_back({Item::WordItem, n, s, 0});
  };
  collector.on_prune = [&items](double mass) {
    items.push_back({Item::PruneItem, 0, mass, 0});
  };
  collector.on_stem = [&items, &stems](StemState s) {
    items.push_back({Item::StemItem, 0, 0, stems.size()});
    stems.push_back(std::move(s));
  };
  collector.run_from_root();

  struct Fragment {
    std::vector<std::vector<double>> by_time;
    double pruned = 0;
  };
  std::vector<Fragment> fragments(stems.size());
  auto work_stem = [&](size_t i) {
    Fragment& f = fragments[i];
    f.by_time.assign(static_cast<size_t>(l_max) + 1, {});
    Engine e(trie, terms, max_len, opt.prune_threshold, opt.beta, opt.Z);
    e.on_word = [&f](const std::string&, long n, double s) {
      f.by_time[static_cast<size_t>(n)].push_back(s);
    };
    e.on_prune = [&f](double mass) { f.pruned += mass; };
    e.run_from_stem(stems[i]);
  };

  int workers = std::min<int>(opt.threads, static_cast<int>(stems.size()));
  if (workers <= 1) {
    for (size_t i = 0; i < stems.size(); ++i) work_stem(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < stems.size(); i = next.fetch_add(1))
          work_stem(i);
      });
    for (auto& th : pool) th.join();
  }

  ReturnTable rt;
  rt.l_max = l_max;
  rt.birkhoff_by_time.assign(static_cast<size_t>(l_max) + 1, {});
  for (const Item& it : items) {
    switch (it.kind) {
      case Item::WordItem:
        rt.birkhoff_by_time[static_cast<size_t>(it.n)].push_back(it.value);
        break;
      case Item::PruneItem:
        rt.pruned_mass += it.value;
        break;
      case Item::StemItem: {
        const Fragment& f = fragments[it.stem];
        for (size_t n = 0; n <= static_cast<size_t>(l_max); ++n) {
          auto& dst = rt.birkhoff_by_time[n];
          dst.insert(dst.end(), f.by_time[n].begin(), f.by_time[n].end());
        }
        rt.pruned_mass += f.pruned;
        break;
      }
    }
  }
  return rt;
}

LambdaTable::LambdaTable(const ReturnTable& table, double beta)
    : l_max_(table.l_max), beta_(beta), pruned_(table.pruned_mass) {
  if (beta < 0) throw std::domain_error("beta must be >= 0");
  a_.assign(static_cast<size_t>(l_max_) + 1, 0.0);
  for (size_t n = 0; n <= static_cast<size_t>(l_max_); ++n) {
    Kahan acc;
    for (double s : table.birkhoff_by_time[n]) acc.add(std::exp(beta * s));
    if (!std::isfinite(acc.sum))
      throw std::runtime_error("lambda: non-finite weight accumulation");
    a_[n] = acc.sum;
  }
}

LambdaValue LambdaTable::at(double Z) const {
  Kahan acc;
  std::vector<double> t(static_cast<size_t>(l_max_) + 1, 0.0);
  for (size_t n = 2; n <= static_cast<size_t>(l_max_); ++n) {
    t[n] = a_[n] * std::exp(-static_cast<double>(n) * Z);
    acc.add(t[n]);
  }
  double tail = kInf;
  if (l_max_ >= 8) {
    // Geometric extrapolation fitted to the last 6 per-length partial sums.
    double first = t[static_cast<size_t>(l_max_) - 5];
    double last = t[static_cast<size_t>(l_max_)];
    if (first > 0 && last > 0) {
      double r = std::pow(last / first, 0.2);
      if (r < 1.0) tail = last * r / (1.0 - r);
    }
  }
  return {acc.sum, tail + pruned_};
}

LambdaValue lambda(double Z, double beta, int l_max, const InducedPotential& pot,
                   const EnumerationOptions& opt) {
  if (Z < 0) throw std::domain_error("Z must be >= 0");
  ReturnTable rt = enumerate_return_table(l_max, pot, opt);
  return LambdaTable(rt, beta).at(Z);
}

PressureSample pressure_from_table(const ReturnTable& rt, double beta, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("tol must be > 0");
  LambdaTable lt(rt, beta);
  LambdaValue v0 = lt.at(0.0);

  PressureSample s;
  s.beta = beta;
  s.l_max = rt.l_max;
  s.lambda0 = v0.value;

  double ztol = std::min(tol, 1e-10);
  auto lower = [&lt](double z) { return lt.at(z).value; };
  auto upper = [&lt](double z) {
    LambdaValue v = lt.at(z);
    return std::isfinite(v.tail_bound) ? v.value + v.tail_bound : kInf;
  };

  if (v0.value <= 1.0) {
    s.pressure = 0.0;
    if (upper(0.0) <= 1.0) {
      s.tail_estimate = 0.0;
      s.status = TruncationStatus::Converged;
    } else {
      // The truncated series freezes but the tail bound does not; report
      // how large the true root could still be.
      s.tail_estimate = solve_pressure_root(upper, ztol);
      s.status = s.tail_estimate <= std::max(tol, 1e-9)
                     ? TruncationStatus::Converged
                     : TruncationStatus::TruncationLimited;
    }
    return s;
  }

  double z_lo = solve_pressure_root(lower, ztol);
  double z_hi = solve_pressure_root(upper, ztol);
  s.pressure = z_lo;
  s.tail_estimate = z_hi - z_lo;
  s.status = s.tail_estimate <= std::max(tol, 1e-9) ? TruncationStatus::Converged
                                                    : TruncationStatus::TruncationLimited;
  return s;
}

PressureSample pressure(double beta, int l_max, double tol, const InducedPotential& pot,
                        const EnumerationOptions& opt) {
  ReturnTable rt = enumerate_return_table(l_max, pot, opt);
  return pressure_from_table(rt, beta, tol);
}

BetaCBracket beta_c(int l_max, double tol, const InducedPotential& pot,
                    const EnumerationOptions& opt) {
  if (!(tol > 0)) throw std::invalid_argument("tol must be > 0");
  ReturnTable rt = enumerate_return_table(l_max, pot, opt);
  auto probe = [&rt](double beta) { return LambdaTable(rt, beta).at(0.0); };
  auto above = [&probe](double beta) {
    LambdaValue v = probe(beta);
    return !std::isfinite(v.tail_bound) || v.value + v.tail_bound > 1.0;
  };

  double lo = 0.0, hi = 1.0;
  while (above(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > 1e6) throw std::runtime_error("beta_c: no crossing below beta = 1e6");
  }
  while (hi - lo > tol) {
    double mid = lo + (hi - lo) / 2;
    (above(mid) ? lo : hi) = mid;
  }

  BetaCBracket b;
  b.lo = lo;
  b.hi = hi;
  b.l_max = l_max;
  LambdaValue vlo = probe(lo), vhi = probe(hi);
  b.lambda_lo = vlo.value;
  b.tail_lo = vlo.tail_bound;
  b.lambda_hi = vhi.value;
  b.tail_hi = vhi.tail_bound;
  b.truncation_limited = vlo.value <= 1.0;  // location decided by the tail
  return b;
}

std::vector<PressureSample> pressure_curve(const std::vector<double>& beta_grid, int l_max,
                                           double tol, const InducedPotential& pot,
                                           const EnumerationOptions& opt) {
  if (!std::is_sorted(beta_grid.begin(), beta_grid.end()))
    throw std::invalid_argument("beta grid must be sorted");
  ReturnTable rt = enumerate_return_table(l_max, pot, opt);
  std::vector<PressureSample> out;
  out.reserve(beta_grid.size());
  for (double beta : beta_grid) out.push_back(pressure_from_table(rt, beta, tol));
  return out;
}

GeneralPressureResult general_potential_pressure(const Potential& V,
                                                 const std::vector<double>& beta_grid,
                                                 int l_max, double tol,
                                                 const EnumerationOptions& opt) {
  if (V.alpha != 1.0)
    throw std::invalid_argument("general_potential_pressure: potential must be in X_1");
  InducedPotential pv = InducedPotential::from_density(1.0, V.density);

  GeneralPressureResult r;
  r.samples = pressure_curve(beta_grid, l_max, tol, pv, opt);
  r.kappa = V.density.min_value().to_double();
  r.beta0_hi = beta_c(l_max, tol, InducedPotential::log_potential(), opt).hi;
  r.onset_bound = r.beta0_hi / r.kappa;
  r.betac_hi = beta_c(l_max, tol, pv, opt).hi;
  r.plateau_verified = r.betac_hi <= r.onset_bound + 1e-9;
  return r;
}

}  // namespace fibrenorm
