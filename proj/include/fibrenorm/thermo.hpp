#pragma once

#include <functional>
#include <string_view>

#include "fibrenorm/renorm.hpp"

namespace fibrenorm {

/// Marker block for the induced system. "11" is not a factor, so every
/// shifted distance inside a return word resolves before the terminating
/// marker and Birkhoff sums are pure word functions.
inline constexpr std::string_view kMarker = "11";

/// phi(x) = -log((n+1)/n) with d(x,K) = 2^{-n}; 0 on K.
double phi_log(const Point& x, size_t cap = kDefaultCap);

/// Potential fed to the induced transfer operator, already negated so that
/// weights are exp(beta * birkhoff - n * Z) with birkhoff <= 0.
class InducedPotential {
 public:
  static InducedPotential log_potential();
  /// term = -g(leading) / n^alpha for a strictly positive density of depth
  /// at most 3 (deeper tables would need symbols past the closing marker).
  static InducedPotential from_density(double alpha, DensitySpec g);

  bool is_log() const { return log_; }
  int depth() const { return log_ ? 0 : density_.depth(); }
  double alpha() const { return alpha_; }
  const DensitySpec& density() const { return density_; }

  /// Contribution of one shift whose longest factor prefix has length nk.
  double term(long nk, const Word& leading) const;

 private:
  InducedPotential() = default;
  bool log_ = true;
  double alpha_ = 1.0;
  DensitySpec density_ = DensitySpec::constant(GoldenRational(1));
};

struct ReturnWord {
  Word word;        // begins with the marker; only other occurrence at n
  long n = 0;       // return time; word length is n + 2
  double birkhoff;  // S_n of the induced potential, always <= 0
};

/// Return time of a first-return word, scanning non-overlapping marker
/// occurrences from position 2 on. Throws std::invalid_argument when the
/// word re-enters early or does not end at the marker.
long return_time(const Word& word);
bool is_return_word(const Word& word);

/// Birkhoff sum over the word alone, via direct factor-window scans.
/// Independent of the trie-based enumeration below; used to cross-check it.
double birkhoff_on_return(const Word& word);
double birkhoff_on_return(const Word& word, const InducedPotential& pot);

struct EnumerationOptions {
  double prune_threshold = 0;  // 0 disables pruning
  double beta = 0;             // pruning bound parameters only
  double Z = 0;
  int threads = 1;
};

/// Depth-first enumeration of all first-return words with return time
/// <= l_max, in canonical order ('0' before '1'). Cut-branch mass is
/// reported through on_pruned. Single-threaded; the table builder below is
/// the parallel path.
void enumerate_returns(int l_max, const InducedPotential& pot,
                       const std::function<void(const ReturnWord&)>& sink,
                       const EnumerationOptions& opt = {},
                       const std::function<void(double)>& on_pruned = {});

/// Birkhoff sums grouped by return time, in canonical enumeration order.
/// The grouping (and the order within each group) is independent of the
/// thread count, so downstream sums are byte-reproducible.
struct ReturnTable {
  int l_max = 0;
  std::vector<std::vector<double>> birkhoff_by_time;  // index n = 0..l_max
  double pruned_mass = 0;  // bound on weight mass cut at (beta, Z)

  long count(long n) const;
  long total_count() const;
};

ReturnTable enumerate_return_table(int l_max, const InducedPotential& pot,
                                   const EnumerationOptions& opt = {});

struct LambdaValue {
  double value = 0;
  double tail_bound = 0;  // pruned mass + geometric extrapolation; may be inf
};

/// Per-length weights A_n(beta) = sum over returns of time n of
/// exp(beta * birkhoff); lambda^{(L)}(Z, beta) = sum_n A_n exp(-n Z).
class LambdaTable {
 public:
  LambdaTable(const ReturnTable& table, double beta);

  LambdaValue at(double Z) const;
  double beta() const { return beta_; }
  int l_max() const { return l_max_; }
  const std::vector<double>& buckets() const { return a_; }

 private:
  int l_max_ = 0;
  double beta_ = 0;
  double pruned_ = 0;
  std::vector<double> a_;
};

LambdaValue lambda(double Z, double beta, int l_max,
                   const InducedPotential& pot = InducedPotential::log_potential(),
                   const EnumerationOptions& opt = {});

enum class TruncationStatus { Converged, TruncationLimited };

struct PressureSample {
  double beta = 0;
  double pressure = 0;  // root of lambda^{(L)}(Z, beta) = 1, clamped at 0
  double lambda0 = 0;   // lambda^{(L)}(0, beta)
  int l_max = 0;
  double tail_estimate = 0;  // bound on the truncation effect on pressure
  TruncationStatus status = TruncationStatus::Converged;
};

PressureSample pressure_from_table(const ReturnTable& table, double beta, double tol);

PressureSample pressure(double beta, int l_max, double tol = 1e-10,
                        const InducedPotential& pot = InducedPotential::log_potential(),
                        const EnumerationOptions& opt = {});

struct BetaCBracket {
  double lo = 0;  // lambda^{(L)}(0, lo) + tail > 1
  double hi = 0;  // lambda^{(L)}(0, hi) + tail <= 1
  int l_max = 0;
  double lambda_lo = 0, tail_lo = 0;
  double lambda_hi = 0, tail_hi = 0;
  bool truncation_limited = false;  // crossing located by the tail alone
};

BetaCBracket beta_c(int l_max, double tol,
                    const InducedPotential& pot = InducedPotential::log_potential(),
                    const EnumerationOptions& opt = {});

/// Requires a sorted grid; enumerates once and reuses the table per beta.
std::vector<PressureSample> pressure_curve(const std::vector<double>& beta_grid,
                                           int l_max, double tol = 1e-10,
                                           const InducedPotential& pot =
                                               InducedPotential::log_potential(),
                                           const EnumerationOptions& opt = {});

/// Same pipeline for a potential V in X_1 with strictly positive density.
/// kappa = min of the density; -V <= kappa * phi pointwise since
/// n log(1 + 1/n) < 1, so the plateau must begin by beta0 / kappa.
struct GeneralPressureResult {
  std::vector<PressureSample> samples;
  double kappa = 0;
  double beta0_hi = 0;      // log-potential crossing bracket (upper end)
  double onset_bound = 0;   // beta0_hi / kappa
  double betac_hi = 0;      // crossing bracket for V itself
  bool plateau_verified = false;
};

GeneralPressureResult general_potential_pressure(const Potential& V,
                                                 const std::vector<double>& beta_grid,
                                                 int l_max, double tol = 1e-3,
                                                 const EnumerationOptions& opt = {});

}  // namespace fibrenorm
