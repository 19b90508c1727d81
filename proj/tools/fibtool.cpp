#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fibrenorm/thermo.hpp"

#ifndef FIBTOOL_VERSION
#define FIBTOOL_VERSION "0.0.0"
#endif

namespace {

using namespace fibrenorm;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitTruncationLimited = 3;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

using Params = std::vector<std::pair<std::string, std::string>>;

// Metadata block echoed into every output. The hash covers the command and
// its numeric parameters only; thread count and output path are deliberately
// excluded so reruns with different parallelism are byte-identical.
std::string meta_block(const std::string& command, const Params& params) {
  std::string canon = command;
  for (const auto& [k, v] : params) canon += ";" + k + "=" + v;
  std::ostringstream os;
  os << "# fibtool " << FIBTOOL_VERSION << "\n";
  os << "# command: " << command << "\n";
  for (const auto& [k, v] : params) os << "# " << k << ": " << v << "\n";
  char hash[24];
  std::snprintf(hash, sizeof(hash), "%016" PRIx64, fnv1a(canon));
  os << "# config_hash: " << hash << "\n";
  return os.str();
}

int write_output(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    return kExitOk;
  }
  std::string full = path;
  const char* dir = std::getenv("FIBRENORM_OUT_DIR");
  if (dir && *dir && path.front() != '/') full = std::string(dir) + "/" + path;
  std::ofstream f(full, std::ios::binary);
  if (!f) {
    std::cerr << "fibtool: cannot open output file " << full << "\n";
    return kExitUsage;
  }
  f << body;
  return kExitOk;
}

void validate_word(const std::string& w) {
  for (char c : w)
    if (c != '0' && c != '1')
      throw CLI::ValidationError("point", "must be a word over {0,1}");
}

DensitySpec parse_density(const std::string& s) {
  if (s == "tilde") return DensitySpec::tilde();
  const std::string prefix = "constant:";
  if (s.rfind(prefix, 0) == 0) {
    Rational r;
    try {
      r = Rational(s.substr(prefix.size()));
    } catch (const std::invalid_argument&) {
      throw CLI::ValidationError("density", "constant value must be an integer or p/q");
    }
    r.canonicalize();
    if (r <= 0) throw CLI::ValidationError("density", "constant must be positive");
    return DensitySpec::constant(GoldenRational(r));
  }
  throw CLI::ValidationError("density", "expected 'tilde' or 'constant:VALUE'");
}

// ---------------------------------------------------------------------------
// words

int cmd_words(long n, const std::string& output) {
  Params params = {{"n", std::to_string(n)}};
  std::ostringstream os;
  os << meta_block("words", params);
  os << "# rho_prefix: " << rho_prefix(size_t(std::max(n, 0L))) << "\n";
  os << "n,complexity,left_special,right_special,bispecial\n";
  if (n >= 1) {
    std::vector<long> bis = bispecial_lengths(n);
    std::set<long> bset(bis.begin(), bis.end());
    for (long k = 0; k <= n; ++k) {
      if (k == 0) {
        os << "0,1,,,no\n";
        continue;
      }
      SpecialWords sw = special_words(size_t(k));
      os << k << "," << complexity(k) << "," << sw.left << "," << sw.right << ","
         << (bset.count(k) ? "yes" : "no") << "\n";
    }
  }
  return write_output(output, os.str());
}

// ---------------------------------------------------------------------------
// selftest

struct Check {
  std::string name;
  std::string (*run)();  // empty string on success, else the violation
};

std::string check_complexity() {
  // Counts distinct sliding-window words in the memoized rho buffer itself,
  // so a corrupted buffer is caught here first.
  Word big = rho_prefix(600);
  for (size_t n = 1; n <= 20; ++n) {
    std::set<Word> seen;
    for (size_t i = 0; i + n <= big.size(); ++i) seen.insert(big.substr(i, n));
    if (seen.size() != n + 1)
      return "complexity invariant violated: " + std::to_string(seen.size()) +
             " distinct words of length " + std::to_string(n) + ", expected " +
             std::to_string(n + 1);
  }
  return "";
}

std::string check_factor_oracles() {
  for (size_t len = 1; len <= 12; ++len)
    for (unsigned bits = 0; bits < (1u << len); ++bits) {
      Word w(len, '0');
      for (size_t i = 0; i < len; ++i)
        if ((bits >> (len - 1 - i)) & 1) w[i] = '1';
      if (is_factor(w) != is_factor_interval(w))
        return "factor oracles disagree on " + w;
    }
  return "";
}

std::string check_fixed_point() {
  for (long k0 = 0; k0 <= 50; ++k0)
    for (long k1 = 0; k1 <= 50; ++k1)
      for (char a : {'0', '1'})
        if (!fixed_point_check_exact(k0, k1, a))
          return "fixed point identity fails at k0=" + std::to_string(k0) +
                 " k1=" + std::to_string(k1) + " symbol " + a;
  return "";
}

std::string check_coincidence() {
  for (size_t len = 0; len <= 6; ++len)
    for (unsigned bits = 0; bits < (1u << len); ++bits) {
      Word w(len, '0');
      for (size_t i = 0; i < len; ++i)
        if ((bits >> (len - 1 - i)) & 1) w[i] = '1';
      Point x = Point::prefixed(w + "0", Point::rho());
      Point y = Point::prefixed(w + "1", Point::rho());
      for (int n = 0; n <= 6; ++n) {
        long tn = fib_long(n + 1) * kappa(w, '0') + fib_long(n) * kappa(w, '1');
        if (long(coincidence_length(x, y, n)) != tn + fib_long(n + 2) - 2)
          return "coincidence length mismatch at w=" + w + " n=" + std::to_string(n);
      }
    }
  return "";
}

std::string check_no_accident_lemma() {
  for (const char* w : {"1", "00", "0100110", "11"})
    for (int n = 0; n <= 8; ++n)
      if (!check_no_accident(Point::word_then_rho(w), n))
        return std::string("accident inside the protected range: prefix ") + w +
               " n=" + std::to_string(n);
  return "";
}

std::string check_preserves_closest() {
  for (const char* w : {"11", "00", "0100110", "010011"})
    for (int n = 0; n <= 4; ++n)
      if (!check_H_preserves_closest(Point::word_then_rho(w), n))
        return std::string("closest point not preserved: prefix ") + w +
               " n=" + std::to_string(n);
  return "";
}

std::string check_measures() {
  for (size_t m = 0; m <= 10; ++m) {
    GoldenRational total(0);
    for (const Word& w : factors_of_length(m)) total += mu_K_cylinder(w);
    if (!(total == GoldenRational(1)))
      return "cylinder measures of length " + std::to_string(m) + " do not sum to 1";
  }
  if (!(integrate_density(DensitySpec::tilde()) == GoldenRational(1)))
    return "tilde density does not integrate to 1";
  return "";
}

std::string check_renewal() {
  LambdaValue v = lambda(std::log(2.0), 0.0, 20);
  if (!(v.value > 0.9 && v.value < 1.0))
    return "renewal sum at (log 2, 0) out of range: " + fmt_double(v.value);
  return "";
}

int cmd_selftest(bool verbose, const std::string& fault) {
  if (!fault.empty()) {
    if (fault != "rho") {
      std::cerr << "fibtool: unknown fault target '" << fault << "'\n";
      return kExitUsage;
    }
    // Warm the buffer past every window the checks can touch, then flip one
    // symbol; growing afterwards would regenerate the prefix and heal it.
    rho_prefix(60000);
    testing::corrupt_rho_buffer(5);
  }
  const Check checks[] = {
      {"complexity", check_complexity},
      {"factor-oracles", check_factor_oracles},
      {"fixed-point", check_fixed_point},
      {"coincidence-law", check_coincidence},
      {"no-accident", check_no_accident_lemma},
      {"closest-point", check_preserves_closest},
      {"measures", check_measures},
      {"renewal", check_renewal},
  };
  int failures = 0;
  for (const Check& c : checks) {
    auto t0 = std::chrono::steady_clock::now();
    std::string msg;
    try {
      msg = c.run();
    } catch (const std::exception& e) {
      msg = std::string("exception: ") + e.what();
    }
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);
    if (!msg.empty()) {
      ++failures;
      std::cout << "FAIL " << c.name << ": " << msg << "\n";
    } else if (verbose) {
      std::cout << "ok " << c.name << " (" << fmt_double(ms.count()) << " ms)\n";
    } else {
      std::cout << "ok " << c.name << "\n";
    }
  }
  return failures == 0 ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// renorm

int cmd_renorm(double alpha, const std::string& density, const std::string& point,
               int k_max, const std::string& output) {
  DensitySpec g = parse_density(density);
  validate_word(point);
  Potential v{alpha, g};
  Point x = Point::word_then_rho(point);
  std::vector<ConvergenceRow> rows;
  try {
    rows = convergence_experiment(v, x, k_max);
  } catch (const std::domain_error& e) {
    std::cerr << "fibtool: " << e.what() << "\n";
    return kExitUsage;
  }
  Params params = {{"alpha", fmt_double(alpha)},
                   {"density", density},
                   {"point", point},
                   {"k_max", std::to_string(k_max)}};
  std::ostringstream os;
  os << meta_block("renorm", params);
  os << "k,value,target,ratio\n";
  for (const ConvergenceRow& r : rows)
    os << r.k << "," << fmt_double(r.value) << "," << fmt_double(r.target) << ","
       << fmt_double(r.ratio) << "\n";
  return write_output(output, os.str());
}

// ---------------------------------------------------------------------------
// pressure

int cmd_pressure(std::vector<double> grid, int l_max, double tol, int threads,
                 bool strict, const std::string& output) {
  EnumerationOptions opt;
  opt.threads = threads;
  std::vector<PressureSample> samples;
  try {
    samples = pressure_curve(grid, l_max, tol, InducedPotential::log_potential(), opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "fibtool: " << e.what() << "\n";
    return kExitUsage;
  }
  std::string grid_echo;
  for (double b : grid) grid_echo += (grid_echo.empty() ? "" : " ") + fmt_double(b);
  Params params = {{"beta_grid", grid_echo},
                   {"l_max", std::to_string(l_max)},
                   {"tol", fmt_double(tol)}};
  std::ostringstream os;
  os << meta_block("pressure", params);
  os << "beta,pressure,lambda0,L,tail,status\n";
  bool limited = false;
  for (const PressureSample& s : samples) {
    bool t = s.status == TruncationStatus::TruncationLimited;
    limited = limited || t;
    os << fmt_double(s.beta) << "," << fmt_double(s.pressure) << ","
       << fmt_double(s.lambda0) << "," << s.l_max << "," << fmt_double(s.tail_estimate)
       << "," << (t ? "truncation_limited" : "converged") << "\n";
  }
  int rc = write_output(output, os.str());
  if (rc != kExitOk) return rc;
  return (strict && limited) ? kExitTruncationLimited : kExitOk;
}

// ---------------------------------------------------------------------------
// betac

int cmd_betac(int l_max, double tol, int threads, bool strict, const std::string& output) {
  EnumerationOptions opt;
  opt.threads = threads;
  BetaCBracket b = beta_c(l_max, tol, InducedPotential::log_potential(), opt);
  Params params = {{"l_max", std::to_string(l_max)}, {"tol", fmt_double(tol)}};
  std::string canon = "betac";
  for (const auto& [k, v] : params) canon += ";" + k + "=" + v;
  char hash[24];
  std::snprintf(hash, sizeof(hash), "%016" PRIx64, fnv1a(canon));

  nlohmann::ordered_json j;
  j["meta"] = {{"version", FIBTOOL_VERSION},
               {"command", "betac"},
               {"l_max", l_max},
               {"tol", tol},
               {"config_hash", hash}};
  j["lo"] = b.lo;
  j["hi"] = b.hi;
  j["diagnostics"] = {{"lambda_lo", b.lambda_lo},
                      {"tail_lo", b.tail_lo},
                      {"lambda_hi", b.lambda_hi},
                      {"tail_hi", b.tail_hi},
                      {"truncation_limited", b.truncation_limited}};
  int rc = write_output(output, j.dump(2) + "\n");
  if (rc != kExitOk) return rc;
  return (strict && b.truncation_limited) ? kExitTruncationLimited : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fibonacci subshift experiments: word combinatorics, renormalization "
               "convergence, and induced-operator pressure curves"};
  app.set_version_flag("--version", FIBTOOL_VERSION);
  app.set_config("--config", "", "Config file (key=value lines; [section] per subcommand)");
  app.allow_config_extras(false);
  app.require_subcommand(1);

  int threads = 1;
  bool strict = false;
  std::string output;
  app.add_option("--threads", threads, "Worker thread cap for enumeration")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  app.add_flag("--strict", strict, "Exit 3 when a result is truncation-limited");
  app.add_option("--output", output,
                 "Output file (default stdout); FIBRENORM_OUT_DIR prefixes relative paths");

  auto* words = app.add_subcommand("words", "Complexity table and special words up to n");
  long words_n = 20;
  words->add_option("-n,--n", words_n, "Maximum word length")
      ->check(CLI::Range(0L, 400L))
      ->capture_default_str();

  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");
  bool verbose = false;
  std::string fault;
  selftest->add_flag("-v,--verbose", verbose, "Print per-check timing");
  selftest->add_option("--inject-fault", fault)->group("");  // test hook, hidden

  auto* renorm = app.add_subcommand("renorm", "Iterate the renormalization operator");
  double alpha = 1.0;
  std::string density = "tilde";
  std::string point = "00";
  int k_max = 20;
  renorm->add_option("--alpha", alpha, "Decay exponent of the potential")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  renorm->add_option("--density", density, "tilde or constant:VALUE (VALUE integer or p/q)")
      ->capture_default_str();
  renorm->add_option("--point", point, "Binary word glued onto rho as the test point")
      ->capture_default_str();
  renorm->add_option("--k-max", k_max, "Number of operator iterations")
      ->check(CLI::Range(0, 22))
      ->capture_default_str();

  auto* pressure = app.add_subcommand("pressure", "Pressure curve over a beta grid");
  std::vector<double> beta_grid;
  int press_l = 22;
  double press_tol = 1e-3;
  pressure->add_option("--beta", beta_grid, "Sorted beta grid (default 0..4 step 0.25)");
  pressure->add_option("--l-max", press_l, "Return-time truncation depth")
      ->check(CLI::Range(2, 32))
      ->capture_default_str();
  pressure->add_option("--tol", press_tol, "Root tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* betac = app.add_subcommand("betac", "Bracket the freezing transition point");
  int betac_l = 22;
  double betac_tol = 0.05;
  betac->add_option("--l-max", betac_l, "Return-time truncation depth")
      ->check(CLI::Range(2, 32))
      ->capture_default_str();
  betac->add_option("--tol", betac_tol, "Bracket width")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // global flags may follow the subcommand
  for (CLI::App* sub : {words, selftest, renorm, pressure, betac}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (words->parsed()) return cmd_words(words_n, output);
    if (selftest->parsed()) return cmd_selftest(verbose, fault);
    if (renorm->parsed()) return cmd_renorm(alpha, density, point, k_max, output);
    if (pressure->parsed()) {
      if (beta_grid.empty())
        for (int i = 0; i <= 16; ++i) beta_grid.push_back(0.25 * i);
      return cmd_pressure(beta_grid, press_l, press_tol, threads, strict, output);
    }
    if (betac->parsed()) return cmd_betac(betac_l, betac_tol, threads, strict, output);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "fibtool: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "fibtool: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}
