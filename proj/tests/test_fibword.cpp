#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fibrenorm/fibword.hpp"

using namespace fibrenorm;

namespace {

Word random_word(std::mt19937& rng, size_t len) {
  std::uniform_int_distribution<int> bit(0, 1);
  Word w;
  for (size_t i = 0; i < len; ++i) w += bit(rng) ? '1' : '0';
  return w;
}

Word word_of_index(unsigned bits, size_t len) {
  Word w(len, '0');
  for (size_t i = 0; i < len; ++i)
    if ((bits >> (len - 1 - i)) & 1) w[i] = '1';
  return w;
}

// Reference factor oracle: plain substring search in a long rho prefix.
bool is_factor_bruteforce(const Word& w) {
  static const Word big = rho_prefix(4000);
  return w.empty() || big.find(w) != Word::npos;
}

}  // namespace

TEST_CASE("substitution basics") {
  CHECK(substitute("0") == "01");
  CHECK(substitute("1") == "0");
  CHECK(substitute("0", 3) == "01001");
  CHECK(substitute("010", 0) == "010");
  CHECK(substitute("", 5) == "");
  CHECK(substitute("01", 2) == substitute(substitute("01", 1), 1));
}

TEST_CASE("kappa counts symbols") {
  CHECK(kappa("01001", '0') == 3);
  CHECK(kappa("01001", '1') == 2);
  CHECK(kappa("", '0') == 0);
  for (long n = 0; n <= 15; ++n) CHECK(kappa(substitute("0", int(n)), '0') == fib_long(n));
}

TEST_CASE("substitution length law |H^n(w)| = F_{n+1} k0 + F_n k1") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    Word w = random_word(rng, 1 + trial % 20);
    for (int n = 0; n <= 12; ++n) {
      long expect = fib_long(n + 1) * kappa(w, '0') + fib_long(n) * kappa(w, '1');
      CHECK(long(substitute(w, n).size()) == expect);
    }
  }
}

TEST_CASE("symbol frequency tends to 1/gamma") {
  Word w = substitute("0", 20);
  double freq = double(kappa(w, '0')) / double(w.size());
  double inv_gamma = 2.0 / (1.0 + std::sqrt(5.0));
  CHECK(std::fabs(freq - inv_gamma) < 1e-3);
}

TEST_CASE("rho prefix is the fixed word") {
  CHECK(rho_prefix(13) == "0100101001001");
  CHECK(rho_prefix(0) == "");
  CHECK(rho_prefix(5) == "01001");
  // fixed point: H(rho) = rho, on prefixes
  Word p = rho_prefix(200);
  CHECK(substitute(p).substr(0, 200) == rho_prefix(200));
}

TEST_CASE("inverse substitution decodes blocks") {
  CHECK(inverse_substitute("01001") == "010");
  CHECK(inverse_substitute("01") == "0");
  CHECK_THROWS_AS(inverse_substitute("10"), std::invalid_argument);
  CHECK_THROWS_AS(inverse_substitute("011"), std::invalid_argument);
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Word w = random_word(rng, 1 + trial % 18);
    CHECK(inverse_substitute(substitute(w)) == w);
  }
}

TEST_CASE("cylinder intervals: base arcs and emptiness") {
  GoldenRational g = GoldenRational::gamma();
  CylinderInterval c0 = cylinder_interval("0");
  CHECK_FALSE(c0.empty);
  CHECK(c0.length() == g - GoldenRational(1));  // 1/gamma
  CylinderInterval c1 = cylinder_interval("1");
  CHECK(c1.length() == GoldenRational(2) - g);  // 1/gamma^2
  CHECK(cylinder_interval("11").empty);
  CHECK(cylinder_interval("").length() == GoldenRational(1));
}

TEST_CASE("cylinder additivity: |C(w)| = |C(w0)| + |C(w1)|") {
  for (size_t len = 0; len <= 9; ++len)
    for (const Word& w : factors_of_length(len)) {
      GoldenRational total =
          cylinder_interval(w + "0").length() + cylinder_interval(w + "1").length();
      CHECK(cylinder_interval(w).length() == total);
    }
}

TEST_CASE("cylinder membership matches itineraries of K points") {
  // the itinerary of the left endpoint starts with the defining word
  for (size_t len = 1; len <= 8; ++len)
    for (const Word& w : factors_of_length(len)) {
      CylinderInterval c = cylinder_interval(w);
      REQUIRE_FALSE(c.empty);
      CirclePoint t = mod1(c.lo);
      CHECK(c.contains(t));
      for (size_t i = 0; i < len; ++i) {
        char sym = rotate(t, long(i)).value() < GoldenRational::gamma() - GoldenRational(1)
                       ? '0'
                       : '1';
        CHECK(sym == w[i]);
      }
    }
}

TEST_CASE("the two factor oracles agree on every word of length <= 16") {
  for (size_t len = 1; len <= 16; ++len) {
    long factors = 0;
    for (unsigned bits = 0; bits < (1u << len); ++bits) {
      Word w = word_of_index(bits, len);
      bool fast = is_factor(w);
      bool exact = is_factor_interval(w);
      REQUIRE(fast == exact);
      if (len <= 12) REQUIRE(fast == is_factor_bruteforce(w));
      factors += fast;
    }
    CHECK(factors == long(len) + 1);
  }
}

TEST_CASE("factor spot checks") {
  CHECK_FALSE(is_factor("11"));
  CHECK(is_factor("010"));
  CHECK(is_factor("00100"));  // occurs at position 7 of rho
  CHECK(is_factor(""));
}

TEST_CASE("complexity is n+1") {
  CHECK(complexity(0) == 1);
  CHECK(complexity(1) == 2);
  CHECK(complexity(7) == 8);
  for (long n = 0; n <= 30; ++n) CHECK(complexity(n) == n + 1);
}

TEST_CASE("factors_of_length is sorted, distinct, and closed under the window") {
  for (size_t len : {1u, 5u, 12u}) {
    std::vector<Word> fs = factors_of_length(len);
    CHECK(std::is_sorted(fs.begin(), fs.end()));
    CHECK(std::set<Word>(fs.begin(), fs.end()).size() == fs.size());
    for (const Word& w : fs) CHECK(is_factor_bruteforce(w));
  }
}

TEST_CASE("special words are the rho prefix and its reversal") {
  CHECK(special_words(3).left == "010");
  CHECK(special_words(3).right == "010");
  CHECK(special_words(1).left == "0");
  for (size_t n = 1; n <= 25; ++n) {
    SpecialWords s = special_words(n);
    CHECK(s.left == rho_prefix(n));
    Word rev = s.left;
    std::reverse(rev.begin(), rev.end());
    CHECK(s.right == rev);
  }
}

TEST_CASE("bi-special lengths are F_m - 2") {
  CHECK(bispecial_lengths(7) == std::vector<long>{1, 3, 6});
  CHECK(bispecial_lengths(0).empty());
  CHECK(bispecial_lengths(33) == std::vector<long>({1, 3, 6, 11, 19, 32}));
  CHECK(bispecial_lengths(100) == std::vector<long>({1, 3, 6, 11, 19, 32, 53, 87}));
}
