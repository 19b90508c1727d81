#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fibrenorm/renorm.hpp"
#include "seeded_points.hpp"

using namespace fibrenorm;
using fibrenorm::testing_support::seeded_points;

namespace {
const double kGamma = (1.0 + std::sqrt(5.0)) / 2.0;
}

TEST_CASE("density specs") {
  DensitySpec c = DensitySpec::constant(GoldenRational(Rational(3)));
  CHECK(c.depth() == 0);
  CHECK(c.value_d("01") == 3.0);

  DensitySpec t = DensitySpec::tilde();
  CHECK(t.depth() == 1);
  CHECK(t.is_tilde());
  double g2 = kGamma * kGamma / (2 * kGamma - 1);
  double g1 = kGamma / (2 * kGamma - 1);
  CHECK(std::fabs(t.value_d("01") - g2) < 1e-15);
  CHECK(std::fabs(t.value_d("10") - g1) < 1e-15);

  CHECK_THROWS_AS(DensitySpec::constant(GoldenRational(0)), std::invalid_argument);
  CHECK_THROWS_AS(DensitySpec::depth_table(1, {{"0", GoldenRational(1)}}),
                  std::invalid_argument);
}

TEST_CASE("eval_potential reads distance and density") {
  Potential v{1.0, DensitySpec::constant(GoldenRational(1))};
  Point x4 = Point::word_then_rho("01000");  // longest factor prefix 0100
  REQUIRE(dist_to_K(x4).n == 4);
  CHECK(eval_potential(v, x4) == doctest::Approx(0.25));

  Potential vt{1.0, DensitySpec::tilde()};
  // a [0]-point at distance 10: rho prefix of length 10, then a mismatch
  Point x10 = Point::word_then_rho(rho_prefix(9) + "11");
  REQUIRE(dist_to_K(x10).n == 10);
  double g2 = kGamma * kGamma / (2 * kGamma - 1);
  CHECK(eval_potential(vt, x10) == doctest::Approx(g2 / 10).epsilon(1e-12));

  CHECK(eval_potential(v, Point::rho()) == 0.0);
  CHECK_THROWS_AS(eval_potential(v, Point::periodic("", "01001"), 8), CapExhaustedError);
}

TEST_CASE("apply_R cases") {
  Potential v{1.0, DensitySpec::constant(GoldenRational(1))};
  PointEvaluator ev = [&v](const Point& y) { return eval_potential(v, y); };
  Point x1 = Point::word_then_rho("11");  // in [1]
  CHECK(apply_R(ev, x1) == doctest::Approx(eval_potential(v, x1.substituted(1))));
  Point x0 = Point::word_then_rho("00");  // in [0]
  CHECK(apply_R(ev, x0) == doctest::Approx(eval_potential(v, x0.substituted(1)) +
                                           eval_potential(v, x0.substituted(1).shifted(1))));
  PointEvaluator zero = [](const Point&) { return 0.0; };
  CHECK(apply_R(zero, x0) == 0.0);
  // the fixed point is fixed pointwise
  for (const Point& x : seeded_points(10, 201)) {
    PointEvaluator tv = [](const Point& y) { return tilde_V(y); };
    CHECK(apply_R(tv, x) == doctest::Approx(tilde_V(x)).epsilon(1e-12));
  }
}

TEST_CASE("closed form R^n equals the recursive composition") {
  std::vector<Point> pts = seeded_points(20, 203);
  for (double alpha : {1.0, 2.0}) {
    Potential v{alpha, alpha == 1.0 ? DensitySpec::tilde()
                                    : DensitySpec::constant(GoldenRational(1))};
    for (const Point& x : pts)
      for (int n = 0; n <= 8; ++n) {
        double closed = iterate_R_closed(v, n, x);
        double direct = iterate_R_direct(v, n, x);
        CHECK(std::fabs(closed - direct) < 1e-10);
      }
  }
}

TEST_CASE("closed form edge cases") {
  Potential v{1.0, DensitySpec::constant(GoldenRational(2))};
  Point x1 = Point::word_then_rho("11");
  CHECK(iterate_R_closed(v, 0, x1) == doctest::Approx(eval_potential(v, x1)));
  // x in [1]: F_1 = 1 term, V(H(x))
  CHECK(iterate_R_closed(v, 1, x1) ==
        doctest::Approx(eval_potential(v, x1.substituted(1))));
  CHECK(iterate_R_closed(v, 3, Point::rho()) == 0.0);
}

TEST_CASE("tilde_V values and density limits") {
  // the formula at zero counters reduces to log(gamma/(gamma-1)) = log(gamma^2)
  CHECK(std::log(kGamma / (kGamma - 1)) == doctest::Approx(std::log(kGamma * kGamma)));
  // [0], k0=2, k1=0: "00" is a factor but "000" is not
  Point x0 = Point::word_then_rho("00");
  REQUIRE(dist_to_K(x0).n == 2);
  CHECK(tilde_V(x0) == doctest::Approx(std::log((2 + kGamma) / (1 + kGamma))));
  // [1], k0=0, k1=1: log((1+gamma^2)/gamma^2)
  Point x1 = Point::word_then_rho("11");
  CHECK(tilde_V(x1) == doctest::Approx(std::log((1 + kGamma * kGamma) / (kGamma * kGamma))));
  CHECK(tilde_V(Point::rho()) == 0.0);

  // n * tilde_V approaches the density along K-approaching sequences
  double g2 = kGamma * kGamma / (2 * kGamma - 1);
  double g1 = kGamma / (2 * kGamma - 1);
  for (size_t n : {100u, 150u, 240u}) {
    Point near0 = Point::prefixed(rho_prefix(n), Point::periodic("", "1"));
    DistanceResult d0 = dist_to_K(near0);
    REQUIRE(d0.finite());
    CHECK(std::fabs(double(d0.n) * tilde_V(near0) - g2) < 3.0 / double(d0.n));

    Point near1 = Point::prefixed(Point::rho().shifted(1).prefix_word(n),
                                  Point::periodic("", "1"));
    REQUIRE(near1.symbol(0) == '1');
    DistanceResult d1 = dist_to_K(near1);
    REQUIRE(d1.finite());
    CHECK(std::fabs(double(d1.n) * tilde_V(near1) - g1) < 3.0 / double(d1.n));
  }
}

TEST_CASE("fixed point identity holds exactly in Q(gamma)") {
  CHECK(fixed_point_check_exact(0, 0, '0'));
  CHECK(fixed_point_check_exact(5, 3, '1'));
  for (long k0 = 0; k0 <= 50; ++k0)
    for (long k1 = 0; k1 <= 50; ++k1) {
      REQUIRE(fixed_point_check_exact(k0, k1, '0'));
      REQUIRE(fixed_point_check_exact(k0, k1, '1'));
    }
}

TEST_CASE("cylinder measures") {
  GoldenRational g = GoldenRational::gamma();
  CHECK(mu_K_cylinder("0") == g - GoldenRational(1));
  CHECK(mu_K_cylinder("1") == GoldenRational(2) - g);
  CHECK(mu_K_cylinder("11") == GoldenRational(0));
  // measures of length-m cylinders sum to 1 exactly
  for (size_t m = 0; m <= 12; ++m) {
    GoldenRational total(0);
    for (const Word& w : factors_of_length(m)) total += mu_K_cylinder(w);
    CHECK(total == GoldenRational(1));
  }
}

TEST_CASE("density integrals") {
  CHECK(integrate_density(DensitySpec::tilde()) == GoldenRational(1));
  CHECK(integrate_density(DensitySpec::constant(GoldenRational(Rational(7)))) ==
        GoldenRational(Rational(7)));
  std::map<Word, GoldenRational> ones = {{"00", GoldenRational(1)},
                                         {"01", GoldenRational(1)},
                                         {"10", GoldenRational(1)},
                                         {"11", GoldenRational(1)}};
  CHECK(integrate_density(DensitySpec::depth_table(2, ones)) == GoldenRational(1));
}

TEST_CASE("toeplitz riemann sum converges to log(X/(X-1))") {
  CHECK(std::fabs(toeplitz_limit_check(2.0, 1000000) - std::log(2.0)) < 1e-5);
  double g2 = kGamma * kGamma;
  CHECK(std::fabs(toeplitz_limit_check(g2, 1000000) - std::log(g2 / (g2 - 1))) < 1e-5);
  CHECK(toeplitz_limit_check(3.0, 1) == doctest::Approx(1.0 / 3 + 1.0 / 2));
  // error decreases like 1/F
  double e3 = std::fabs(toeplitz_limit_check(2.0, 1000) - std::log(2.0));
  double e4 = std::fabs(toeplitz_limit_check(2.0, 10000) - std::log(2.0));
  double e5 = std::fabs(toeplitz_limit_check(2.0, 100000) - std::log(2.0));
  CHECK(e4 < e3 / 5);
  CHECK(e5 < e4 / 5);
}

TEST_CASE("convergence experiment: the three regimes of the trichotomy") {
  Point x = Point::word_then_rho("00");

  Potential v1{1.0, DensitySpec::tilde()};
  auto rows1 = convergence_experiment(v1, x, 20);
  REQUIRE(rows1.size() == 21);
  CHECK(std::fabs(rows1.back().ratio - 1.0) < 0.05);
  CHECK(rows1.back().target ==
        doctest::Approx(integrate_density(v1.density).to_double() * tilde_V(x)));

  Potential v2{2.0, DensitySpec::constant(GoldenRational(1))};
  auto rows2 = convergence_experiment(v2, x, 20);
  CHECK(rows2.back().value < 1e-2 * rows2.front().value);
  // monotone decay beyond some k
  for (size_t k = 6; k + 1 < rows2.size(); ++k)
    CHECK(rows2[k + 1].value < rows2[k].value);
  CHECK(std::isnan(rows2.back().target));

  Potential vh{0.5, DensitySpec::constant(GoldenRational(1))};
  auto rowsh = convergence_experiment(vh, x, 22);
  for (size_t k = 6; k + 1 < rowsh.size(); ++k)
    CHECK(rowsh[k + 1].value > rowsh[k].value);
  CHECK(rowsh.back().value > 50 * rowsh.front().value);

  CHECK_THROWS_AS(convergence_experiment(v1, x, 23), std::domain_error);
}
