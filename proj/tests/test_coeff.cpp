// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ptsturm/coeff.hpp"

using namespace ptsturm;

namespace {

double max_abs_f(const CoefficientProfile& f) {
  double m = 0.0;
  for (int k = 1; k < 1000; ++k) m = std::max(m, std::abs(f(kPi * k / 1000.0)));
  return m;
}

std::vector<std::pair<double, double>> sine_samples(int n) {
  std::vector<std::pair<double, double>> s;
  for (int k = 1; k <= n; ++k) {
    const double x = kPi * k / (n + 1.0);
    s.emplace_back(x, kFPrimeZero * std::sin(x));
  }
  return s;
}

}  // namespace

TEST_CASE("sine profile values and endpoint jet") {
  const auto f = make_sine(0.5);
  CHECK(f(kPi / 2) == doctest::Approx(2.0 / kPi).epsilon(1e-15));
  CHECK(f.fprime_pi() == doctest::Approx(-2.0 / kPi).epsilon(1e-15));
  CHECK(f(-kPi / 2) == doctest::Approx(-2.0 / kPi).epsilon(1e-15));
  CHECK(f.fprime0() == kFPrimeZero);
  REQUIRE(f.fsecond0());
  CHECK(*f.fsecond0() == 0.0);
  CHECK(*f.fsecond_pi() == 0.0);
  CHECK(f.breakpoints().empty());
  CHECK(f.nu() == doctest::Approx(kPi));
}

TEST_CASE("piecewise linear profile") {
  const auto f = make_piecewise_linear(0.5);
  CHECK(f(kPi / 4) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f(3 * kPi / 4) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f(kPi / 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f(std::nextafter(kPi / 2, 0.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f(std::nextafter(kPi / 2, 4.0)) == doctest::Approx(1.0).epsilon(1e-14));
  const auto bp = f.breakpoints();
  REQUIRE(bp.size() == 2);
  CHECK(bp[0] == doctest::Approx(-kPi / 2));
  CHECK(bp[1] == doctest::Approx(kPi / 2));
  CHECK(f.fprime_pi() == doctest::Approx(-2.0 / kPi));
  CHECK(f.breakpoints_between(0.1, 3.0).size() == 1);
  CHECK(f.breakpoints_between(3.0, 0.1).size() == 1);
}

TEST_CASE("eps outside (0, pi/2) is rejected") {
  for (double eps : {0.0, -0.1, kPi / 2, 2.0}) {
    CHECK_THROWS_AS(make_sine(eps), Error);
    CHECK_THROWS_AS(make_piecewise_linear(eps), Error);
  }
  CHECK_THROWS_WITH(make_sine(2.0), doctest::Contains("(0, pi/2)"));
}

TEST_CASE("oddness and anti-periodicity on random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> in(-kPi, kPi);
  std::uniform_real_distribution<double> neg(-kPi, 0.0);
  for (const auto& f : {make_sine(0.5), make_piecewise_linear(1.0), make_custom(sine_samples(64), 0.5, {})}) {
    const double scale = max_abs_f(f);
    double odd = 0.0, anti = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double x = in(rng);
      odd = std::max(odd, std::abs(f(-x) + f(x)));
      const double y = neg(rng);
      anti = std::max(anti, std::abs(f(y + kPi) + f(y)));
    }
    CHECK(odd < 1e-10 * scale);
    // The custom profile interpolates one half wave; its mirror is exact.
    if (f.kind() != ProfileKind::Custom) CHECK(anti < 1e-10 * scale);
    CHECK(f(0.0) == 0.0);
    CHECK(std::abs(f(kPi)) < 1e-15);
  }
}

TEST_CASE("custom profile from sine samples") {
  const auto f = make_custom(sine_samples(64), 0.5, {});
  CHECK(f(kPi / 2) == doctest::Approx(2.0 / kPi).epsilon(1e-6));
  for (int k = 1; k < 50; ++k) {
    const double x = kPi * k / 50.0;
    CHECK(std::abs(f(x) - kFPrimeZero * std::sin(x)) < 1e-5);
  }
  CHECK(validate(f, 256).passed);
}

TEST_CASE("custom profile rejects bad data") {
  auto bad = sine_samples(16);
  bad.emplace_back(kPi / 3, -0.1);
  CHECK_THROWS_AS(make_custom(bad, 0.5, {}), Error);
  EndpointDerivatives wrong;
  wrong.fprime0 = 1.0;
  CHECK_THROWS_WITH(make_custom(sine_samples(16), 0.5, wrong), doctest::Contains("2/pi"));
  CHECK_THROWS_AS(make_custom(sine_samples(16), 1.6, {}), Error);
}

TEST_CASE("custom interpolant stays positive on sharply peaked data") {
  std::vector<std::pair<double, double>> s{{0.5, 0.3}, {1.0, 0.02}, {1.2, 2.0}, {1.4, 0.02}, {2.5, 0.4}};
  const auto f = make_custom(s, 0.5, {});
  for (int k = 1; k < 4000; ++k) CHECK(f(kPi * k / 4000.0) > 0.0);
}

TEST_CASE("validate") {
  CHECK(validate(make_sine(0.5), 256).passed);
  CHECK(validate(make_piecewise_linear(1.0), 256).passed);

  // f(x) = x / pi on (0, pi): wrong slope at 0.
  const CoefficientProfile slope_one_over_pi(
      ProfileKind::Custom, 0.5, [](double x) { return x / kPi; }, {1.0 / kPi, -1.0, {}, {}}, {}, "x-over-pi");
  const ValidationReport r = validate(slope_one_over_pi, 256);
  CHECK_FALSE(r.passed);
  REQUIRE(r.find("fprime0_declared"));
  CHECK_FALSE(r.find("fprime0_declared")->passed);
  CHECK_FALSE(r.find("fprime0_measured")->passed);
  CHECK(r.find("oddness")->passed);

  CHECK_THROWS_AS(validate(make_sine(0.5), 8), Error);
}

TEST_CASE("p for the sine profile has the closed form f tan(x/2)^nu") {
  for (double eps : {0.5, 1.0}) {
    const auto f = make_sine(eps);
    const DerivedWeights w(f);
    CHECK(eval_p(w, kPi / 2) == doctest::Approx(2.0 / kPi).epsilon(1e-15));
    for (double x : {0.1, 0.7, 1.9, 3.0}) {
      const double expected = f(x) * std::pow(std::tan(x / 2), f.nu());
      CHECK(eval_p(w, x) == doctest::Approx(expected).epsilon(1e-9));
      CHECK(w.w(x) == doctest::Approx(expected / f(x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("p(x) x^-nu / f(x) settles as x -> 0") {
  const auto f = make_sine(0.5);
  const DerivedWeights w(f);
  std::vector<double> ratio;
  for (double x : {0.1, 0.05, 0.025}) ratio.push_back(eval_p(w, x) * std::pow(x, -f.nu()) / f(x));
  CHECK(ratio[0] > 0.0);
  const double d1 = std::abs(ratio[1] - ratio[0]);
  const double d2 = std::abs(ratio[2] - ratio[1]);
  CHECK(d2 < d1);
  CHECK(d2 / d1 == doctest::Approx(0.25).epsilon(0.05));  // O(x^2) approach
  CHECK(ratio[2] == doctest::Approx(std::pow(2.0, -f.nu())).epsilon(1e-3));
}

TEST_CASE("p near pi: p (pi-x)^nu / f settles") {
  const auto f = make_piecewise_linear(0.5);
  const DerivedWeights w(f);
  // On (pi/2, pi) the tent gives p = f (pi/2 / (pi - x))^nu exactly.
  for (double x : {2.0, 3.0, 3.1}) {
    const double c = eval_p(w, x) * std::pow(kPi - x, f.nu()) / f(x);
    CHECK(c == doctest::Approx(std::pow(kPi / 2, f.nu())).epsilon(1e-9));
  }
}

TEST_CASE("p for the tent at pi/4") {
  for (double eps : {0.5, 1.0}) {
    const auto f = make_piecewise_linear(eps);
    const DerivedWeights w(f);
    const double x = kPi / 4;
    CHECK(eval_p(w, x) == doctest::Approx(f(x) * std::pow(x / (kPi / 2), f.nu())).epsilon(1e-10));
  }
}

TEST_CASE("p inside the endpoint offset is refused") {
  const DerivedWeights w(make_sine(0.5));
  CHECK_THROWS_WITH(eval_p(w, 1e-9), doctest::Contains("endpoint too close"));
}

TEST_CASE("WKB integral and guess") {
  CHECK(wkb_integral(make_piecewise_linear(0.5)) == doctest::Approx(2.0 * kPi).epsilon(1e-10));
  // sqrt(pi/2) B(1/4, 1/2), from mpmath.
  CHECK(wkb_integral(make_sine(0.5)) == doctest::Approx(6.5725236032984372).epsilon(1e-10));
  const auto f = make_sine(0.7);
  double prev = 0.0;
  for (int n = 1; n <= 10; ++n) {
    const double g = wkb_guess(f, n);
    CHECK(g > prev);
    prev = g;
    CHECK(wkb_guess(f, 2 * n) / g == doctest::Approx(4.0).epsilon(1e-14));
  }
  CHECK(wkb_guess(make_piecewise_linear(0.5), 1) == doctest::Approx(1.0 / (4 * kPi * kPi)).epsilon(1e-10));
  CHECK_THROWS_AS(wkb_guess(f, 0), Error);
}

TEST_CASE("with_eps keeps the coefficient") {
  const auto f = make_sine(0.5);
  const auto g = f.with_eps(1.0);
  CHECK(g.eps() == 1.0);
  CHECK(g(1.0) == f(1.0));
}
