#include <cmath>
#include <sstream>

#include <doctest.h>

#include "semicl/jet.hpp"
#include "semicl/polynomial.hpp"
#include "semicl/series.hpp"

using namespace semicl;

namespace {

double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace

TEST_CASE("jet elementary functions match their Taylor coefficients") {
  const double x0 = 0.7;
  const std::size_t D = 12;
  const Jet x = Jet::variable(x0, D);

  const Jet e = exp(x);
  for (std::size_t k = 0; k <= D; ++k) CHECK(e[k] == doctest::Approx(std::exp(x0) / factorial(k)).epsilon(1e-14));

  // log(x0 + h) = log x0 - sum (-h/x0)^k / k
  const Jet l = log(x);
  CHECK(l[0] == doctest::Approx(std::log(x0)));
  for (std::size_t k = 1; k <= D; ++k)
    CHECK(l[k] == doctest::Approx(-std::pow(-1.0 / x0, double(k)) / double(k)).epsilon(1e-13));

  const Jet s = sqrt(x);
  const Jet s2 = s * s;
  for (std::size_t k = 0; k <= D; ++k) CHECK(s2[k] == doctest::Approx(x[k]).epsilon(1e-14).scale(1.0));

  const Jet q = Jet::constant(1.0, D) / (x * x);
  const Jet back = q * pow(x, 2);
  CHECK(back[0] == doctest::Approx(1.0));
  for (std::size_t k = 1; k <= D; ++k) CHECK(std::abs(back[k]) < 1e-12);
}

TEST_CASE("jet calculus") {
  const Jet p({1.0, 2.0, 3.0, 4.0});
  const Jet d = p.derivative();
  CHECK(d.degree() == 2);
  CHECK(d[0] == 2.0);
  CHECK(d[1] == 6.0);
  CHECK(d[2] == 12.0);
  const Jet i = d.integral(1.0);
  for (std::size_t k = 0; k <= 3; ++k) CHECK(i[k] == doctest::Approx(p[k]));
  CHECK(p.evaluate(0.5) == doctest::Approx(1 + 1 + 0.75 + 0.5));
  const Jet s = Jet({0.0, 0.0, 3.0, 4.0}).shift_down(2);
  CHECK(s.degree() == 1);
  CHECK(s[0] == 3.0);
  // mixed degrees truncate to the shorter jet
  CHECK((p + Jet({1.0, 1.0})).degree() == 1);
}

TEST_CASE("polynomial evaluation, derivative and re-expansion") {
  const Polynomial v({0.0, 0.0, 0.5, 0.0, 0.1});
  CHECK(v(1.0) == doctest::Approx(0.6));
  CHECK(v.derivative()(1.0) == doctest::Approx(1.4));
  CHECK(v.degree() == 4);

  const Jet t = v.taylor(2.0, 6);
  for (double h : {-0.3, 0.1, 0.25}) CHECK(t.evaluate(h) == doctest::Approx(v(2.0 + h)).epsilon(1e-14));
  CHECK(t[5] == 0.0);

  const Polynomial r = v.divided_by_power(2);
  CHECK(r.degree() == 2);
  CHECK(r(3.0) == doctest::Approx(v(3.0) / 9.0));

  const Polynomial prod = Polynomial({1.0, 1.0}) * Polynomial({-1.0, 1.0});
  CHECK(prod.coefficient(0) == -1.0);
  CHECK(prod.coefficient(1) == 0.0);
  CHECK(prod.coefficient(2) == 1.0);
}

TEST_CASE("series text round trip") {
  SUBCASE("exact") {
    const auto s = PowerSeries::from_exact({Rational(1, 2), Rational(3, 4), Rational(-21, 8)}, "g", 0);
    std::stringstream ss;
    write_series(ss, s);
    CHECK(ss.str().find("-21/8") != std::string::npos);
    const auto r = read_series(ss);
    REQUIRE(r.is_exact());
    CHECK(r.exact == s.exact);
    CHECK(r.variable == "g");
    CHECK(r(0.1) == doctest::Approx(0.5 + 0.075 - 0.02625));
  }
  SUBCASE("floating") {
    PowerSeries s;
    s.coeffs = {0.1, 1.0 / 3.0, -2.5e-17};
    s.state = 2;
    std::stringstream ss;
    write_series(ss, s);
    const auto r = read_series(ss);
    CHECK_FALSE(r.is_exact());
    CHECK(r.state == 2);
    CHECK(r.coeffs == s.coeffs);
  }
}
