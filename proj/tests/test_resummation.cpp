#include <cmath>
#include <sstream>

#include <boost/math/special_functions/expint.hpp>
#include <doctest.h>

#include "semicl/diag.hpp"
#include "semicl/errors.hpp"
#include "semicl/resummation.hpp"
#include "semicl/rspt.hpp"

using namespace semicl;

namespace {

PowerSeries series(std::vector<double> c) {
  PowerSeries s;
  s.coeffs = std::move(c);
  return s;
}

PowerSeries exp_series(int terms) {
  std::vector<double> c;
  for (int k = 0; k < terms; ++k) c.push_back(1.0 / std::tgamma(k + 1.0));
  return series(c);
}

}  // namespace

TEST_CASE("pade basics") {
  SUBCASE("geometric series") {
    const auto p = pade({1.0, 1.0, 1.0}, 0, 1);
    REQUIRE(p.q.size() == 2);
    CHECK(p.p[0] == doctest::Approx(1.0));
    CHECK(p.q[1] == doctest::Approx(-1.0));
    CHECK(p(0.3) == doctest::Approx(1.0 / 0.7));
    const auto poles = p.poles();
    REQUIRE(poles.size() == 1);
    CHECK(poles[0].real() == doctest::Approx(1.0));
  }
  SUBCASE("[2/2] of exp at 1") {
    // (1 + z/2 + z^2/12) / (1 - z/2 + z^2/12) = 19/7 at z = 1
    const auto r = pade_sum(exp_series(5), 2, 2, 1.0);
    CHECK(r.value == doctest::Approx(19.0 / 7).epsilon(1e-13));
    CHECK(std::abs(r.value - std::exp(1.0)) < 5e-3);
  }
  SUBCASE("zero tail gives the polynomial back") {
    const auto p = pade({1.0, 2.0, 3.0, 0.0, 0.0, 0.0, 0.0}, 3, 3);
    CHECK(p.reduced());
    CHECK(p.m == 0);
    CHECK(p(0.7) == doctest::Approx(1.0 + 1.4 + 3.0 * 0.49));
  }
  CHECK_THROWS(pade({1.0, 1.0}, 1, 1));
}

TEST_CASE("borel-pade of convergent input") {
  const auto r = borel_pade(series({0.5, 0.0, 0.0, 0.0, 0.0}), 2, 2, 0.3);
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.reliable);
}

TEST_CASE("entire functions are reproduced within the truncation remainder") {
  const double z = 0.5;
  const int terms = 9;
  const double remainder = std::pow(z, terms) / std::tgamma(terms + 1.0) * std::exp(z);
  CHECK(std::abs(pade_sum(exp_series(terms), 8, 0, z).value - std::exp(z)) <= remainder);
  CHECK(std::abs(pade_sum(exp_series(terms), 4, 4, z).value - std::exp(z)) <= remainder);
  CHECK(std::abs(borel_pade(exp_series(terms), 4, 4, z).value - std::exp(z)) <= remainder);
}

TEST_CASE("Euler series against the Stieltjes integral") {
  std::vector<double> c;
  for (int k = 0; k < 12; ++k) c.push_back((k % 2 ? -1.0 : 1.0) * std::tgamma(k + 1.0));
  const double z = 0.1;
  // int_0^inf e^{-t} / (1 + z t) dt = e^{1/z} E_1(1/z) / z
  const double exact = std::exp(1.0 / z) * boost::math::expint(1, 1.0 / z) / z;
  const auto r = borel_pade(series(c), 4, 4, z);
  CHECK(std::abs(r.value - exact) <= 1e-6);
  CHECK(r.reliable);
  // the Borel transform is exactly 1/(1 + s): a single pole on the negative axis
  REQUIRE(r.effective_m >= 1);
  CHECK(r.min_pole_angle_deg == doctest::Approx(180.0));
}

TEST_CASE("poles near the integration ray") {
  SUBCASE("a pair 3 degrees off the axis is flagged") {
    // B(s) = 1 / (1 - 2 cos(theta) s + s^2) has Taylor coefficients sin((k+1) theta) / sin(theta)
    const double theta = 3.0 * M_PI / 180.0;
    std::vector<double> c;
    for (int k = 0; k < 6; ++k) c.push_back(std::tgamma(k + 1.0) * std::sin((k + 1) * theta) / std::sin(theta));
    const auto r = borel_pade(series(c), 0, 2, 0.1);
    CHECK(std::isfinite(r.value));
    CHECK_FALSE(r.reliable);
    CHECK(r.min_pole_angle_deg == doctest::Approx(3.0).epsilon(1e-6));
    CHECK_FALSE(r.note.empty());
    ResummationOptions loose;
    loose.pole_angle_deg = 2.0;
    CHECK(borel_pade(series(c), 0, 2, 0.1, loose).reliable);
  }
  SUBCASE("a pole on the axis makes the integral diverge") {
    std::vector<double> c;
    for (int k = 0; k < 10; ++k) c.push_back(std::tgamma(k + 1.0));
    CHECK_THROWS_AS(borel_pade(series(c), 4, 4, 0.1), NumericalError);
  }
  CHECK_THROWS_AS(borel_pade(series({1.0, 1.0, 1.0}), 1, 1, -0.5), ValidationError);
}

TEST_CASE("quartic series against diagonalization") {
  const auto truth = solve_spectrum(Potential1D::quartic(0.1), 1.0, DiagMethod::finite_difference, 4000, 1);
  const double e0 = truth.eigenvalues[0];
  // 10 hbar-coefficients of E/hbar at lambda = 0.1, evaluated at hbar = 1
  const auto s = rs_series(Potential1D::quartic(0.1), 0, 9);
  REQUIRE(s.size() == 10);
  const auto r = borel_pade(s, 4, 5, 1.0);
  CHECK(std::abs(r.value - e0) <= 1e-3);
  CHECK(r.reliable);

  // [L/M] -> [L+1/M+1] drift
  const auto longer = rs_series(Potential1D::quartic(0.1), 0, 11);
  const auto a = borel_pade(longer, 4, 4, 1.0), b = borel_pade(longer, 5, 5, 1.0);
  CHECK(std::abs(a.value - b.value) <= 1e-4 * std::abs(b.value));
  CHECK(std::abs(b.value - e0) <= 1e-4);
}

TEST_CASE("report csv") {
  std::ostringstream os;
  write_report_csv(os, {pade_sum(exp_series(5), 2, 2, 1.0)});
  std::istringstream is(os.str());
  std::string header, row, extra;
  std::getline(is, header);
  std::getline(is, row);
  CHECK(header.rfind("method,", 0) == 0);
  CHECK(row.rfind("pade,", 0) == 0);
  CHECK_FALSE(std::getline(is, extra));
}
