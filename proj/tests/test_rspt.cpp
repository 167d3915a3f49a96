#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include "semicl/errors.hpp"
#include "semicl/rspt.hpp"

using namespace semicl;

namespace {

// Normalized oscillator eigenfunction psi_n(x), m omega / hbar = 1, by the stable recurrence.
double hermite_function(int n, double x) {
  double p0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
  if (n == 0) return p0;
  double p1 = std::sqrt(2.0) * x * p0;
  for (int k = 1; k < n; ++k) {
    const double p2 = std::sqrt(2.0 / (k + 1)) * x * p1 - std::sqrt(double(k) / (k + 1)) * p0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double quadrature_element(int p, int i, int j) {
  // the integrand is below 1e-40 outside |x| < 16 for these orders
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double x) { return hermite_function(i, x) * std::pow(x, p) * hermite_function(j, x); }, -16.0, 16.0, 15, 1e-14);
}

}  // namespace

TEST_CASE("ladder matrix elements") {
  CHECK(matrix_element(2, 0, 0).value() == doctest::Approx(0.5));
  CHECK(matrix_element(4, 0, 0).coeff == Rational(3, 4));
  CHECK(matrix_element(4, 0, 0).radicand == 1);
  CHECK(matrix_element(3, 0, 0).coeff == 0);
  CHECK(matrix_element(4, 1, 1).value() == doctest::Approx(15.0 / 4));
  // <2|x^2|0> = 1/sqrt(2)
  CHECK(matrix_element(2, 2, 0).value() == doctest::Approx(std::sqrt(0.5)));
  // selection rules
  CHECK(matrix_element(4, 0, 6).coeff == 0);
  CHECK(matrix_element(3, 1, 3).coeff == 0);

  for (int p : {1, 2, 3, 4, 6})
    for (int i = 0; i <= 6; ++i)
      for (int j = i; j <= 8; ++j) {
        const double exact = matrix_element(p, i, j).value();
        CHECK(exact == doctest::Approx(quadrature_element(p, i, j)).epsilon(1e-10).scale(1.0));
        CHECK(matrix_element(p, j, i).value() == exact);
      }
}

TEST_CASE("quartic coupling series") {
  const auto s = rs_coupling_series(4, 0, 6);
  REQUIRE(s.is_exact());
  CHECK(s.exact[0] == Rational(1, 2));
  CHECK(s.exact[1] == Rational(3, 4));
  CHECK(s.exact[2] == Rational(-21, 8));
  CHECK(s.exact[3] == Rational(333, 16));
  CHECK(s.exact[4] == Rational(-30885, 128));
  CHECK(s.exact[5] == Rational(916731, 256));
  CHECK(s.exact[6] == Rational(-65518401, 1024));

  const auto e1 = rs_coupling_series(4, 1, 2);
  CHECK(e1.exact[0] == Rational(3, 2));
  CHECK(e1.exact[1] == Rational(15, 4));
}

TEST_CASE("zero perturbation") {
  const auto s = rs_series(Potential1D::harmonic(1.0, 1.0), 3, 5);
  CHECK(s.coeffs[0] == 3.5);
  for (std::size_t k = 1; k < s.size(); ++k) CHECK(s.coeffs[k] == 0.0);
}

TEST_CASE("hbar bookkeeping") {
  // E/hbar = omega sum_k c_k (lambda hbar)^k for V = x^2/2 + lambda x^4
  const double lambda = 0.1;
  const auto h = rs_series(Potential1D::quartic(lambda), 0, 4);
  const auto g = rs_coupling_series(4, 0, 4);
  for (std::size_t k = 0; k <= 4; ++k) CHECK(h.coeffs[k] == doctest::Approx(g.coeffs[k] * std::pow(lambda, double(k))));

  // a sextic term only enters at even powers of hbar
  const auto s = rs_series(Potential1D::sectic(0.05), 0, 4);
  CHECK(s.coeffs[1] == 0.0);
  CHECK(s.coeffs[2] == doctest::Approx(15.0 / 8 * 0.05));
  CHECK(s.coeffs[3] == 0.0);

  // mass and frequency scaling: x -> x sqrt(hbar / (m omega))
  const double m = 2.0, w = 1.5, c4 = 0.2;
  const auto scaled = rs_series(Potential1D(m, w, {{4, c4}}), 0, 3);
  const double wp = c4 / (m * m * std::pow(w, 3));
  for (std::size_t k = 0; k <= 3; ++k) CHECK(scaled.coeffs[k] == doctest::Approx(w * g.coeffs[k] * std::pow(wp, double(k))));
}

TEST_CASE("third order from the first-order state") {
  for (int n : {0, 1, 2})
    for (int p : {4, 6}) CHECK(wigner_third_order(p, n) == rs_coupling_series(p, n, 3).exact[3]);
}

TEST_CASE("floating mode tracks exact mode") {
  for (int p : {4, 6}) {
    const auto e = rs_coupling_series(p, 0, 8, Arithmetic::exact);
    const auto f = rs_coupling_series(p, 0, 8, Arithmetic::floating);
    for (std::size_t k = 0; k <= 8; ++k) CHECK(std::abs(f.coeffs[k] - e.coeffs[k]) <= 1e-12 * std::abs(e.coeffs[k]));
  }
}

TEST_CASE("odd perturbations") {
  CHECK_THROWS_AS(rs_coupling_series(3, 0, 2, Arithmetic::exact), ValidationError);
  // x^3 perturbation: first order vanishes, second order -11/8 g^2 (ladder algebra)
  const auto f = rs_coupling_series(3, 0, 2, Arithmetic::floating);
  CHECK(f.coeffs[1] == doctest::Approx(0.0).scale(1.0));
  CHECK(f.coeffs[2] == doctest::Approx(-11.0 / 8));
}
