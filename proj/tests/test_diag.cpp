#include <cmath>

#include <doctest.h>

#include "semicl/diag.hpp"
#include "semicl/errors.hpp"

using namespace semicl;

TEST_CASE("harmonic spectrum") {
  SUBCASE("finite differences") {
    const auto r = solve_spectrum(Potential1D::harmonic(1.0, 1.0), 1.0, DiagMethod::finite_difference, 2000, 4);
    for (std::size_t n = 0; n < 4; ++n) CHECK(std::abs(r.eigenvalues[n] - (n + 0.5)) <= 1e-8);
    CHECK(r.boundary_weight < 1e-10);
  }
  SUBCASE("basis is exact") {
    const auto r = solve_spectrum(Potential1D::harmonic(2.0, 1.5), 0.5, DiagMethod::harmonic_basis, 20, 4);
    for (std::size_t n = 0; n < 4; ++n) CHECK(r.eigenvalues[n] == doctest::Approx(0.5 * 1.5 * (n + 0.5)).epsilon(1e-13));
  }
  SUBCASE("hbar and mass scaling") {
    const auto r = solve_spectrum(Potential1D::harmonic(2.0, 3.0), 0.1, DiagMethod::finite_difference, 2000, 2);
    CHECK(std::abs(r.eigenvalues[0] - 0.15) <= 1e-8);
    CHECK(std::abs(r.eigenvalues[1] - 0.45) <= 1e-8);
  }
}

TEST_CASE("quartic ground state is stable under refinement") {
  const auto v = Potential1D::quartic(0.1);
  const auto a = solve_spectrum(v, 1.0, DiagMethod::finite_difference, 2000, 4);
  const auto b = solve_spectrum(v, 1.0, DiagMethod::finite_difference, 4000, 4);
  CHECK(std::abs(a.eigenvalues[0] - b.eigenvalues[0]) <= 1e-8);
  CHECK(b.error[0] <= 1e-8);
  // ascending
  for (std::size_t l = 1; l < 4; ++l) CHECK(b.eigenvalues[l] > b.eigenvalues[l - 1]);

  const auto basis = solve_spectrum(v, 1.0, DiagMethod::harmonic_basis, 160, 4);
  for (std::size_t l = 0; l < 4; ++l) CHECK(std::abs(basis.eigenvalues[l] - b.eigenvalues[l]) <= 1e-7);
  // literature value of the lambda = 0.1 ground state
  CHECK(b.eigenvalues[0] == doctest::Approx(0.559146327183519).epsilon(1e-9));
}

TEST_CASE("finite differences and basis agree on other suite potentials") {
  for (const auto& v : {Potential1D::sectic(0.1), Potential1D(1.0, 1.0, {{3, 0.1}, {4, 0.2}})}) {
    const auto fd = solve_spectrum(v, 1.0, DiagMethod::finite_difference, 4000, 4);
    const auto basis = solve_spectrum(v, 1.0, DiagMethod::harmonic_basis, 200, 4);
    for (std::size_t l = 0; l < 4; ++l) CHECK(std::abs(fd.eigenvalues[l] - basis.eigenvalues[l]) <= 1e-7);
  }
}

TEST_CASE("variational basis converges from above") {
  const auto v = Potential1D::quartic(0.5);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n : {10, 20, 40, 80}) {
    const auto r = solve_spectrum(v, 1.0, DiagMethod::harmonic_basis, n, 1);
    CHECK(r.eigenvalues[0] <= prev + 1e-14);
    prev = r.eigenvalues[0];
  }
}

TEST_CASE("supersymmetric zero mode") {
  const Superpotential w(Polynomial({0.0, 0.0, 0.5, 0.0, 0.1}));
  const auto vp = w.sector_potential(Superpotential::Sector::plus, 1.0);
  const auto r = solve_spectrum(vp, 1.0, 1.0, DiagMethod::finite_difference, 4000, 2);
  CHECK(std::abs(r.eigenvalues[0]) <= 1e-8);
  // the minus sector has the same spectrum without the zero mode
  const auto vm = w.sector_potential(Superpotential::Sector::minus, 1.0);
  const auto m = solve_spectrum(vm, 1.0, 1.0, DiagMethod::finite_difference, 4000, 1);
  CHECK(m.eigenvalues[0] == doctest::Approx(r.eigenvalues[1]).epsilon(1e-8));
}

TEST_CASE("tail ratio") {
  const auto v = Potential1D::quartic(0.1);
  const FundamentalSolution1D sol(v, Grid1D::uniform(8.0, 160));
  const auto r = solve_spectrum(v, 1.0, DiagMethod::finite_difference, 4000, 1);
  const auto t = tail_exponent(r, sol, 1.0, 3.0, 5.0);
  REQUIRE_FALSE(t.ratio.empty());
  for (double q : t.ratio) {
    CHECK(q >= 0.9);
    CHECK(q <= 1.1);
  }
  const auto g = gaussian_tail(sol, 3.0, 5.0);
  for (double q : g.ratio) CHECK(q < 1.0);
  CHECK(g.ratio.back() < 0.9);

  SUBCASE("harmonic ratio is one") {
    const auto h = Potential1D::harmonic(1.0, 1.0);
    const FundamentalSolution1D hs(h, Grid1D::uniform(8.0, 160));
    const auto hr = solve_spectrum(h, 1.0, DiagMethod::finite_difference, 4000, 1);
    const auto ht = tail_exponent(hr, hs, 1.0, 2.0, 5.0);
    CHECK(ht.max_deviation < 1e-5);
  }
}

TEST_CASE("bad inputs") {
  const auto v = Potential1D::quartic(0.1);
  CHECK_THROWS_AS(solve_spectrum(v, 0.0, DiagMethod::finite_difference, 100, 1), ValidationError);
  CHECK_THROWS_AS(solve_spectrum(v, 1.0, DiagMethod::finite_difference, 100, 0), ValidationError);
  SpectralOptions narrow;
  narrow.half_width = 1.5;
  CHECK_THROWS_AS(solve_spectrum(v, 1.0, DiagMethod::finite_difference, 400, 1, narrow), NumericalError);
}
