#pragma once

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "semicl/potentials.hpp"
#include "semicl/series.hpp"

namespace semicl {

/// coeff * sqrt(radicand), radicand square-free.
struct Surd {
  Rational coeff = 0;
  boost::multiprecision::cpp_int radicand = 1;

  double value() const;
};

/// <i|x^p|j> in the orthonormal oscillator basis, units m omega/hbar = 1.
Surd matrix_element(int p, int i, int j);

enum class Arithmetic { exact, floating };

/// E_n / (hbar omega) = sum_k c_k g^k for H = 1/2 (pi^2 + xi^2) + g xi^p.
/// Odd p is rejected in exact mode.
PowerSeries rs_coupling_series(int p, int n, std::size_t order, Arithmetic mode = Arithmetic::exact);

/// E_n / hbar as a series in hbar for a Potential1D, up to hbar^order.
///
/// With xi = sqrt(m omega/hbar) x the anharmonic term c_p x^p becomes
/// g^{p-2} w_p xi^p (in units of hbar omega) with g = sqrt(hbar) and
/// w_p = c_p / (m^{p/2} omega^{p/2+1}); the series in g only has even powers
/// left after summation, giving E/hbar = omega sum_j E_{2j} hbar^j.
PowerSeries rs_series(const Potential1D& v, int n, std::size_t order, Arithmetic mode = Arithmetic::exact);

/// Third-order energy of the single-monomial problem recomputed from the
/// first-order state alone: E_3 = <psi_1|x^p|psi_1> - E_1 <psi_1|psi_1>.
Rational wigner_third_order(int p, int n);

}  // namespace semicl
