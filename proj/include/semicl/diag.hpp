#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "semicl/hj1d.hpp"
#include "semicl/polynomial.hpp"
#include "semicl/potentials.hpp"

namespace semicl {

enum class DiagMethod { finite_difference, harmonic_basis };

struct SpectralOptions {
  /// Half-width X of the finite-difference box; zero picks it automatically:
  /// int_0^{+-X} sqrt(2 m V) dx >= 60 hbar and V(+-X) >= 50 E_L.
  double half_width = 0.0;
  /// Keep eigenvector profiles (finite differences only).
  bool vectors = true;
  /// Basis frequency; zero uses sqrt(V''(0)/m), or 1 when V''(0) <= 0.
  double basis_omega = 0.0;
};

struct SpectralResult {
  DiagMethod method = DiagMethod::finite_difference;
  std::size_t size = 0;
  double half_width = 0.0;
  std::vector<double> eigenvalues;
  /// Per-level discretization error estimate from size halving.
  std::vector<double> error;
  /// Grid and log|psi_l| with psi_l(0) = 1, finest grid.
  std::vector<double> x;
  std::vector<std::vector<double>> log_abs_psi;
  std::vector<std::vector<int>> sign;
  /// max over levels of |psi| at the box edge relative to max |psi|.
  double boundary_weight = 0.0;
};

/// Lowest L eigenvalues of -hbar^2/(2m) d^2/dx^2 + V.
///
/// Finite differences: second-order stencil on [-X, X] with n interior points
/// (n+1 is rounded up to a multiple of 4), solved at n, n/2, n/4 and extrapolated
/// twice (h^2, h^4). Harmonic basis: dense matrix in the oscillator basis of
/// frequency `basis_omega`, compared against half the basis for the error.
SpectralResult solve_spectrum(const Polynomial& v, double mass, double hbar, DiagMethod method, std::size_t size,
                              std::size_t levels, SpectralOptions opt = {});
SpectralResult solve_spectrum(const Potential1D& v, double hbar, DiagMethod method, std::size_t size,
                              std::size_t levels, SpectralOptions opt = {});

struct TailProfile {
  std::vector<double> x;
  std::vector<double> ratio;
  double mean_deviation = 0.0;
  double max_deviation = 0.0;
};

/// -hbar log psi_0(x) / S0(x) on the grid points of `result` inside [lo, hi].
TailProfile tail_exponent(const SpectralResult& result, const FundamentalSolution1D& sol, double hbar, double lo,
                          double hi);
/// The same ratio for the Gaussian exp(-m omega x^2 / (2 hbar)).
TailProfile gaussian_tail(const FundamentalSolution1D& sol, double lo, double hi, std::size_t points = 41);

/// Columns level, eigenvalue, error.
void write_eigenvalues_csv(std::ostream& os, const SpectralResult& r);
/// Columns x, ratio.
void write_tail_csv(std::ostream& os, const TailProfile& t);

}  // namespace semicl
