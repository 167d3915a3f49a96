#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "semicl/hj1d.hpp"
#include "semicl/jet.hpp"
#include "semicl/polynomial.hpp"
#include "semicl/potentials.hpp"
#include "semicl/series.hpp"

namespace semicl {

struct HierarchyOptions {
  /// Degree of the origin series; zero picks 80 + 3K.
  std::size_t origin_degree = 0;
  /// Allowed relative mismatch between the origin series and the pointwise
  /// solution at the switch radius.
  double regularity_tol = 1e-8;
};

/// Ground-state transport hierarchy, a_k = S_(k)/k!, E = hbar sum_k hbar^k e_k.
///
/// a_0' a_n' = 1/2 a_{n-1}'' - 1/2 sum_{i+j=n, i,j>=1} a_i' a_j' + m [n=1] V_1 - m e_{n-1},
/// with V_1 an optional hbar-linear potential term. The right side must vanish
/// where a_0' does, which fixes e_{n-1}.
class HierarchyState {
 public:
  HierarchyState(std::shared_ptr<const FundamentalSolution1D> sol, std::size_t order, Polynomial hbar_potential = {},
                 HierarchyOptions opt = {});

  const FundamentalSolution1D& solution() const { return *sol_; }
  std::shared_ptr<const FundamentalSolution1D> solution_ptr() const { return sol_; }
  std::size_t order() const { return K_; }
  double mass() const { return sol_->mass(); }

  /// e_0 .. e_{K-1}.
  const std::vector<double>& energy() const { return e_; }
  /// Factorial normalization S_(k) = k! a_k and E_(k) = k! e_k.
  std::vector<double> energy_factorial() const;
  /// E/hbar as a series in hbar.
  PowerSeries energy_series() const;

  /// a_k on the grid nodes, k = 0..K (a_0 = S0).
  const std::vector<double>& profile(std::size_t k) const { return a_[k]; }
  /// a_0'(x) .. a_K'(x).
  std::vector<double> derivatives(double x) const;
  /// Jets of a_0' .. a_n' about x0 (x0 outside the origin patch) of the given degree.
  std::vector<Jet> derivative_jets(double x0, std::size_t n, std::size_t degree) const;
  /// Origin series of a_k'.
  const Jet& origin_series(std::size_t k) const { return origin_[k]; }
  double a(std::size_t k, double x) const;

  /// Largest relative mismatch between the two branches at +-switch radius.
  double regularity_defect() const { return defect_; }

 private:
  std::shared_ptr<const FundamentalSolution1D> sol_;
  std::size_t K_;
  Polynomial v1_;
  std::vector<double> e_;
  std::vector<Jet> origin_;
  std::vector<std::vector<double>> a_;
  double defect_ = 0.0;
};

HierarchyState ground_hierarchy(std::shared_ptr<const FundamentalSolution1D> sol, std::size_t order,
                                HierarchyOptions opt = {});

struct ExcitedLeading {
  std::vector<double> b0;  // y^m on the grid
  double delta0 = 0.0;     // m omega
};

ExcitedLeading excited_leading(const FundamentalSolution1D& sol, const SternbergMap1D& map, int quantum_number);

/// Prefactor b = sum_n hbar^n b_n of psi = b exp(-S/hbar) for the level with
/// quantum number m*, b_0 = y^{m*}, and the shifts delta_n of E* - E_0.
///
/// (1/m) sum_{i+j=n} a_i' b_j' - (1/2m) b_{n-1}'' = sum_{k+l=n} delta_k b_l.
/// Coefficient m* of every b_n with n >= 1 is zero at the origin; delta_n is
/// the solvability condition of that coefficient.
class ExcitedState {
 public:
  ExcitedState(const HierarchyState& ground, int quantum_number, std::size_t order, HierarchyOptions opt = {});

  int quantum_number() const { return m_; }
  std::size_t order() const { return N_; }
  const std::vector<double>& delta() const { return delta_; }
  const std::vector<double>& profile(std::size_t n) const { return b_[n]; }
  double b(std::size_t n, double x) const;
  /// E*/hbar coefficients e_k + delta_k, k = 0..min(K-1, N).
  std::vector<double> energy() const;
  double regularity_defect() const { return defect_; }

 private:
  struct Patch {
    double center, lo, hi;
    std::vector<Jet> b;
  };
  std::vector<Jet> local_jets(double x0, const std::vector<double>& values, std::size_t degree) const;
  void march(double start, double end, std::vector<double> values);

  const HierarchyState* ground_;
  int m_;
  std::size_t N_;
  std::vector<double> delta_;
  std::vector<Jet> origin_;
  std::vector<Patch> patches_;
  std::vector<std::vector<double>> b_;
  double defect_ = 0.0;
};

HierarchyState susy_ground(const Superpotential& w, Superpotential::Sector sector, std::size_t order, const Grid1D& grid,
                           HierarchyOptions opt = {});

struct Assembly {
  std::vector<double> x;
  std::vector<double> log_abs_psi;
  std::vector<int> sign;
  double energy = 0.0;
};

/// log|psi| = log|b(x; hbar)| - sum_k hbar^{k-1} a_k(x) on the grid, normalization omitted.
/// `ground_terms` limits the a_k used (k <= ground_terms); the energy sum uses e_0..e_{ground_terms-1}.
Assembly assemble(const HierarchyState& state, double hbar, std::optional<std::size_t> ground_terms = std::nullopt,
                  const ExcitedState* excited = nullptr);

/// Columns x, a_0 .. a_K.
void write_profiles_csv(std::ostream& os, const HierarchyState& state);
/// Columns k, e_k, delta_k.
void write_coefficients_csv(std::ostream& os, const HierarchyState& state, const ExcitedState* excited = nullptr);

}  // namespace semicl
