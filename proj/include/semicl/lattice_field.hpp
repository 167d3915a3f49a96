#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "semicl/polynomial.hpp"

namespace semicl {

/// One Fourier component of boundary data: amp * cos(2 pi k.x / L + phase).
struct BoundaryMode {
  std::vector<int> wave;
  double amp = 0.0;
  double phase = 0.0;
};

/// Euclidean scalar field on (-T, 0] x (periodic lattice with N^n sites, spacing a).
///
/// Time nodes run from t_0 = -T up to t_M = 0; the step next to t = 0 is dt and
/// steps grow by `stretch` going into the past, capped at dt_max.
struct LatticeProblem {
  int n = 1;
  std::size_t N = 64;
  double a = 0.25;
  double dt = 0.01;
  double stretch = 1.0;
  double dt_max = 0.0;    // 0: no cap
  double horizon = 0.0;   // 0: ln(1/decay_tol) / m0 plus a margin of 4 / m0
  double decay_tol = 1e-10;
  /// P(z) = sum_j a_j z^j with a_0 = a_1 = 0.
  Polynomial poly;
  /// Boundary values on the t = 0 slice, N^n entries, x_1 fastest.
  std::vector<double> phi;

  std::size_t sites() const;
  double length() const { return static_cast<double>(N) * a; }
  double volume_element() const;
  /// m0 = sqrt(2 a_2).
  double mass() const;
  /// Time nodes t_0 .. t_M.
  std::vector<double> time_nodes() const;
  /// Throws ValidationError on a malformed problem or an inadmissible polynomial.
  void validate() const;

  /// Halves every step (stretch -> sqrt(stretch)).
  LatticeProblem refined() const;
  LatticeProblem with_boundary(std::vector<double> values) const;
  LatticeProblem scaled(double amplitude) const;

  std::vector<double> modes_to_sites(const std::vector<BoundaryMode>& modes) const;
};

struct FieldOptions {
  std::size_t max_newton = 80;
  std::size_t max_cg = 4000;
  double cg_tol = 1e-7;
  /// Relative to the field-equation scale h_min (|grad|^2 amp + |P'(amp)|), floored at rounding.
  double grad_tol = 1e-10;
};

/// Minimizer of the discrete action; field is (M+1) x N^n, time-major.
struct FieldMinimizer {
  std::vector<double> t;
  std::size_t sites = 0;
  std::vector<double> field;
  double action = 0.0;
  std::size_t newton_iterations = 0;
  std::size_t cg_iterations = 0;
  double gradient_norm = 0.0;
  double gradient_scale = 0.0;
  /// Line search had to shorten at least one Newton step.
  bool step_halving = false;

  std::size_t slices() const { return t.size(); }
  const double* slice(std::size_t j) const { return field.data() + j * sites; }
};

FieldMinimizer minimize_field(const LatticeProblem& p, FieldOptions opt = {},
                              const std::vector<double>* initial = nullptr);

/// Discrete action of an arbitrary field with the problem's boundary slice.
double lattice_action(const LatticeProblem& p, const std::vector<double>& field);

enum class GradientRule { discrete_momentum, three_point };

/// dS/dphi per unit volume on the boundary slice.
std::vector<double> functional_gradient(const LatticeProblem& p, const FieldMinimizer& f,
                                        GradientRule rule = GradientRule::discrete_momentum);

/// Central differences of the re-minimized action at the given sites.
std::vector<double> functional_gradient_fd(const LatticeProblem& p, const std::vector<std::size_t>& sites,
                                           double step, FieldOptions opt = {});

/// Lattice sum of 1/2 g^2 - 1/2 |grad phi|^2 - P(phi) divided by the sum of 1/2 |grad phi|^2 + P(phi).
double hj_residual(const LatticeProblem& p, const std::vector<double>& gradient);

/// Energy of each time interval: 1/2 Phi_t^2 - 1/2 grad Phi_j . grad Phi_{j+1} - P, with the
/// quadratic part of P taken as a_2 Phi_j Phi_{j+1} and the rest averaged over the two ends.
struct EnergyProfile {
  std::vector<double> t;
  std::vector<double> e;
  double max_abs = 0.0;
};
EnergyProfile energy_profile(const LatticeProblem& p, const FieldMinimizer& f);

/// Ratio of the explicit flow derivatives, independent of S0.
double virial_t(const LatticeProblem& p, const std::vector<double>& phi);

struct VirialPoint {
  double amplitude = 0.0;
  double action = 0.0;
  double r = 0.0;
  double t = 0.0;
  std::size_t newton_iterations = 0;
  bool step_halving = false;
};
/// Sweep phi_A = A * p.phi over ascending amplitudes.
std::vector<VirialPoint> virial_ratio(const LatticeProblem& p, const std::vector<double>& amplitudes,
                                      FieldOptions opt = {});

/// Squared lattice momentum of the wave vector k.
double lattice_k2(const LatticeProblem& p, const std::vector<int>& k);

/// Decaying root of r + 1/r = 2 + dt^2 mu2 and the lattice frequency (1/r - r)/(2 dt).
struct FreeMode {
  double r = 0.0;
  double omega = 0.0;
};
FreeMode free_mode(double dt, double mu2);

/// Exact discrete free action with mass m0 on the problem's time grid.
double free_action(const LatticeProblem& p, double m0);

struct GaussianBound {
  double c = 0.0;
  double m0 = 0.0;
  double s0 = 0.0;
  double s0_free = 0.0;
  double slack = 0.0;
};
/// c <= 0 selects a_2, which needs all coefficients nonnegative.
GaussianBound gaussian_bound(const LatticeProblem& p, const FieldMinimizer& f, double c = 0.0);

void write_snapshot(std::ostream& os, const LatticeProblem& p, const FieldMinimizer& f);
struct Snapshot {
  int n = 0;
  std::size_t N = 0;
  double a = 0.0;
  std::vector<double> t;
  std::vector<double> field;
};
Snapshot read_snapshot(std::istream& is);

void write_energy_csv(std::ostream& os, const EnergyProfile& e);
void write_virial_csv(std::ostream& os, const std::vector<VirialPoint>& pts);

}  // namespace semicl
