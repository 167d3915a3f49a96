#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "semicl/potentials.hpp"

namespace semicl {

/// -T = t_0 < ... < t_M = 0, steps growing geometrically away from t = 0.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> t);

  /// Steps h_min r^j capped at h_max, accumulated backwards from 0 until the horizon is covered.
  static TimeGrid geometric(double horizon, double h_min = 1e-5, double ratio = 1.0001, double h_max = 5e-3);
  /// Defaults above with horizon 24 / min omega.
  static TimeGrid for_potential(const PotentialND& v);

  const std::vector<double>& t() const { return t_; }
  std::size_t size() const { return t_.size(); }
  double horizon() const { return -t_.front(); }
  double step(std::size_t j) const { return t_[j + 1] - t_[j]; }

 private:
  std::vector<double> t_;
};

struct MinimizeOptions {
  double decay_tol = 1e-8;
  std::size_t max_iterations = 60;
  /// Stop when the Newton decrement g.d falls below this times (1 + action).
  double decrement_tol = 1e-24;
  /// Newton on the block-tridiagonal Hessian; otherwise Barzilai-Borwein gradient steps.
  bool newton = true;
  std::size_t max_gradient_iterations = 200000;
};

/// Discrete minimizer of sum_j [m |g_{j+1} - g_j|^2 / (2 h_j) + h_j (V(g_j) + V(g_{j+1})) / 2]
/// with g_0 = 0 and g_M = x.
struct Trajectory {
  Eigen::VectorXd x;
  std::vector<double> t;
  Eigen::MatrixXd gamma;  // (M+1) x n
  double action = 0.0;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  bool used_newton = true;
};

Trajectory minimize_action(const PotentialND& v, const Eigen::VectorXd& x, const TimeGrid& grid,
                           MinimizeOptions opt = {});

enum class EndpointRule {
  /// m times the derivative of the cubic through the last four nodes.
  cubic,
  /// derivative of the discrete action with respect to the endpoint.
  discrete_momentum,
};

struct S0Gradient {
  double s0 = 0.0;
  Eigen::VectorXd gradient;
  /// | |grad S0|^2 / (2m) - V(x) |
  double hj_residual = 0.0;
};

S0Gradient s0_and_gradient(const PotentialND& v, const Trajectory& traj, EndpointRule rule = EndpointRule::cubic);

/// 1/2 m |gdot|^2 - V(gamma) at every node, gdot from the discrete momentum.
std::vector<double> inverted_energy(const PotentialND& v, const Trajectory& traj);
/// Largest discrete Euler-Lagrange residual over interior nodes, per unit time.
double euler_lagrange_residual(const PotentialND& v, const Trajectory& traj);

struct HessianTransport {
  std::vector<double> t;
  std::vector<Eigen::MatrixXd> h;
  const Eigen::MatrixXd& endpoint() const { return h.back(); }
};

/// dH/dt = hess V(gamma(t)) - H^2/m from H(t_0) = m diag(omega), implicit trapezoid.
HessianTransport hessian_transport(const PotentialND& v, const Trajectory& traj);

/// S1 at the endpoint from dS1/dt = tr H / (2m) - 1/2 sum omega_i, S1(t_0) = 0.
double s1_along_flow(const PotentialND& v, const HessianTransport& ht);

/// Columns t, gamma_1..gamma_n, E_ip.
void write_trajectory_csv(std::ostream& os, const PotentialND& v, const Trajectory& traj);
/// Columns t, trH.
void write_hessian_csv(std::ostream& os, const HessianTransport& ht);

}  // namespace semicl
