#include "semicl/hjnd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "semicl/errors.hpp"

namespace semicl {

TimeGrid::TimeGrid(std::vector<double> t) : t_(std::move(t)) {
  if (t_.size() < 5) throw ValidationError("time grid: need at least five nodes");
  if (t_.back() != 0.0) throw ValidationError("time grid: last node must be 0");
  for (std::size_t i = 1; i < t_.size(); ++i)
    if (!(t_[i] > t_[i - 1])) throw ValidationError("time grid: nodes must increase");
}

TimeGrid TimeGrid::geometric(double horizon, double h_min, double ratio, double h_max) {
  if (!(horizon > 0.0) || !(h_min > 0.0) || ratio < 1.0 || h_max < h_min)
    throw ValidationError("time grid: bad geometric parameters");
  std::vector<double> back{0.0};
  double h = h_min, s = 0.0;
  while (s < horizon) {
    s += h;
    back.push_back(-s);
    h = std::min(h * ratio, h_max);
  }
  std::reverse(back.begin(), back.end());
  return TimeGrid(std::move(back));
}

TimeGrid TimeGrid::for_potential(const PotentialND& v) {
  const double wmin = *std::min_element(v.omega().begin(), v.omega().end());
  return geometric(24.0 / wmin);
}

namespace {

struct Discretization {
  const PotentialND& v;
  const std::vector<double>& t;
  double m;
  std::size_t n, last;  // last = M

  double h(std::size_t j) const { return t[j + 1] - t[j]; }

  double action(const Eigen::MatrixXd& g) const {
    double s = 0.0;
    double vprev = v.eval(g.row(0).transpose());
    for (std::size_t j = 0; j < last; ++j) {
      const double vnext = v.eval(g.row(static_cast<Eigen::Index>(j + 1)).transpose());
      const double hj = h(j);
      s += 0.5 * m * (g.row(static_cast<Eigen::Index>(j + 1)) - g.row(static_cast<Eigen::Index>(j))).squaredNorm() / hj +
           0.5 * hj * (vprev + vnext);
      vprev = vnext;
    }
    return s;
  }

  // rows 1..M-1; rows 0 and M are zero
  Eigen::MatrixXd gradient(const Eigen::MatrixXd& g) const {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(g.rows(), g.cols());
    for (std::size_t j = 1; j < last; ++j) {
      const auto J = static_cast<Eigen::Index>(j);
      const double hm = h(j - 1), hp = h(j);
      r.row(J) = m * (g.row(J) - g.row(J - 1)) / hm - m * (g.row(J + 1) - g.row(J)) / hp +
                 0.5 * (hm + hp) * v.eval_grad(g.row(J).transpose()).transpose();
    }
    return r;
  }

  // Solves H d = rhs for the block-tridiagonal Hessian; false if a pivot block is not positive definite.
  bool newton_solve(const Eigen::MatrixXd& g, const Eigen::MatrixXd& rhs, Eigen::MatrixXd& d) const {
    const auto ni = static_cast<Eigen::Index>(n);
    std::vector<Eigen::LLT<Eigen::MatrixXd>> s(last);
    std::vector<Eigen::VectorXd> y(last);
    Eigen::MatrixXd prev_inv;
    for (std::size_t j = 1; j < last; ++j) {
      const auto J = static_cast<Eigen::Index>(j);
      const double hm = h(j - 1), hp = h(j);
      Eigen::MatrixXd a = 0.5 * (hm + hp) * v.eval_hess(g.row(J).transpose());
      a.diagonal().array() += m * (1.0 / hm + 1.0 / hp);
      Eigen::VectorXd yj = rhs.row(J).transpose();
      if (j > 1) {
        const double c = m / hm;
        a -= c * c * prev_inv;
        yj += c * s[j - 1].solve(y[j - 1]);
      }
      s[j].compute(a);
      if (s[j].info() != Eigen::Success) return false;
      prev_inv = s[j].solve(Eigen::MatrixXd::Identity(ni, ni));
      y[j] = std::move(yj);
    }
    d = Eigen::MatrixXd::Zero(rhs.rows(), rhs.cols());
    for (std::size_t j = last - 1; j >= 1; --j) {
      Eigen::VectorXd r = y[j];
      if (j + 1 < last) r += (m / h(j)) * d.row(static_cast<Eigen::Index>(j + 1)).transpose();
      d.row(static_cast<Eigen::Index>(j)) = s[j].solve(r).transpose();
    }
    return true;
  }
};

}  // namespace

Trajectory minimize_action(const PotentialND& v, const Eigen::VectorXd& x, const TimeGrid& grid, MinimizeOptions opt) {
  const auto n = static_cast<std::size_t>(v.dimension());
  if (static_cast<std::size_t>(x.size()) != n) throw ValidationError("minimize_action: boundary point has wrong dimension");
  const double wmin = *std::min_element(v.omega().begin(), v.omega().end());
  if (wmin * grid.horizon() < 20.0)
    throw ValidationError(fmt::format("minimize_action: horizon {} too short, need omega_min T >= 20", grid.horizon()));

  Trajectory tr;
  tr.x = x;
  tr.t = grid.t();
  const std::size_t last = tr.t.size() - 1;
  Discretization d{v, tr.t, v.mass(), n, last};
  tr.gamma.resize(static_cast<Eigen::Index>(last + 1), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j <= last; ++j)
    for (std::size_t i = 0; i < n; ++i)
      tr.gamma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = x[static_cast<Eigen::Index>(i)] * std::exp(v.omega()[i] * tr.t[j]);
  tr.gamma.row(0).setZero();
  tr.gamma.row(static_cast<Eigen::Index>(last)) = x.transpose();

  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  double s = d.action(tr.gamma);
  bool converged = false;
  bool newton = opt.newton;
  Eigen::MatrixXd g = d.gradient(tr.gamma), step;
  for (tr.iterations = 0; newton && tr.iterations < opt.max_iterations; ++tr.iterations) {
    if (!d.newton_solve(tr.gamma, -g, step)) {
      newton = false;
      break;
    }
    const double slope = (g.array() * step.array()).sum();
    // the decrement estimates S - S_min; below the rounding level of S nothing is left to gain
    if (-slope < std::max(opt.decrement_tol, 16.0 * std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(s)) || step.cwiseAbs().maxCoeff() < 1e-13 * scale) {
      tr.gamma += step;
      converged = true;
      break;
    }
    double alpha = 1.0;
    Eigen::MatrixXd trial = tr.gamma + step;
    double st = d.action(trial);
    while (st > s + 1e-4 * alpha * slope && alpha > 1e-12) {
      alpha *= 0.5;
      trial = tr.gamma + alpha * step;
      st = d.action(trial);
    }
    tr.gamma = std::move(trial);
    s = st;
    g = d.gradient(tr.gamma);
    if (alpha == 1.0 && step.cwiseAbs().maxCoeff() < 1e-12 * scale) {
      converged = true;
      break;
    }
  }
  if (!newton) {
    // Barzilai-Borwein gradient iteration
    tr.used_newton = false;
    Eigen::MatrixXd gprev = g, xprev = tr.gamma;
    double alpha = 1e-4;
    // rounding in the kinetic differences caps how small the gradient can get
    double h_min = tr.t[last] - tr.t[last - 1];
    for (std::size_t j = 0; j < last; ++j) h_min = std::min(h_min, d.h(j));
    const double floor = std::max(1e-14, 64.0 * std::numeric_limits<double>::epsilon() * v.mass() / h_min) * scale;
    for (std::size_t it = 0; it < opt.max_gradient_iterations; ++it, ++tr.iterations) {
      tr.gamma -= alpha * g;
      g = d.gradient(tr.gamma);
      const Eigen::MatrixXd sx = tr.gamma - xprev, sy = g - gprev;
      const double sty = (sx.array() * sy.array()).sum();
      alpha = sty > 0.0 ? sx.squaredNorm() / sty : 1e-4;
      xprev = tr.gamma;
      gprev = g;
      if (g.cwiseAbs().maxCoeff() < floor) {
        converged = true;
        break;
      }
    }
  }
  g = d.gradient(tr.gamma);
  tr.action = d.action(tr.gamma);
  double gn = 0.0;
  for (std::size_t j = 1; j < last; ++j)
    gn = std::max(gn, g.row(static_cast<Eigen::Index>(j)).cwiseAbs().maxCoeff() / (0.5 * (d.h(j - 1) + d.h(j))));
  tr.gradient_norm = gn;
  if (!converged)
    throw ConvergenceError(fmt::format("minimize_action: no convergence after {} iterations, gradient {:.3g}",
                                       tr.iterations, gn));
  const double first = tr.gamma.row(1).norm();
  if (first > opt.decay_tol)
    throw NumericalError(fmt::format("minimize_action: horizon too short, |gamma(t_1)| = {:.3g}", first));
  return tr;
}

S0Gradient s0_and_gradient(const PotentialND& v, const Trajectory& tr, EndpointRule rule) {
  const std::size_t last = tr.t.size() - 1;
  const double m = v.mass();
  S0Gradient r;
  r.s0 = tr.action;
  if (rule == EndpointRule::cubic) {
    const double tm = tr.t[last];
    Eigen::VectorXd vel = Eigen::VectorXd::Zero(tr.x.size());
    for (std::size_t k = last - 3; k <= last; ++k) {
      double w;
      if (k == last) {
        w = 0.0;
        for (std::size_t l = last - 3; l < last; ++l) w += 1.0 / (tm - tr.t[l]);
      } else {
        double num = 1.0, den = 1.0;
        for (std::size_t l = last - 3; l <= last; ++l) {
          if (l == k) continue;
          den *= tr.t[k] - tr.t[l];
          if (l != last) num *= tm - tr.t[l];
        }
        w = num / den;
      }
      vel += w * tr.gamma.row(static_cast<Eigen::Index>(k)).transpose();
    }
    r.gradient = m * vel;
  } else {
    const double h = tr.t[last] - tr.t[last - 1];
    r.gradient = m * (tr.x - tr.gamma.row(static_cast<Eigen::Index>(last - 1)).transpose()) / h + 0.5 * h * v.eval_grad(tr.x);
  }
  r.hj_residual = std::abs(r.gradient.squaredNorm() / (2.0 * m) - v.eval(tr.x));
  return r;
}

std::vector<double> inverted_energy(const PotentialND& v, const Trajectory& tr) {
  const std::size_t last = tr.t.size() - 1;
  const double m = v.mass();
  std::vector<double> e(last + 1);
  for (std::size_t j = 0; j < last; ++j) {
    const auto J = static_cast<Eigen::Index>(j);
    const double h = tr.t[j + 1] - tr.t[j];
    const Eigen::VectorXd q = tr.gamma.row(J).transpose();
    const Eigen::VectorXd p = m * (tr.gamma.row(J + 1) - tr.gamma.row(J)).transpose() / h - 0.5 * h * v.eval_grad(q);
    e[j] = p.squaredNorm() / (2.0 * m) - v.eval(q);
  }
  const double h = tr.t[last] - tr.t[last - 1];
  const Eigen::VectorXd p =
      m * (tr.x - tr.gamma.row(static_cast<Eigen::Index>(last - 1)).transpose()) / h + 0.5 * h * v.eval_grad(tr.x);
  e[last] = p.squaredNorm() / (2.0 * m) - v.eval(tr.x);
  return e;
}

double euler_lagrange_residual(const PotentialND& v, const Trajectory& tr) {
  const std::size_t last = tr.t.size() - 1;
  Discretization d{v, tr.t, v.mass(), static_cast<std::size_t>(v.dimension()), last};
  const Eigen::MatrixXd g = d.gradient(tr.gamma);
  double r = 0.0;
  for (std::size_t j = 1; j < last; ++j)
    r = std::max(r, g.row(static_cast<Eigen::Index>(j)).cwiseAbs().maxCoeff() / (0.5 * (d.h(j - 1) + d.h(j))));
  return r;
}

HessianTransport hessian_transport(const PotentialND& v, const Trajectory& tr) {
  const std::size_t last = tr.t.size() - 1;
  const double m = v.mass();
  const auto n = static_cast<Eigen::Index>(v.dimension());
  HessianTransport ht;
  ht.t = tr.t;
  ht.h.reserve(last + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = m * v.omega()[static_cast<std::size_t>(i)];
  ht.h.push_back(h);
  Eigen::MatrixXd k_prev = v.eval_hess(tr.gamma.row(0).transpose());
  for (std::size_t j = 0; j < last; ++j) {
    const double dt = tr.t[j + 1] - tr.t[j];
    const Eigen::MatrixXd k_next = v.eval_hess(tr.gamma.row(static_cast<Eigen::Index>(j + 1)).transpose());
    // (dt/2m) X^2 + X = B, solved on the eigenvalues of B
    Eigen::MatrixXd b = h + 0.5 * dt * (k_prev + k_next - h * h / m);
    b = 0.5 * (b + b.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    Eigen::VectorXd lam = es.eigenvalues();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double disc = 1.0 + 2.0 * dt * lam[i] / m;
      if (!(disc > 0.0)) throw NumericalError(fmt::format("hessian transport: blow-up at t = {}", tr.t[j + 1]));
      lam[i] = 2.0 * lam[i] / (1.0 + std::sqrt(disc));
    }
    h = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    h = 0.5 * (h + h.transpose()).eval();
    if (!h.allFinite()) throw NumericalError("hessian transport: non-finite H");
    ht.h.push_back(h);
    k_prev = k_next;
  }
  return ht;
}

double s1_along_flow(const PotentialND& v, const HessianTransport& ht) {
  const double m = v.mass();
  double e0 = 0.0;
  for (double w : v.omega()) e0 += 0.5 * w;
  auto rate = [&](std::size_t j) { return ht.h[j].trace() / (2.0 * m) - e0; };
  if (std::abs(rate(0)) > 1e-8 * (1.0 + e0)) throw NumericalError("s1: transport rate does not vanish at the horizon");
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < ht.t.size(); ++j) s += 0.5 * (ht.t[j + 1] - ht.t[j]) * (rate(j) + rate(j + 1));
  return s;
}

void write_trajectory_csv(std::ostream& os, const PotentialND& v, const Trajectory& tr) {
  os << "t";
  for (int i = 0; i < v.dimension(); ++i) os << ",gamma" << i + 1;
  os << ",E_ip\n";
  const auto e = inverted_energy(v, tr);
  for (std::size_t j = 0; j < tr.t.size(); ++j) {
    os << fmt::format("{:.17g}", tr.t[j]);
    for (Eigen::Index i = 0; i < tr.gamma.cols(); ++i) os << fmt::format(",{:.17g}", tr.gamma(static_cast<Eigen::Index>(j), i));
    os << fmt::format(",{:.17g}\n", e[j]);
  }
}

void write_hessian_csv(std::ostream& os, const HessianTransport& ht) {
  os << "t,trH\n";
  for (std::size_t j = 0; j < ht.t.size(); ++j) os << fmt::format("{:.17g},{:.17g}\n", ht.t[j], ht.h[j].trace());
}

}  // namespace semicl
