#include "semicl/diag.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <lapacke.h>

#include "semicl/errors.hpp"

namespace semicl {

namespace {

struct FdSolve {
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // columns
};

FdSolve fd_solve(const Polynomial& v, double mass, double hbar, double half_width, std::size_t n, std::size_t levels,
                 bool vectors) {
  const double h = 2.0 * half_width / static_cast<double>(n + 1);
  const double t = hbar * hbar / (2.0 * mass * h * h);
  std::vector<double> d(n), e(n, -t);
  for (std::size_t i = 0; i < n; ++i) d[i] = 2.0 * t + v(-half_width + static_cast<double>(i + 1) * h);
  lapack_int found = 0;
  std::vector<double> w(n);
  std::vector<double> z(vectors ? n * levels : 1);
  std::vector<lapack_int> support(2 * levels);
  const lapack_int info =
      LAPACKE_dstevr(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'I', static_cast<lapack_int>(n), d.data(), e.data(), 0.0,
                     0.0, 1, static_cast<lapack_int>(levels), 0.0, &found, w.data(), z.data(),
                     static_cast<lapack_int>(n), support.data());
  if (info != 0 || found != static_cast<lapack_int>(levels))
    throw NumericalError(fmt::format("diag: tridiagonal eigensolver failed (info {})", info));
  FdSolve r;
  r.values.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(levels));
  if (vectors) r.vectors = Eigen::Map<Eigen::MatrixXd>(z.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(levels));
  return r;
}

double auto_half_width(const Polynomial& v, double mass, double hbar, std::size_t levels) {
  // decay action int_0^X sqrt(2 m V) dx >= 60 hbar on both sides, then V(+-X) >= 50 E_L
  auto action_edge = [&](double dir) {
    const double dx = 1e-3 * std::sqrt(hbar / mass);
    double x = 0.0, a = 0.0;
    while (a < 60.0 * hbar) {
      x += dx;
      a += dx * std::sqrt(2.0 * mass * std::max(v(dir * x), 0.0));
      if (x > 1e6) throw NumericalError("diag: potential does not confine");
    }
    return x;
  };
  double x = std::max(action_edge(1.0), action_edge(-1.0));
  const double e_est = fd_solve(v, mass, hbar, x, 399, levels, false).values.back();
  const double target = 50.0 * std::abs(e_est);
  while (std::min(v(x), v(-x)) < target) x *= 1.02;
  return x;
}

}  // namespace

SpectralResult solve_spectrum(const Polynomial& v, double mass, double hbar, DiagMethod method, std::size_t size,
                              std::size_t levels, SpectralOptions opt) {
  if (!(mass > 0.0) || !(hbar > 0.0)) throw ValidationError("diag: mass and hbar must be positive");
  if (levels == 0) throw ValidationError("diag: need at least one level");
  SpectralResult r;
  r.method = method;

  if (method == DiagMethod::finite_difference) {
    std::size_t n = size;
    if ((n + 1) % 4) n += 4 - (n + 1) % 4;
    if (n / 4 < 4 * levels) throw ValidationError("diag: grid too small for the requested levels");
    r.size = n;
    r.half_width = opt.half_width > 0.0 ? opt.half_width : auto_half_width(v, mass, hbar, levels);
    const auto fine = fd_solve(v, mass, hbar, r.half_width, n, levels, opt.vectors);
    const auto mid = fd_solve(v, mass, hbar, r.half_width, (n + 1) / 2 - 1, levels, false);
    const auto coarse = fd_solve(v, mass, hbar, r.half_width, (n + 1) / 4 - 1, levels, false);
    for (std::size_t l = 0; l < levels; ++l) {
      const double r1 = (4.0 * fine.values[l] - mid.values[l]) / 3.0;
      const double r1c = (4.0 * mid.values[l] - coarse.values[l]) / 3.0;
      const double r2 = (16.0 * r1 - r1c) / 15.0;
      r.eigenvalues.push_back(r2);
      r.error.push_back(std::abs(r2 - r1));
    }
    if (opt.vectors) {
      const double h = 2.0 * r.half_width / static_cast<double>(n + 1);
      r.x.resize(n);
      for (std::size_t i = 0; i < n; ++i) r.x[i] = -r.half_width + static_cast<double>(i + 1) * h;
      const std::size_t centre = (n - 1) / 2;
      for (std::size_t l = 0; l < levels; ++l) {
        const Eigen::VectorXd psi = fine.vectors.col(static_cast<Eigen::Index>(l));
        const double peak = psi.cwiseAbs().maxCoeff();
        r.boundary_weight = std::max(r.boundary_weight, std::max(std::abs(psi[0]), std::abs(psi[static_cast<Eigen::Index>(n - 1)])) / peak);
        // psi(0) = 1 when it does not vanish there, otherwise max |psi| = 1
        double ref = std::abs(psi[static_cast<Eigen::Index>(centre)]);
        if (ref < 1e-8 * peak) ref = peak;
        const double s = psi[static_cast<Eigen::Index>(centre)] < 0.0 ? -1.0 : 1.0;
        std::vector<double> lg(n);
        std::vector<int> sg(n);
        for (std::size_t i = 0; i < n; ++i) {
          const double p = s * psi[static_cast<Eigen::Index>(i)];
          lg[i] = std::log(std::abs(p) / ref);
          sg[i] = p > 0.0 ? 1 : (p < 0.0 ? -1 : 0);
        }
        r.log_abs_psi.push_back(std::move(lg));
        r.sign.push_back(std::move(sg));
      }
      if (r.boundary_weight > 1e-10)
        throw NumericalError(fmt::format("diag: domain too small, boundary weight {:.3g}", r.boundary_weight));
    }
    return r;
  }

  // oscillator basis of frequency w0, units xi = sqrt(m w0 / hbar) x
  const double curvature = v.derivative().derivative()(0.0);
  const double w0 = opt.basis_omega > 0.0 ? opt.basis_omega : (curvature > 0.0 ? std::sqrt(curvature / mass) : 1.0);
  const double len = std::sqrt(hbar / (mass * w0));
  const auto& c = v.coefficients();
  auto spectrum = [&](std::size_t nb) {
    const std::size_t big = nb + c.size() + 1;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(big), static_cast<Eigen::Index>(big));
    for (std::size_t i = 0; i + 1 < big; ++i)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = x(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) =
          len * std::sqrt(0.5 * static_cast<double>(i + 1));
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(big), static_cast<Eigen::Index>(big));
    for (std::size_t i = 0; i < big; ++i) h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = hbar * w0 * (static_cast<double>(i) + 0.5);
    Eigen::MatrixXd xp = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(big), static_cast<Eigen::Index>(big));
    for (std::size_t p = 0; p < c.size(); ++p) {
      double coeff = c[p] - (p == 2 ? 0.5 * mass * w0 * w0 : 0.0);
      if (coeff != 0.0) h += coeff * xp;
      xp = xp * x;
    }
    const auto nbi = static_cast<Eigen::Index>(nb);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.topLeftCorner(nbi, nbi), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  };
  if (size < 2 * levels) throw ValidationError("diag: basis too small for the requested levels");
  const auto full = spectrum(size);
  const auto half = spectrum(size / 2);
  r.size = size;
  for (std::size_t l = 0; l < levels; ++l) {
    r.eigenvalues.push_back(full[static_cast<Eigen::Index>(l)]);
    r.error.push_back(std::abs(full[static_cast<Eigen::Index>(l)] - half[static_cast<Eigen::Index>(l)]));
  }
  return r;
}

SpectralResult solve_spectrum(const Potential1D& v, double hbar, DiagMethod method, std::size_t size,
                              std::size_t levels, SpectralOptions opt) {
  return solve_spectrum(v.polynomial(), v.mass(), hbar, method, size, levels, opt);
}

namespace {

void summarize(TailProfile& t) {
  if (t.ratio.empty()) throw ValidationError("tail: empty window");
  double sum = 0.0;
  for (double r : t.ratio) {
    sum += std::abs(r - 1.0);
    t.max_deviation = std::max(t.max_deviation, std::abs(r - 1.0));
  }
  t.mean_deviation = sum / static_cast<double>(t.ratio.size());
}

}  // namespace

TailProfile tail_exponent(const SpectralResult& result, const FundamentalSolution1D& sol, double hbar, double lo,
                          double hi) {
  if (result.log_abs_psi.empty()) throw ValidationError("tail: eigenvector not available");
  TailProfile t;
  const auto& lg = result.log_abs_psi[0];
  const double floor = std::log(1e3 * std::numeric_limits<double>::epsilon());
  for (std::size_t i = 0; i < result.x.size(); ++i) {
    const double x = result.x[i];
    if (x < lo || x > hi) continue;
    if (result.sign[0][i] <= 0) throw NumericalError("tail: ground state not positive on the window");
    if (lg[i] < floor) throw NumericalError(fmt::format("tail: eigenvector below rounding level at x = {}", x));
    t.x.push_back(x);
    t.ratio.push_back(-hbar * lg[i] / sol.S0(x));
  }
  summarize(t);
  return t;
}

TailProfile gaussian_tail(const FundamentalSolution1D& sol, double lo, double hi, std::size_t points) {
  TailProfile t;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(points - 1, 1));
    t.x.push_back(x);
    // -hbar log exp(-m omega x^2 / 2 hbar) = m omega x^2 / 2
    t.ratio.push_back(0.5 * sol.mass() * sol.omega() * x * x / sol.S0(x));
  }
  summarize(t);
  return t;
}

void write_eigenvalues_csv(std::ostream& os, const SpectralResult& r) {
  os << "level,eigenvalue,error\n";
  for (std::size_t l = 0; l < r.eigenvalues.size(); ++l)
    os << fmt::format("{},{:.17g},{:.17g}\n", l, r.eigenvalues[l], r.error[l]);
}

void write_tail_csv(std::ostream& os, const TailProfile& t) {
  os << "x,ratio\n";
  for (std::size_t i = 0; i < t.x.size(); ++i) os << fmt::format("{:.17g},{:.17g}\n", t.x[i], t.ratio[i]);
}

}  // namespace semicl
