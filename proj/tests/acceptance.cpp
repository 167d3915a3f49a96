#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <boost/math/special_functions/expint.hpp>
#include <fmt/core.h>

#include "semicl/diag.hpp"
#include "semicl/hj1d.hpp"
#include "semicl/hjnd.hpp"
#include "semicl/lattice_field.hpp"
#include "semicl/resummation.hpp"
#include "semicl/rspt.hpp"
#include "semicl/transport1d.hpp"

using namespace semicl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Accumulates a pass flag and the worst observed value of each check.
class Checks {
 public:
  void at_most(const std::string& name, double value, double bound) {
    const bool ok = std::isfinite(value) && value <= bound;
    pass_ = pass_ && ok;
    note(fmt::format("{}={:.3g}{}{:.3g}", name, value, ok ? "<=" : ">", bound));
  }
  void at_least(const std::string& name, double value, double bound) {
    const bool ok = std::isfinite(value) && value >= bound;
    pass_ = pass_ && ok;
    note(fmt::format("{}={:.4g}{}{:.4g}", name, value, ok ? ">=" : "<", bound));
  }
  void holds(const std::string& name, bool ok) {
    pass_ = pass_ && ok;
    note(name + (ok ? " ok" : " violated"));
  }
  Outcome outcome() const { return {pass_, detail_}; }

 private:
  void note(const std::string& s) { detail_ += (detail_.empty() ? "" : ", ") + s; }
  bool pass_ = true;
  std::string detail_;
};

double hermite(int n, double x) {
  double h0 = 1.0, h1 = 2.0 * x;
  if (n == 0) return h0;
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

// Measured convergence orders approach the nominal one from either side; a pre-asymptotic
// next-order term of opposite sign keeps them a little below it at any finite step.
constexpr double kOrderSlack = 0.05;

std::shared_ptr<const FundamentalSolution1D> solve1d(const Potential1D& v, Grid1D grid) {
  return std::make_shared<const FundamentalSolution1D>(v, std::move(grid));
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd x(2);
  x << a, b;
  return x;
}

Outcome harmonic_exactness() {
  Checks c;
  double sup_a = 0.0, e0_err = 0.0, herm = 0.0, energy = 0.0;
  for (double omega : {1.0, 2.5}) {
    const double window = 4.0 / std::sqrt(omega);
    const auto ground = ground_hierarchy(solve1d(Potential1D::harmonic(1.0, omega), Grid1D::uniform(window + 0.5, 60)), 8);
    e0_err = std::max(e0_err, std::abs(ground.energy()[0] - omega / 2));
    for (std::size_t k = 1; k <= 8; ++k)
      for (double a : ground.profile(k)) sup_a = std::max(sup_a, std::abs(a));
    for (int ms = 1; ms <= 3; ++ms) {
      const ExcitedState ex(ground, ms, 3);
      const double norm = 1.0 / (std::pow(2.0, ms) * std::pow(omega, ms / 2.0));
      double sup = 0.0, dev = 0.0;
      for (int i = -50; i <= 50; ++i) {
        const double x = window * i / 50.0;
        const double ref = norm * hermite(ms, std::sqrt(omega) * x);
        double b = 0.0;
        for (std::size_t n = 0; n <= 3; ++n) b += ex.b(n, x);
        sup = std::max(sup, std::abs(ref));
        dev = std::max(dev, std::abs(b - ref));
      }
      herm = std::max(herm, dev / sup);
      energy = std::max(energy, std::abs(assemble(ground, 1.0, std::nullopt, &ex).energy - omega * (ms + 0.5)));
    }
  }
  c.at_most("sup|a_k|", sup_a, 1e-10);
  c.at_most("|e0-w/2|", e0_err, 1e-12);
  c.at_most("hermite rel", herm, 1e-8);
  c.at_most("|E*-hw(m+1/2)|", energy, 1e-10);
  return c.outcome();
}

Outcome rspt_agreement() {
  Checks c;
  double worst = 0.0;
  for (const auto& v : {Potential1D::quartic(0.1), Potential1D::sectic(0.1)}) {
    const auto grid = Grid1D::uniform(4.0, 80).refined();
    const auto h = ground_hierarchy(solve1d(v, grid), 5);
    const auto r = rs_series(v, 0, 4, Arithmetic::exact);
    for (std::size_t k = 0; k <= 4; ++k) worst = std::max(worst, std::abs(h.energy()[k] / r.coeffs[k] - 1.0));
  }
  c.at_most("max rel", worst, 1e-6);
  return c.outcome();
}

Outcome resummation_vs_truth() {
  Checks c;
  const auto v = Potential1D::quartic(0.1);
  const double e0 = solve_spectrum(v, 1.0, DiagMethod::finite_difference, 4000, 1).eigenvalues[0];
  const auto r = borel_pade(rs_series(v, 0, 9), 4, 5, 1.0);
  c.at_most("|BP[4/5]-E0|", std::abs(r.value - e0), 1e-3);

  std::vector<double> euler;
  for (int k = 0; k < 12; ++k) euler.push_back((k % 2 ? -1.0 : 1.0) * std::tgamma(k + 1.0));
  PowerSeries s;
  s.coeffs = euler;
  const double z = 0.1;
  const double stieltjes = std::exp(1.0 / z) * boost::math::expint(1, 1.0 / z) / z;
  c.at_most("|euler-stieltjes|", std::abs(borel_pade(s, 4, 4, z).value - stieltjes), 1e-6);
  return c.outcome();
}

Outcome decay_claim() {
  Checks c;
  const auto v = Potential1D::quartic(0.1);
  const FundamentalSolution1D sol(v, Grid1D::uniform(8.0, 160));
  const auto spec = solve_spectrum(v, 1.0, DiagMethod::finite_difference, 4000, 1);
  const auto t = tail_exponent(spec, sol, 1.0, 3.0, 5.0);
  const auto g = gaussian_tail(sol, 3.0, 5.0);
  double lo = INFINITY, hi = -INFINITY;
  for (double q : t.ratio) lo = std::min(lo, q), hi = std::max(hi, q);
  c.holds("window nonempty", !t.ratio.empty());
  c.at_least("min ratio", lo, 0.9);
  c.at_most("max ratio", hi, 1.1);
  c.at_most("gaussian end ratio", g.ratio.back(), 0.9 - 1e-12);
  return c.outcome();
}

Outcome nd_consistency() {
  Checks c;
  const PotentialND v(1.0, {1.0, 1.3}, {Monomial{{2, 2}, 0.05}, Monomial{{4, 0}, 0.02}});
  const auto grid = TimeGrid::for_potential(v);
  const auto nu = v.nu();
  const std::vector<Eigen::VectorXd> points{vec2(1, 1),       vec2(2, -1),  vec2(-1.5, 2.5), vec2(0.1, 0.05), vec2(-2, -2),
                                            vec2(0.5, -1.5), vec2(2.5, 0), vec2(0, -2.5),    vec2(-0.7, 0.3), vec2(1.8, 1.6)};
  double energy = 0.0, grad = 0.0, hj = 0.0, slope = INFINITY;
  bool bound = true;
  auto action = [&](const Eigen::VectorXd& x) {
    const double s = minimize_action(v, x, grid).action;
    double q = 0.0;
    for (int i = 0; i < 2; ++i) q += 0.5 * v.mass() * nu[i] * x[i] * x[i];
    bound = bound && s >= q;
    return s;
  };
  for (const auto& x : points) {
    const auto tr = minimize_action(v, x, grid);
    const auto s = s0_and_gradient(v, tr);
    for (double e : inverted_energy(v, tr)) energy = std::max(energy, std::abs(e) / (1 + v.eval(x)));
    hj = std::max(hj, s.hj_residual);
    action(x);
    const double h = 1e-4;
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (action(xp) - action(xm)) / (2 * h);
      grad = std::max(grad, std::abs(s.gradient[i] - fd) / std::max(std::abs(fd), 1e-3));
    }
    // second-order Taylor remainder along a fixed direction must shrink like h^3
    const auto hess = hessian_transport(v, tr).endpoint();
    const Eigen::VectorXd d = vec2(0.6, -0.8);
    std::vector<double> rem;
    for (double step : {0.05, 0.025, 0.0125}) {
      const double lin = step * s.gradient.dot(d), quad = 0.5 * step * step * d.dot(hess * d);
      rem.push_back(std::abs(action(x + step * d) - s.s0 - lin - quad));
    }
    slope = std::min({slope, std::log2(rem[0] / rem[1]), std::log2(rem[1] / rem[2])});
  }
  c.at_most("energy/(1+V)", energy, 1e-8);
  c.at_most("grad rel", grad, 1e-5);
  c.at_most("hj", hj, 1e-6);
  c.holds("lower bound", bound);
  c.at_least("taylor slope", slope, 3.0 - kOrderSlack);
  return c.outcome();
}

Outcome s1_cross_check() {
  Checks c;
  const auto v1 = Potential1D::quartic(0.1);
  const auto h = ground_hierarchy(solve1d(v1, Grid1D::uniform(4.0, 80)), 2);
  const auto v = PotentialND::from_1d(v1);
  const auto grid = TimeGrid::for_potential(v);
  double worst = 0.0;
  for (double x : {-2.5, -0.8, 0.4, 1.5, 3.0}) {
    Eigen::VectorXd p(1);
    p << x;
    const auto tr = minimize_action(v, p, grid);
    worst = std::max(worst, std::abs(s1_along_flow(v, hessian_transport(v, tr)) - h.a(1, x)));
  }
  c.at_most("|S1-a1|", worst, 1e-6);
  return c.outcome();
}

Outcome susy_exactness() {
  Checks c;
  const Superpotential w(Polynomial({0.0, 0.0, 0.5, 0.0, 0.1}));
  const auto h = susy_ground(w, Superpotential::Sector::plus, 7, Grid1D::uniform(3.0, 300));
  double worst = 0.0;
  for (std::size_t k = 0; k <= 6; ++k) worst = std::max(worst, std::abs(h.energy()[k]));
  c.at_most("max|e_k|", worst, 1e-9);
  const auto r = solve_spectrum(w.sector_potential(Superpotential::Sector::plus, 1.0), 1.0, 1.0,
                                DiagMethod::finite_difference, 4000, 1);
  c.at_most("|E0|", std::abs(r.eigenvalues[0]), 1e-8);
  return c.outcome();
}

Outcome free_field() {
  Checks c;
  LatticeProblem p;
  p.n = 1;
  p.N = 256;
  p.a = 0.1;
  p.dt = 0.05;
  p.poly = Polynomial({0.0, 0.0, 0.5});
  c.at_least("m0 L", p.mass() * p.length(), 20.0);

  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> amp(0.05, 0.5), phase(0.0, 2 * M_PI);
  std::vector<BoundaryMode> modes;
  for (int k : {1, 2, 3, 5, 8, 13, 21, 40, 77, 127}) modes.push_back({{k}, amp(rng), phase(rng)});
  p.phi = p.modes_to_sites(modes);
  const auto f = minimize_field(p);

  // per mode: r + 1/r = 2 + dt^2 mu2, lattice frequency (1/r - r) / (2 dt), S = 1/2 w A^2 L / 2
  double oracle = 0.0;
  std::vector<double> expect(p.sites(), 0.0);
  for (const auto& m : modes) {
    const double s = std::sin(M_PI * m.wave[0] / static_cast<double>(p.N));
    const double mu2 = 4 * s * s / (p.a * p.a) + 1.0;
    const double b = 1.0 + 0.5 * p.dt * p.dt * mu2;
    const double r = b - std::sqrt(b * b - 1.0);
    const double w = (1.0 / r - r) / (2 * p.dt);
    oracle += 0.5 * w * m.amp * m.amp * p.length() / 2;
    const auto site = p.modes_to_sites({m});
    for (std::size_t x = 0; x < site.size(); ++x) expect[x] += w * site[x];
  }
  c.at_most("S rel", std::abs(f.action / oracle - 1.0), 1e-8);
  const auto g = functional_gradient(p, f);
  double dev = 0.0, sup = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) {
    dev = std::max(dev, std::abs(g[x] - expect[x]));
    sup = std::max(sup, std::abs(expect[x]));
  }
  c.at_most("gradient rel", dev / sup, 1e-8);
  return c.outcome();
}

LatticeProblem phi4_problem(double dt) {
  LatticeProblem p;
  p.n = 1;
  p.N = 64;
  p.a = 0.4;
  p.dt = dt;
  p.stretch = 1.02;
  p.dt_max = 0.1;
  p.poly = Polynomial({0.0, 0.0, 0.5, 0.0, 0.1});
  p.phi = p.modes_to_sites({BoundaryMode{{1}, 1.0, 0.0}, BoundaryMode{{2}, 0.5, 1.0}});
  return p;
}

Outcome nonlinear_identities() {
  Checks c;
  auto p = phi4_problem(0.004);
  std::vector<double> hj, en;
  double slack = 0.0;
  for (int level = 0; level < 5; ++level, p = p.refined()) {
    const auto f = minimize_field(p);
    hj.push_back(std::abs(hj_residual(p, functional_gradient(p, f))));
    en.push_back(energy_profile(p, f).max_abs / (f.action / -f.t.front()));
    slack = gaussian_bound(p, f).slack;
  }
  c.at_most("hj", hj.back(), 1e-6);
  // tolerance pinned from the refinement study at this resolution
  c.at_most("energy/(S0/T)", en.back(), 1e-5);
  double s_hj = INFINITY, s_en = INFINITY;
  for (std::size_t i = 1; i < hj.size(); ++i) {
    s_hj = std::min(s_hj, std::log2(hj[i - 1] / hj[i]));
    s_en = std::min(s_en, std::log2(en[i - 1] / en[i]));
  }
  c.at_least("hj slope", s_hj, 2.0 - kOrderSlack);
  c.at_least("energy slope", s_en, 2.0 - kOrderSlack);
  c.at_least("slack", slack, 0.0);
  return c.outcome();
}

Outcome virial_limit() {
  Checks c;
  auto sweep = [&](const std::string& name, Polynomial poly, double top, double target) {
    auto p = phi4_problem(0.01);
    p.poly = std::move(poly);
    std::vector<double> amps;
    for (int i = 0; i <= 8; ++i) amps.push_back(top * std::pow(10.0, (i - 8) / 4.0));
    const auto v = virial_ratio(p, amps);
    c.at_most(name + " |T/target-1|", std::abs(v.back().t / target - 1.0), 0.05);
    bool monotone = true;
    for (std::size_t i = 5; i < v.size(); ++i) monotone = monotone && v[i].t > v[i - 1].t && v[i].t < target;
    c.holds(name + " monotone", monotone);
  };
  sweep("k4", Polynomial({0.0, 0.0, 0.5, 0.0, 0.1}), 10.0, 3.0);
  sweep("k6", Polynomial({0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.05}), 5.6, 4.0);

  auto p = phi4_problem(0.01);
  p.poly = Polynomial({0.0, 0.0, 0.5});
  double worst = 0.0;
  for (const auto& pt : virial_ratio(p, {0.1, 1.0, 10.0})) worst = std::max(worst, std::abs(pt.r - 2.0));
  c.at_most("free |R-2|", worst, 1e-8);
  return c.outcome();
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget;  // seconds
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"harmonic exactness", 5, harmonic_exactness},
      {"RSPT agreement", 30, rspt_agreement},
      {"resummation vs diagonalization", 30, resummation_vs_truth},
      {"faster than gaussian decay", 20, decay_claim},
      {"N-D variational consistency", 300, nd_consistency},
      {"S1 cross-check", 60, s1_cross_check},
      {"SUSY exactness", 30, susy_exactness},
      {"lattice free field", 30, free_field},
      {"lattice nonlinear identities", 300, nonlinear_identities},
      {"virial limit", 600, virial_limit},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& cr = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= cr.budget;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    fmt::print("{} {:2d} {} ({:.1f}s of {:.0f}s{}): {}\n", pass ? "PASS" : "FAIL", i + 1, cr.name, secs, cr.budget,
               in_time ? "" : ", over budget", o.detail);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
