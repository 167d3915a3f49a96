#include "semicl/lattice_field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "semicl/errors.hpp"

namespace semicl {

std::size_t LatticeProblem::sites() const {
  std::size_t s = 1;
  for (int d = 0; d < n; ++d) s *= N;
  return s;
}

double LatticeProblem::volume_element() const { return std::pow(a, n); }

double LatticeProblem::mass() const { return std::sqrt(2.0 * poly.coefficient(2)); }

std::vector<double> LatticeProblem::time_nodes() const {
  const double m0 = mass();
  const double T = horizon > 0.0 ? horizon : (std::log(1.0 / decay_tol) + 4.0) / m0;
  std::vector<double> back{0.0};
  double h = dt, s = 0.0;
  while (s < T * (1.0 - 1e-12)) {
    s += h;
    back.push_back(-s);
    h *= stretch;
    if (dt_max > 0.0) h = std::min(h, dt_max);
  }
  std::reverse(back.begin(), back.end());
  return back;
}

void LatticeProblem::validate() const {
  if (n != 1 && n != 2) throw ValidationError("lattice: spatial dimension must be 1 or 2");
  if (N < 4) throw ValidationError("lattice: need at least 4 sites per dimension");
  if (!(a > 0.0) || !(dt > 0.0)) throw ValidationError("lattice: spacing and time step must be positive");
  if (stretch < 1.0) throw ValidationError("lattice: stretch must be >= 1");
  if (dt_max != 0.0 && dt_max < dt) throw ValidationError("lattice: dt_max must be 0 or >= dt");
  if (!(decay_tol > 0.0 && decay_tol < 1.0)) throw ValidationError("lattice: decay_tol must lie in (0, 1)");
  if (horizon < 0.0) throw ValidationError("lattice: horizon must be >= 0");
  const auto& c = poly.coefficients();
  if (poly.coefficient(0) != 0.0 || poly.coefficient(1) != 0.0)
    throw ValidationError("lattice: P must have no constant or linear term");
  if (!(poly.coefficient(2) > 0.0)) throw ValidationError("lattice: P needs a mass term a_2 > 0");
  const std::size_t k = poly.degree();
  if (k % 2 != 0 || !(c.back() > 0.0)) throw ValidationError("lattice: P must have even degree and positive top coefficient");
  if (n == 2 && k > 6) throw ValidationError(fmt::format("lattice: degree {} exceeds the critical exponent 6 for d = 3", k));
  // convexity: P'' >= 0 on a range containing every real root of P''
  const Polynomial dd = poly.derivative().derivative();
  double bound = 1.0;
  for (std::size_t i = 0; i < dd.degree(); ++i)
    bound = std::max(bound, 1.0 + std::abs(dd.coefficient(i) / dd.coefficient(dd.degree())));
  for (int i = 0; i <= 4000; ++i) {
    const double z = -bound + 2.0 * bound * i / 4000.0;
    if (dd(z) < -1e-12 * (1.0 + std::abs(dd.coefficient(0))))
      throw ValidationError(fmt::format("lattice: P is not convex, P''({}) = {}", z, dd(z)));
  }
  if (phi.size() != sites()) throw ValidationError(fmt::format("lattice: boundary data has {} values, expected {}", phi.size(), sites()));
  for (double v : phi)
    if (!std::isfinite(v)) throw ValidationError("lattice: boundary data must be finite");
}

LatticeProblem LatticeProblem::refined() const {
  LatticeProblem r = *this;
  r.dt = dt / 2.0;
  r.stretch = std::sqrt(stretch);
  r.dt_max = dt_max / 2.0;
  if (horizon == 0.0) r.horizon = -time_nodes().front();
  return r;
}

LatticeProblem LatticeProblem::with_boundary(std::vector<double> values) const {
  LatticeProblem r = *this;
  r.phi = std::move(values);
  return r;
}

LatticeProblem LatticeProblem::scaled(double amplitude) const {
  LatticeProblem r = *this;
  for (double& v : r.phi) v *= amplitude;
  return r;
}

std::vector<double> LatticeProblem::modes_to_sites(const std::vector<BoundaryMode>& modes) const {
  std::vector<double> out(sites(), 0.0);
  const double two_pi = 2.0 * M_PI;
  for (const auto& md : modes) {
    if (md.wave.size() != static_cast<std::size_t>(n)) throw ValidationError("lattice: mode wave vector has wrong dimension");
    for (std::size_t s = 0; s < out.size(); ++s) {
      std::size_t rest = s;
      double arg = md.phase;
      for (int d = 0; d < n; ++d) {
        arg += two_pi * md.wave[static_cast<std::size_t>(d)] * static_cast<double>(rest % N) / static_cast<double>(N);
        rest /= N;
      }
      out[s] += md.amp * std::cos(arg);
    }
  }
  return out;
}

namespace {

struct Lattice {
  const LatticeProblem& p;
  std::size_t ns;
  std::vector<std::size_t> plus, minus;  // ns * n
  double inv_a2;

  explicit Lattice(const LatticeProblem& prob) : p(prob), ns(prob.sites()), inv_a2(1.0 / (prob.a * prob.a)) {
    const auto n = static_cast<std::size_t>(p.n);
    plus.resize(ns * n);
    minus.resize(ns * n);
    for (std::size_t s = 0; s < ns; ++s) {
      std::size_t stride = 1;
      for (std::size_t d = 0; d < n; ++d) {
        const std::size_t c = (s / stride) % p.N;
        plus[s * n + d] = c + 1 < p.N ? s + stride : s - (p.N - 1) * stride;
        minus[s * n + d] = c > 0 ? s - stride : s + (p.N - 1) * stride;
        stride *= p.N;
      }
    }
  }

  double lap(const double* u, std::size_t s) const {
    const auto n = static_cast<std::size_t>(p.n);
    double r = 0.0;
    for (std::size_t d = 0; d < n; ++d) r += u[plus[s * n + d]] + u[minus[s * n + d]] - 2.0 * u[s];
    return r * inv_a2;
  }

  double grad_dot(const double* u, const double* v, std::size_t s) const {
    const auto n = static_cast<std::size_t>(p.n);
    double r = 0.0;
    for (std::size_t d = 0; d < n; ++d) r += (u[plus[s * n + d]] - u[s]) * (v[plus[s * n + d]] - v[s]);
    return r * inv_a2;
  }
};

struct Discrete {
  const LatticeProblem& p;
  Lattice lat;
  std::vector<double> t, h, w;
  std::size_t M;
  Polynomial dP, ddP;

  explicit Discrete(const LatticeProblem& prob)
      : p(prob), lat(prob), t(prob.time_nodes()), M(t.size() - 1), dP(prob.poly.derivative()), ddP(dP.derivative()) {
    h.resize(M);
    for (std::size_t j = 0; j < M; ++j) h[j] = t[j + 1] - t[j];
    w.assign(M + 1, 0.0);
    for (std::size_t j = 0; j < M; ++j) {
      w[j] += 0.5 * h[j];
      w[j + 1] += 0.5 * h[j];
    }
  }

  double action(const std::vector<double>& f) const {
    const std::size_t ns = lat.ns;
    double s = 0.0;
    for (std::size_t j = 0; j <= M; ++j) {
      const double* u = f.data() + j * ns;
      double slice = 0.0;
      for (std::size_t x = 0; x < ns; ++x) slice += 0.5 * lat.grad_dot(u, u, x) + p.poly(u[x]);
      s += w[j] * slice;
      if (j < M) {
        const double* v = u + ns;
        double kin = 0.0;
        for (std::size_t x = 0; x < ns; ++x) kin += (v[x] - u[x]) * (v[x] - u[x]);
        s += 0.5 * kin / h[j];
      }
    }
    return s * p.volume_element();
  }

  // per unit volume, interior slices only
  void gradient(const std::vector<double>& f, std::vector<double>& g) const {
    const std::size_t ns = lat.ns;
    g.assign(f.size(), 0.0);
    for (std::size_t j = 1; j < M; ++j) {
      const double* u = f.data() + j * ns;
      double* gj = g.data() + j * ns;
      for (std::size_t x = 0; x < ns; ++x)
        gj[x] = (u[x] - u[x - ns]) / h[j - 1] - (u[x + ns] - u[x]) / h[j] + w[j] * (-lat.lap(u, x) + dP(u[x]));
    }
  }

  void hess_vec(const std::vector<double>& pdd, const std::vector<double>& v, std::vector<double>& out) const {
    const std::size_t ns = lat.ns;
    out.assign(v.size(), 0.0);
    for (std::size_t j = 1; j < M; ++j) {
      const double* u = v.data() + j * ns;
      double* o = out.data() + j * ns;
      const double* q = pdd.data() + j * ns;
      for (std::size_t x = 0; x < ns; ++x) {
        const double below = j > 1 ? u[x - ns] : 0.0;
        const double above = j + 1 < M ? u[x + ns] : 0.0;
        o[x] = (u[x] - below) / h[j - 1] - (above - u[x]) / h[j] + w[j] * (-lat.lap(u, x) + q[x] * u[x]);
      }
    }
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double sup(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Tridiagonal solve along each time line; the spatial coupling enters only through its diagonal.
struct TimeLinePreconditioner {
  const Discrete& d;
  std::vector<double> inv_piv;

  TimeLinePreconditioner(const Discrete& disc, const std::vector<double>& pdd) : d(disc) {
    const std::size_t ns = d.lat.ns;
    const double spatial = 2.0 * d.p.n * d.lat.inv_a2;
    inv_piv.assign(pdd.size(), 0.0);
    for (std::size_t j = 1; j < d.M; ++j)
      for (std::size_t x = 0; x < ns; ++x) {
        double diag = 1.0 / d.h[j - 1] + 1.0 / d.h[j] + d.w[j] * (spatial + pdd[j * ns + x]);
        if (j > 1) diag -= inv_piv[(j - 1) * ns + x] / (d.h[j - 1] * d.h[j - 1]);
        inv_piv[j * ns + x] = 1.0 / diag;
      }
  }

  void apply(const std::vector<double>& r, std::vector<double>& z) const {
    const std::size_t ns = d.lat.ns;
    z.assign(r.size(), 0.0);
    for (std::size_t j = 1; j < d.M; ++j)
      for (std::size_t x = 0; x < ns; ++x) {
        double y = r[j * ns + x];
        if (j > 1) y += z[(j - 1) * ns + x] / d.h[j - 1];
        z[j * ns + x] = y * inv_piv[j * ns + x];
      }
    for (std::size_t j = d.M - 2; j >= 1; --j)
      for (std::size_t x = 0; x < ns; ++x) z[j * ns + x] += inv_piv[j * ns + x] * z[(j + 1) * ns + x] / d.h[j];
  }
};

}  // namespace

double lattice_action(const LatticeProblem& p, const std::vector<double>& field) {
  Discrete d(p);
  if (field.size() != (d.M + 1) * d.lat.ns) throw ValidationError("lattice_action: field has wrong size");
  std::vector<double> f = field;
  std::copy(p.phi.begin(), p.phi.end(), f.begin() + static_cast<std::ptrdiff_t>(d.M * d.lat.ns));
  return d.action(f);
}

FieldMinimizer minimize_field(const LatticeProblem& p, FieldOptions opt, const std::vector<double>* initial) {
  p.validate();
  Discrete d(p);
  const std::size_t ns = d.lat.ns, M = d.M;
  FieldMinimizer r;
  r.t = d.t;
  r.sites = ns;
  if (initial) {
    if (initial->size() != (M + 1) * ns) throw ValidationError("minimize_field: initial field has wrong size");
    r.field = *initial;
  } else {
    r.field.assign((M + 1) * ns, 0.0);
  }
  std::fill(r.field.begin(), r.field.begin() + static_cast<std::ptrdiff_t>(ns), 0.0);
  std::copy(p.phi.begin(), p.phi.end(), r.field.begin() + static_cast<std::ptrdiff_t>(M * ns));

  const double amp = sup(p.phi);
  // Residual rows are h_j times the field equation; the kinetic differences cancel and only
  // contribute rounding of order eps * amp / h.
  double h_min = d.h[0];
  for (std::size_t j = 0; j < M; ++j) h_min = std::min(h_min, d.h[j]);
  r.gradient_scale = h_min * (amp * 4.0 * p.n * d.lat.inv_a2 + std::abs(d.dP(amp)));
  const double tol = std::max(opt.grad_tol * r.gradient_scale, 64.0 * std::numeric_limits<double>::epsilon() * 2.0 * amp / h_min);
  const double vol = p.volume_element();

  std::vector<double> g, pdd(r.field.size(), 0.0), step, res, z, q, dir, trial;
  double s = d.action(r.field);
  bool converged = false;
  for (r.newton_iterations = 0;; ++r.newton_iterations) {
    d.gradient(r.field, g);
    r.gradient_norm = sup(g);
    if (r.gradient_norm <= tol) {
      converged = true;
      break;
    }
    if (r.newton_iterations == opt.max_newton) break;
    for (std::size_t i = ns; i < M * ns; ++i) pdd[i] = d.ddP(r.field[i]);
    TimeLinePreconditioner pre(d, pdd);

    // preconditioned CG on H step = -g
    step.assign(g.size(), 0.0);
    res = g;
    for (double& v : res) v = -v;
    pre.apply(res, z);
    dir = z;
    double rz = dot(res, z);
    const double r0 = std::sqrt(dot(res, res));
    for (std::size_t it = 0; it < opt.max_cg; ++it) {
      d.hess_vec(pdd, dir, q);
      const double alpha = rz / dot(dir, q);
      for (std::size_t i = 0; i < step.size(); ++i) {
        step[i] += alpha * dir[i];
        res[i] -= alpha * q[i];
      }
      ++r.cg_iterations;
      if (std::sqrt(dot(res, res)) <= opt.cg_tol * r0) break;
      pre.apply(res, z);
      const double rz_new = dot(res, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = z[i] + beta * dir[i];
    }

    const double slope = vol * dot(g, step);
    if (!(slope < 0.0)) break;
    double alpha = 1.0;
    for (;;) {
      trial = r.field;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += alpha * step[i];
      const double st = d.action(trial);
      if (st <= s + 1e-4 * alpha * slope) {
        s = st;
        break;
      }
      // a full step that only fails at the rounding level of S is accepted
      if (alpha == 1.0 && st - s <= 64.0 * std::numeric_limits<double>::epsilon() * std::abs(s)) {
        s = st;
        break;
      }
      alpha *= 0.5;
      r.step_halving = true;
      if (alpha < 1e-12) break;
    }
    if (alpha < 1e-12) break;
    r.field.swap(trial);
  }
  r.action = d.action(r.field);
  if (!converged)
    throw ConvergenceError(fmt::format("minimize_field: no convergence after {} Newton steps, gradient {:.3g} (scale {:.3g})",
                                       r.newton_iterations, r.gradient_norm, r.gradient_scale));
  double first = 0.0;
  for (std::size_t x = 0; x < ns; ++x) first = std::max(first, std::abs(r.field[ns + x]));
  if (first > p.decay_tol * std::max(1.0, amp))
    throw NumericalError(fmt::format("minimize_field: time extent too short, sup|Phi(t_1)| = {:.3g}", first));
  return r;
}

std::vector<double> functional_gradient(const LatticeProblem& p, const FieldMinimizer& f, GradientRule rule) {
  Discrete d(p);
  const std::size_t ns = d.lat.ns, M = d.M;
  if (f.field.size() != (M + 1) * ns) throw ValidationError("functional_gradient: minimizer does not match the problem");
  const double* top = f.slice(M);
  const double* below = f.slice(M - 1);
  std::vector<double> g(ns);
  if (rule == GradientRule::discrete_momentum) {
    const double hm = d.h[M - 1];
    for (std::size_t x = 0; x < ns; ++x)
      g[x] = (top[x] - below[x]) / hm + 0.5 * hm * (-d.lat.lap(top, x) + d.dP(top[x]));
  } else {
    const double t0 = d.t[M], t1 = d.t[M - 1], t2 = d.t[M - 2];
    const double w0 = 1.0 / (t0 - t1) + 1.0 / (t0 - t2);
    const double w1 = (t0 - t2) / ((t1 - t0) * (t1 - t2));
    const double w2 = (t0 - t1) / ((t2 - t0) * (t2 - t1));
    const double* below2 = f.slice(M - 2);
    for (std::size_t x = 0; x < ns; ++x) g[x] = w0 * top[x] + w1 * below[x] + w2 * below2[x];
  }
  return g;
}

std::vector<double> functional_gradient_fd(const LatticeProblem& p, const std::vector<std::size_t>& sites, double step,
                                           FieldOptions opt) {
  const FieldMinimizer base = minimize_field(p, opt);
  std::vector<double> out;
  out.reserve(sites.size());
  for (std::size_t s : sites) {
    if (s >= p.sites()) throw ValidationError("functional_gradient_fd: site out of range");
    LatticeProblem up = p, dn = p;
    up.phi[s] += step;
    dn.phi[s] -= step;
    const double sp = minimize_field(up, opt, &base.field).action;
    const double sm = minimize_field(dn, opt, &base.field).action;
    out.push_back((sp - sm) / (2.0 * step * p.volume_element()));
  }
  return out;
}

double hj_residual(const LatticeProblem& p, const std::vector<double>& gradient) {
  Lattice lat(p);
  if (gradient.size() != lat.ns) throw ValidationError("hj_residual: gradient has wrong size");
  double sum = 0.0, pos = 0.0;
  for (std::size_t x = 0; x < lat.ns; ++x) {
    const double pot = 0.5 * lat.grad_dot(p.phi.data(), p.phi.data(), x) + p.poly(p.phi[x]);
    sum += 0.5 * gradient[x] * gradient[x] - pot;
    pos += pot;
  }
  return pos > 0.0 ? sum / pos : sum;
}

EnergyProfile energy_profile(const LatticeProblem& p, const FieldMinimizer& f) {
  Discrete d(p);
  const std::size_t ns = d.lat.ns;
  const double a2 = p.poly.coefficient(2);
  Polynomial rest = p.poly;
  {
    auto c = p.poly.coefficients();
    c[2] = 0.0;
    rest = Polynomial(c);
  }
  EnergyProfile e;
  for (std::size_t j = 0; j < d.M; ++j) {
    const double* u = f.slice(j);
    const double* v = f.slice(j + 1);
    double sum = 0.0;
    for (std::size_t x = 0; x < ns; ++x) {
      const double dtv = (v[x] - u[x]) / d.h[j];
      sum += 0.5 * dtv * dtv - 0.5 * d.lat.grad_dot(u, v, x) - a2 * u[x] * v[x] - 0.5 * (rest(u[x]) + rest(v[x]));
    }
    sum *= p.volume_element();
    e.t.push_back(0.5 * (d.t[j] + d.t[j + 1]));
    e.e.push_back(sum);
    e.max_abs = std::max(e.max_abs, std::abs(sum));
  }
  return e;
}

double virial_t(const LatticeProblem& p, const std::vector<double>& phi) {
  Lattice lat(p);
  if (phi.size() != lat.ns) throw ValidationError("virial_t: boundary data has wrong size");
  double num = 0.0, den = 0.0;
  const auto& c = p.poly.coefficients();
  for (std::size_t x = 0; x < lat.ns; ++x) {
    const double g2 = lat.grad_dot(phi.data(), phi.data(), x);
    num += g2;
    den += g2;
    double pw = phi[x] * phi[x];
    for (std::size_t j = 2; j < c.size(); ++j, pw *= phi[x]) {
      num += static_cast<double>(j) * c[j] * pw;
      den += 2.0 * c[j] * pw;
    }
  }
  return 1.0 + num / den;
}

std::vector<VirialPoint> virial_ratio(const LatticeProblem& p, const std::vector<double>& amplitudes, FieldOptions opt) {
  for (std::size_t i = 1; i < amplitudes.size(); ++i)
    if (!(amplitudes[i] > amplitudes[i - 1])) throw ValidationError("virial_ratio: amplitudes must be ascending");
  std::vector<VirialPoint> out;
  std::vector<double> warm;
  double prev = 0.0;
  for (double A : amplitudes) {
    if (!(A > 0.0)) throw ValidationError("virial_ratio: amplitudes must be positive");
    const LatticeProblem q = p.scaled(A);
    if (!warm.empty())
      for (double& v : warm) v *= A / prev;
    const FieldMinimizer f = minimize_field(q, opt, warm.empty() ? nullptr : &warm);
    const auto g = functional_gradient(q, f);
    double flux = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x) flux += q.phi[x] * g[x];
    flux *= q.volume_element();
    VirialPoint v;
    v.amplitude = A;
    v.action = f.action;
    v.r = flux / f.action;
    v.t = virial_t(q, q.phi);
    v.newton_iterations = f.newton_iterations;
    v.step_halving = f.step_halving;
    out.push_back(v);
    warm = f.field;
    prev = A;
  }
  return out;
}

double lattice_k2(const LatticeProblem& p, const std::vector<int>& k) {
  double s = 0.0;
  for (int kd : k) {
    const double v = 2.0 / p.a * std::sin(M_PI * kd / static_cast<double>(p.N));
    s += v * v;
  }
  return s;
}

FreeMode free_mode(double dt, double mu2) {
  const double b = 1.0 + 0.5 * dt * dt * mu2;  // r + 1/r = 2b
  FreeMode m;
  m.r = b - std::sqrt(b * b - 1.0);
  m.omega = (1.0 / m.r - m.r) / (2.0 * dt);
  return m;
}

namespace {

// Dirichlet-to-Neumann value of one free mode on the time grid: Phi_M = 1, Phi_0 = 0.
double chain_dtn(const std::vector<double>& t, double mu2) {
  const std::size_t M = t.size() - 1;
  std::vector<double> h(M), piv(M), y(M);
  for (std::size_t j = 0; j < M; ++j) h[j] = t[j + 1] - t[j];
  for (std::size_t j = 1; j < M; ++j) {
    double diag = 1.0 / h[j - 1] + 1.0 / h[j] + 0.5 * (h[j - 1] + h[j]) * mu2;
    double rhs = j + 1 == M ? 1.0 / h[j] : 0.0;
    if (j > 1) {
      diag -= 1.0 / (h[j - 1] * h[j - 1] * piv[j - 1]);
      rhs += y[j - 1] / (h[j - 1] * piv[j - 1]);
    }
    piv[j] = diag;
    y[j] = rhs;
  }
  // only Phi_{M-1} is needed
  const double last = y[M - 1] / piv[M - 1];
  return (1.0 - last) / h[M - 1] + 0.5 * h[M - 1] * mu2;
}

}  // namespace

double free_action(const LatticeProblem& p, double m0) {
  const std::size_t N = p.N, ns = p.sites();
  if (p.phi.size() != ns) throw ValidationError("free_action: boundary data has wrong size");
  // separable DFT
  std::vector<std::complex<double>> f(p.phi.begin(), p.phi.end()), tmp(N);
  std::vector<std::complex<double>> tw(N);
  for (std::size_t k = 0; k < N; ++k) tw[k] = std::polar(1.0, -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(N));
  std::size_t stride = 1;
  for (int d = 0; d < p.n; ++d) {
    for (std::size_t base = 0; base < ns; ++base) {
      if ((base / stride) % N != 0) continue;
      for (std::size_t k = 0; k < N; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t x = 0; x < N; ++x) acc += f[base + x * stride] * tw[(k * x) % N];
        tmp[k] = acc;
      }
      for (std::size_t k = 0; k < N; ++k) f[base + k * stride] = tmp[k];
    }
    stride *= N;
  }
  const auto t = p.time_nodes();
  std::map<std::vector<std::size_t>, double> cache;
  double s = 0.0;
  for (std::size_t idx = 0; idx < ns; ++idx) {
    std::vector<std::size_t> key;
    std::vector<int> k;
    std::size_t rest = idx;
    for (int d = 0; d < p.n; ++d) {
      const std::size_t kd = rest % N;
      rest /= N;
      k.push_back(static_cast<int>(kd));
      key.push_back(std::min(kd, N - kd));
    }
    std::sort(key.begin(), key.end());
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, chain_dtn(t, lattice_k2(p, k) + m0 * m0)).first;
    s += 0.5 * std::norm(f[idx]) * it->second;
  }
  return s * p.volume_element() / static_cast<double>(ns);
}

GaussianBound gaussian_bound(const LatticeProblem& p, const FieldMinimizer& f, double c) {
  GaussianBound b;
  const auto& coef = p.poly.coefficients();
  if (c <= 0.0) {
    for (double v : coef)
      if (v < 0.0) throw ValidationError("gaussian_bound: automatic C = a_2 needs nonnegative coefficients");
    c = p.poly.coefficient(2);
  } else {
    const double range = 10.0 * (1.0 + sup(p.phi));
    for (int i = -2000; i <= 2000; ++i) {
      const double z = range * i / 2000.0;
      if (p.poly(z) < c * z * z - 1e-12 * (1.0 + c * z * z))
        throw ValidationError(fmt::format("gaussian_bound: P({}) < C z^2 for C = {}", z, c));
    }
  }
  b.c = c;
  b.m0 = std::sqrt(2.0 * c);
  b.s0 = f.action;
  b.s0_free = free_action(p, b.m0);
  b.slack = b.s0 - b.s0_free;
  return b;
}

void write_snapshot(std::ostream& os, const LatticeProblem& p, const FieldMinimizer& f) {
  os << "semicl-lattice-snapshot\n"
     << fmt::format("n={}\nN={}\na={:.17g}\nslices={}\nsites={}\n", p.n, p.N, p.a, f.slices(), f.sites)
     << "layout=t[slices] then field[slices][sites], float64 little-endian\nend\n";
  os.write(reinterpret_cast<const char*>(f.t.data()), static_cast<std::streamsize>(f.t.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(f.field.data()), static_cast<std::streamsize>(f.field.size() * sizeof(double)));
}

Snapshot read_snapshot(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "semicl-lattice-snapshot") throw ValidationError("read_snapshot: bad magic line");
  Snapshot s;
  std::size_t slices = 0, sites = 0;
  while (std::getline(is, line) && line != "end") {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    if (key == "n") s.n = std::stoi(val);
    else if (key == "N") s.N = std::stoul(val);
    else if (key == "a") s.a = std::stod(val);
    else if (key == "slices") slices = std::stoul(val);
    else if (key == "sites") sites = std::stoul(val);
  }
  if (line != "end" || slices == 0 || sites == 0) throw ValidationError("read_snapshot: incomplete header");
  s.t.resize(slices);
  s.field.resize(slices * sites);
  is.read(reinterpret_cast<char*>(s.t.data()), static_cast<std::streamsize>(slices * sizeof(double)));
  is.read(reinterpret_cast<char*>(s.field.data()), static_cast<std::streamsize>(s.field.size() * sizeof(double)));
  if (!is) throw ValidationError("read_snapshot: truncated data");
  return s;
}

void write_energy_csv(std::ostream& os, const EnergyProfile& e) {
  os << "t,e\n";
  for (std::size_t i = 0; i < e.t.size(); ++i) os << fmt::format("{:.17g},{:.17g}\n", e.t[i], e.e[i]);
}

void write_virial_csv(std::ostream& os, const std::vector<VirialPoint>& pts) {
  os << "amplitude,action,R,T,newton_iterations,step_halving\n";
  for (const auto& v : pts)
    os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{},{}\n", v.amplitude, v.action, v.r, v.t, v.newton_iterations,
                      v.step_halving ? 1 : 0);
}

}  // namespace semicl
