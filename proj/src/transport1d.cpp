#include "semicl/transport1d.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "semicl/errors.hpp"

namespace semicl {

namespace {

using GaussRule = boost::math::quadrature::gauss<double, 10>;

// Vector-valued composite Gauss-Legendre; f(u, out) accumulates nothing, it fills out.
template <typename F>
std::vector<double> gauss_vector(F&& f, double a, double b, double panel, std::size_t n) {
  std::vector<double> acc(n, 0.0), val(n);
  if (a == b) return acc;
  const int cells = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / panel)));
  const double h = (b - a) / cells;
  const auto& xs = GaussRule::abscissa();
  const auto& ws = GaussRule::weights();
  for (int c = 0; c < cells; ++c) {
    const double mid = a + (c + 0.5) * h, half = 0.5 * h;
    for (std::size_t q = 0; q < xs.size(); ++q) {
      for (double s : {-1.0, 1.0}) {
        f(mid + s * half * xs[q], val);
        for (std::size_t k = 0; k < n; ++k) acc[k] += half * ws[q] * val[k];
      }
    }
  }
  return acc;
}

double mismatch(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}); }

std::size_t nearest(const std::vector<double>& x, double v) {
  auto it = std::lower_bound(x.begin(), x.end(), v);
  if (it == x.end()) return x.size() - 1;
  if (it == x.begin()) return 0;
  const auto i = static_cast<std::size_t>(it - x.begin());
  return (v - x[i - 1] < x[i] - v) ? i - 1 : i;
}

double quadrature_panel(const FundamentalSolution1D& sol, double a, double b) {
  return std::min({0.2 * sol.singularity_distance(a), 0.2 * sol.singularity_distance(b), 0.25});
}

}  // namespace

HierarchyState::HierarchyState(std::shared_ptr<const FundamentalSolution1D> sol, std::size_t order,
                               Polynomial hbar_potential, HierarchyOptions opt)
    : sol_(std::move(sol)), K_(order), v1_(std::move(hbar_potential)) {
  if (K_ < 1) throw ValidationError("hierarchy: order must be at least 1");
  const double m = mass();
  const std::size_t degree = opt.origin_degree ? opt.origin_degree : 80 + 3 * K_;
  if (degree < 2 * K_ + 4) throw ValidationError("hierarchy: origin degree too small for the order");

  origin_.resize(K_ + 1);
  origin_[0] = sol_->dS0_jet(0.0, degree);
  const Jet q = origin_[0].shift_down(1);
  e_.resize(K_);
  for (std::size_t n = 1; n <= K_; ++n) {
    Jet num = origin_[n - 1].derivative() * 0.5;
    for (std::size_t i = 1; i < n; ++i) num -= 0.5 * (origin_[i] * origin_[n - i]);
    if (n == 1) num += v1_.taylor(0.0, num.degree()) * m;
    e_[n - 1] = num[0] / m;
    num[0] = 0.0;
    origin_[n] = num.shift_down(1) / q;
  }

  const double rs = sol_->switch_radius();
  for (double x : {rs, -rs}) {
    const auto jets = derivative_jets(x, K_, 0);
    for (std::size_t k = 1; k <= K_; ++k) defect_ = std::max(defect_, mismatch(jets[k][0], origin_[k].evaluate(x)));
  }
  if (defect_ > opt.regularity_tol)
    throw NumericalError(fmt::format("hierarchy: loss of regularity, branch mismatch {:.3g} at the switch radius", defect_));

  const auto& x = sol_->grid().nodes();
  const std::size_t o = sol_->grid().origin_index();
  a_.assign(K_ + 1, std::vector<double>(x.size(), 0.0));
  a_[0] = sol_->s0();
  auto f = [this](double u, std::vector<double>& out) {
    const auto d = derivatives(u);
    for (std::size_t k = 0; k < K_; ++k) out[k] = d[k + 1];
  };
  auto step = [&](std::size_t from, std::size_t to) {
    const auto inc = gauss_vector(f, x[from], x[to], quadrature_panel(*sol_, x[from], x[to]), K_);
    for (std::size_t k = 1; k <= K_; ++k) a_[k][to] = a_[k][from] + inc[k - 1];
  };
  for (std::size_t i = o + 1; i < x.size(); ++i) step(i - 1, i);
  for (std::size_t i = o; i-- > 0;) step(i + 1, i);
}

std::vector<double> HierarchyState::energy_factorial() const {
  std::vector<double> r(e_.size());
  double f = 1.0;
  for (std::size_t k = 0; k < e_.size(); ++k) {
    if (k > 0) f *= static_cast<double>(k);
    r[k] = f * e_[k];
  }
  return r;
}

PowerSeries HierarchyState::energy_series() const {
  PowerSeries s;
  s.variable = "hbar";
  s.coeffs = e_;
  return s;
}

std::vector<Jet> HierarchyState::derivative_jets(double x0, std::size_t n, std::size_t degree) const {
  const double m = mass();
  std::vector<Jet> a(n + 1);
  a[0] = sol_->dS0_jet(x0, degree + n);
  for (std::size_t k = 1; k <= n; ++k) {
    Jet num = a[k - 1].derivative() * 0.5;
    for (std::size_t i = 1; i < k; ++i) num -= 0.5 * (a[i] * a[k - i]);
    if (k == 1) num += v1_.taylor(x0, num.degree()) * m;
    num -= m * e_[k - 1];
    a[k] = num / a[0];
  }
  return a;
}

std::vector<double> HierarchyState::derivatives(double x) const {
  std::vector<double> d(K_ + 1);
  if (std::abs(x) < sol_->switch_radius()) {
    for (std::size_t k = 0; k <= K_; ++k) d[k] = origin_[k].evaluate(x);
    return d;
  }
  const auto jets = derivative_jets(x, K_, 0);
  for (std::size_t k = 0; k <= K_; ++k) d[k] = jets[k][0];
  return d;
}

double HierarchyState::a(std::size_t k, double x) const {
  if (k == 0) return sol_->S0(x);
  const auto& nodes = sol_->grid().nodes();
  const std::size_t i = nearest(nodes, x);
  auto f = [this, k](double u, std::vector<double>& out) { out[0] = derivatives(u)[k]; };
  return a_[k][i] + gauss_vector(f, nodes[i], x, quadrature_panel(*sol_, nodes[i], x), 1)[0];
}

HierarchyState ground_hierarchy(std::shared_ptr<const FundamentalSolution1D> sol, std::size_t order,
                                HierarchyOptions opt) {
  return HierarchyState(std::move(sol), order, Polynomial(), opt);
}

ExcitedLeading excited_leading(const FundamentalSolution1D& sol, const SternbergMap1D& map, int quantum_number) {
  if (quantum_number < 0) throw ValidationError("excited state: quantum number must be nonnegative");
  ExcitedLeading r;
  r.delta0 = quantum_number * sol.omega();
  r.b0.resize(map.y().size());
  for (std::size_t i = 0; i < r.b0.size(); ++i) r.b0[i] = std::pow(map.y()[i], quantum_number);
  return r;
}

ExcitedState::ExcitedState(const HierarchyState& ground, int quantum_number, std::size_t order, HierarchyOptions opt)
    : ground_(&ground), m_(quantum_number), N_(order) {
  if (m_ < 0) throw ValidationError("excited state: quantum number must be nonnegative");
  if (N_ > ground.order()) throw ValidationError("excited state: ground hierarchy order must be at least N");
  const FundamentalSolution1D& sol = ground.solution();
  const double mass = sol.mass(), omega = sol.omega();
  const auto ms = static_cast<std::size_t>(m_);

  const Jet g = ground.origin_series(0).shift_down(1) * (1.0 / mass);
  if (ms + 2 * N_ + 2 > g.degree()) throw ValidationError("excited state: origin degree too small");
  delta_.assign(N_ + 1, 0.0);
  delta_[0] = m_ * omega;
  origin_.resize(N_ + 1);
  for (std::size_t n = 0; n <= N_; ++n) {
    Jet rho(g.degree());
    if (n > 0) {
      rho = origin_[n - 1].derivative().derivative() * (0.5 / mass);
      for (std::size_t k = 1; k < n; ++k) rho += delta_[k] * origin_[n - k];
      for (std::size_t i = 1; i <= n; ++i) rho -= (ground.origin_series(i) * origin_[n - i].derivative()) * (1.0 / mass);
    }
    const std::size_t deg = std::min(rho.degree(), g.degree());
    Jet beta(deg);
    for (std::size_t j = 0; j <= deg; ++j) {
      double s = (n > 0 ? rho[j] : 0.0) + (n > 0 && j < origin_[0].degree() + 1 ? delta_[n] * origin_[0][j] : 0.0);
      for (std::size_t i = 1; i <= j; ++i) s -= g[i] * static_cast<double>(j - i) * beta[j - i];
      if (j == ms) {
        if (n == 0) {
          beta[j] = 1.0;
        } else {
          delta_[n] = -s;  // delta_n * b0_{m*} with b0_{m*} = 1 was not yet included
          beta[j] = 0.0;
        }
      } else {
        beta[j] = s / ((static_cast<double>(j) - m_) * omega);
      }
    }
    origin_[n] = beta;
  }

  const double rs = sol.switch_radius();
  std::vector<double> vp(N_ + 1), vm(N_ + 1);
  for (std::size_t n = 0; n <= N_; ++n) {
    vp[n] = origin_[n].evaluate(rs);
    vm[n] = origin_[n].evaluate(-rs);
  }
  for (double x : {rs, -rs}) {
    std::vector<double> v(N_ + 1);
    for (std::size_t n = 0; n <= N_; ++n) v[n] = origin_[n].evaluate(x);
    const auto jets = local_jets(x, v, 1);
    for (std::size_t n = 0; n <= N_; ++n)
      defect_ = std::max(defect_, mismatch(jets[n][1], origin_[n].derivative().evaluate(x)));
  }
  if (defect_ > opt.regularity_tol)
    throw NumericalError(fmt::format("excited state: loss of regularity, branch mismatch {:.3g}", defect_));

  const auto& x = sol.grid().nodes();
  march(rs, std::max(x.back(), rs), vp);
  march(-rs, std::min(x.front(), -rs), vm);

  b_.assign(N_ + 1, std::vector<double>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t n = 0; n <= N_; ++n) b_[n][i] = b(n, x[i]);
}

std::vector<Jet> ExcitedState::local_jets(double x0, const std::vector<double>& values, std::size_t degree) const {
  const double mass = ground_->mass();
  const double d0 = delta_[0];
  const auto a = ground_->derivative_jets(x0, N_, degree + N_ + 1);
  const Jet p = Jet::constant(mass, a[0].degree()) / a[0];
  std::vector<Jet> b(N_ + 1);
  for (std::size_t n = 0; n <= N_; ++n) {
    const std::size_t deg = degree + (N_ - n);
    Jet r = Jet::constant(0.0, deg);
    if (n > 0) {
      r += b[n - 1].derivative().derivative() * (0.5 / mass);
      for (std::size_t k = 1; k <= n; ++k) r += delta_[k] * b[n - k];
      for (std::size_t i = 1; i <= n; ++i) r -= (a[i] * b[n - i].derivative()) * (1.0 / mass);
    }
    Jet beta(deg);
    beta[0] = values[n];
    for (std::size_t k = 0; k + 1 <= deg; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i <= k; ++i) s += p[i] * (d0 * beta[k - i] + (n > 0 ? r[k - i] : 0.0));
      beta[k + 1] = s / static_cast<double>(k + 1);
    }
    b[n] = beta;
  }
  return b;
}

void ExcitedState::march(double start, double end, std::vector<double> values) {
  constexpr std::size_t kDegree = 32;
  const FundamentalSolution1D& sol = ground_->solution();
  double x0 = start;
  const double dir = end >= start ? 1.0 : -1.0;
  while (dir * (end - x0) > 0.0) {
    const double h = std::min({0.25 * sol.singularity_distance(x0), 0.5, std::abs(end - x0)});
    auto jets = local_jets(x0, values, kDegree);
    const double x1 = (std::abs(end - x0) <= h) ? end : x0 + dir * h;
    for (std::size_t n = 0; n <= N_; ++n) values[n] = jets[n].evaluate(x1 - x0);
    patches_.push_back({x0, std::min(x0, x1), std::max(x0, x1), std::move(jets)});
    x0 = x1;
  }
}

double ExcitedState::b(std::size_t n, double x) const {
  if (std::abs(x) <= ground_->solution().switch_radius()) return origin_[n].evaluate(x);
  for (const Patch& p : patches_)
    if (x >= p.lo && x <= p.hi) return p.b[n].evaluate(x - p.center);
  throw ValidationError(fmt::format("excited state: x = {} outside the marched range", x));
}

std::vector<double> ExcitedState::energy() const {
  const std::size_t n = std::min(ground_->order() - 1, N_);
  std::vector<double> r(n + 1);
  for (std::size_t k = 0; k <= n; ++k) r[k] = ground_->energy()[k] + delta_[k];
  return r;
}

HierarchyState susy_ground(const Superpotential& w, Superpotential::Sector sector, std::size_t order, const Grid1D& grid,
                           HierarchyOptions opt) {
  auto sol = std::make_shared<const FundamentalSolution1D>(w.bosonic_potential(), grid);
  return HierarchyState(std::move(sol), order, w.hbar_term(sector), opt);
}

Assembly assemble(const HierarchyState& state, double hbar, std::optional<std::size_t> ground_terms,
                  const ExcitedState* excited) {
  if (!(hbar > 0.0)) throw ValidationError("assemble: hbar must be positive");
  const std::size_t kmax = std::min(ground_terms.value_or(state.order()), state.order());
  const auto& x = state.solution().grid().nodes();
  Assembly r;
  r.x = x;
  r.log_abs_psi.assign(x.size(), 0.0);
  r.sign.assign(x.size(), 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0.0, hk = 1.0 / hbar;
    for (std::size_t k = 0; k <= kmax; ++k, hk *= hbar) s += hk * state.profile(k)[i];
    double b = 1.0;
    if (excited) {
      b = 0.0;
      double hn = 1.0;
      for (std::size_t n = 0; n <= excited->order(); ++n, hn *= hbar) b += hn * excited->profile(n)[i];
    }
    r.sign[i] = b > 0.0 ? 1 : (b < 0.0 ? -1 : 0);
    r.log_abs_psi[i] = std::log(std::abs(b)) - s;
  }
  double e = 0.0, hk = hbar;
  for (std::size_t k = 0; k < kmax; ++k, hk *= hbar) e += hk * state.energy()[k];
  if (excited) {
    hk = hbar;
    for (std::size_t n = 0; n <= excited->order(); ++n, hk *= hbar) e += hk * excited->delta()[n];
  }
  r.energy = e;
  return r;
}

void write_profiles_csv(std::ostream& os, const HierarchyState& state) {
  os << "x";
  for (std::size_t k = 0; k <= state.order(); ++k) os << ",a" << k;
  os << "\n";
  const auto& x = state.solution().grid().nodes();
  for (std::size_t i = 0; i < x.size(); ++i) {
    os << fmt::format("{:.17g}", x[i]);
    for (std::size_t k = 0; k <= state.order(); ++k) os << fmt::format(",{:.17g}", state.profile(k)[i]);
    os << "\n";
  }
}

void write_coefficients_csv(std::ostream& os, const HierarchyState& state, const ExcitedState* excited) {
  os << "k,e_k,delta_k\n";
  for (std::size_t k = 0; k < state.order(); ++k) {
    const double d = (excited && k <= excited->order()) ? excited->delta()[k] : 0.0;
    os << fmt::format("{},{:.17g},{:.17g}\n", k, state.energy()[k], d);
  }
}

}  // namespace semicl
