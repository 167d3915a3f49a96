#include "semicl/hj1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "semicl/errors.hpp"

namespace semicl {

Grid1D::Grid1D(std::vector<double> nodes) : x_(std::move(nodes)) {
  if (x_.size() < 3) throw ValidationError("grid: need at least three nodes");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1])) throw ValidationError("grid: nodes must be strictly increasing");
  auto it = std::find(x_.begin(), x_.end(), 0.0);
  if (it == x_.end()) throw ValidationError("grid: the origin must be a node");
  origin_ = static_cast<std::size_t>(it - x_.begin());
}

Grid1D Grid1D::uniform(double half_width, std::size_t n_half) {
  std::vector<double> x(2 * n_half + 1);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = half_width * (static_cast<double>(i) - static_cast<double>(n_half)) / static_cast<double>(n_half);
  x[n_half] = 0.0;
  return Grid1D(std::move(x));
}

Grid1D Grid1D::stretched(double half_width, std::size_t n_half, double ratio) {
  if (ratio == 1.0) return uniform(half_width, n_half);
  // cells h, h r, h r^2, ... summing to half_width
  const double h = half_width * (ratio - 1.0) / (std::pow(ratio, static_cast<double>(n_half)) - 1.0);
  std::vector<double> pos(n_half + 1, 0.0);
  double step = h;
  for (std::size_t i = 1; i <= n_half; ++i, step *= ratio) pos[i] = pos[i - 1] + step;
  pos.back() = half_width;
  std::vector<double> x;
  for (std::size_t i = n_half; i > 0; --i) x.push_back(-pos[i]);
  x.insert(x.end(), pos.begin(), pos.end());
  return Grid1D(std::move(x));
}

Grid1D Grid1D::refined() const {
  std::vector<double> x;
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    x.push_back(x_[i]);
    x.push_back(0.5 * (x_[i] + x_[i + 1]));
  }
  x.push_back(x_.back());
  return Grid1D(std::move(x));
}

namespace {

std::size_t nearest_node(const std::vector<double>& x, double v) {
  auto it = std::lower_bound(x.begin(), x.end(), v);
  if (it == x.end()) return x.size() - 1;
  if (it == x.begin()) return 0;
  return (v - *(it - 1) < *it - v) ? static_cast<std::size_t>(it - x.begin()) - 1
                                   : static_cast<std::size_t>(it - x.begin());
}

}  // namespace

FundamentalSolution1D::FundamentalSolution1D(const Potential1D& v, Grid1D grid, FundamentalSolutionOptions opt)
    : v_(v), grid_(std::move(grid)), g_(v.polynomial().divided_by_power(2)) {
  const auto& gc = g_.coefficients();
  const std::size_t deg = g_.degree();
  if (deg >= 1) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(deg), static_cast<Eigen::Index>(deg));
    for (std::size_t i = 0; i < deg; ++i) {
      companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(deg - 1)) = -gc[i] / gc[deg];
      if (i > 0) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      g_roots_re_.push_back(es.eigenvalues()[i].real());
      g_roots_im_.push_back(es.eigenvalues()[i].imag());
    }
  }
  const double r0 = singularity_distance(0.0);
  r_switch_ = opt.switch_radius > 0.0 ? opt.switch_radius : std::min(0.4 * r0, 1.0);

  origin_g_ = sqrt(g_.taylor(0.0, opt.origin_degree) * (2.0 * mass())) * (1.0 / mass());

  const auto& x = grid_.nodes();
  s0_.assign(x.size(), 0.0);
  ds0_.resize(x.size());
  dds0_.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0 && !(g_(x[i]) > 0.0))
      throw NumericalError(fmt::format("fundamental solution: V vanishes or is negative at x = {}", x[i]));
    const Jet j = dS0_jet(x[i], 1);
    ds0_[i] = j[0];
    dds0_[i] = j[1];
  }
  const std::size_t o = grid_.origin_index();
  for (std::size_t i = o + 1; i < x.size(); ++i) s0_[i] = s0_[i - 1] + integrate_ds0(x[i - 1], x[i]);
  for (std::size_t i = o; i-- > 0;) s0_[i] = s0_[i + 1] + integrate_ds0(x[i + 1], x[i]);
}

double FundamentalSolution1D::singularity_distance(double x0) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g_roots_re_.size(); ++i) d = std::min(d, std::hypot(x0 - g_roots_re_[i], g_roots_im_[i]));
  return d;
}

double FundamentalSolution1D::integrate_ds0(double a, double b) const {
  const double panel = std::min(0.2 * std::min(singularity_distance(a), singularity_distance(b)), 0.25);
  return composite_gauss([this](double u) { return dS0(u); }, a, b, panel);
}

Jet FundamentalSolution1D::dS0_jet(double x0, std::size_t degree) const {
  const Jet root = sqrt(g_.taylor(x0, degree) * (2.0 * mass()));
  return Jet::variable(x0, degree) * root;
}

double FundamentalSolution1D::S0(double x) const {
  const std::size_t i = nearest_node(grid_.nodes(), x);
  return s0_[i] + integrate_ds0(grid_[i], x);
}

double FundamentalSolution1D::dS0(double x) const { return x * std::sqrt(2.0 * mass() * g_(x)); }

double FundamentalSolution1D::ddS0(double x) const { return dS0_jet(x, 1)[1]; }

double FundamentalSolution1D::hj_residual() const {
  double r = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i)
    r = std::max(r, std::abs(ds0_[i] * ds0_[i] / (2.0 * mass()) - v_.eval(grid_[i])));
  return r;
}

SternbergMap1D::SternbergMap1D(const FundamentalSolution1D& sol) : sol_(&sol) {
  const Jet& g = sol.origin_G();
  origin_integrand_ = (Jet::constant(sol.omega(), g.degree()) / g - 1.0).shift_down(1);

  const auto& x = sol.grid().nodes();
  const std::size_t o = sol.grid().origin_index();
  log_ratio_.assign(x.size(), 0.0);
  const double panel = std::min(0.2 * sol.singularity_distance(0.0), 0.25);
  for (std::size_t i = o + 1; i < x.size(); ++i)
    log_ratio_[i] = log_ratio_[i - 1] + composite_gauss([this](double u) { return integrand(u); }, x[i - 1], x[i], panel);
  for (std::size_t i = o; i-- > 0;)
    log_ratio_[i] = log_ratio_[i + 1] + composite_gauss([this](double u) { return integrand(u); }, x[i + 1], x[i], panel);
  y_.resize(x.size());
  dy_.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = std::exp(log_ratio_[i]);
    y_[i] = x[i] * e;
    dy_[i] = e * (1.0 + x[i] * integrand(x[i]));
  }
}

double SternbergMap1D::integrand(double u) const {
  if (std::abs(u) < sol_->switch_radius()) return origin_integrand_.evaluate(u);
  return sol_->mass() * sol_->omega() / sol_->dS0(u) - 1.0 / u;
}

double SternbergMap1D::log_ratio(double x) const {
  const auto& nodes = sol_->grid().nodes();
  const std::size_t i = nearest_node(nodes, x);
  const double panel = std::min(0.2 * sol_->singularity_distance(0.0), 0.25);
  return log_ratio_[i] + composite_gauss([this](double u) { return integrand(u); }, nodes[i], x, panel);
}

double SternbergMap1D::operator()(double x) const { return x * std::exp(log_ratio(x)); }

double SternbergMap1D::derivative(double x) const { return std::exp(log_ratio(x)) * (1.0 + x * integrand(x)); }

void write_csv(std::ostream& os, const FundamentalSolution1D& sol, const SternbergMap1D& map) {
  os << "x,V,S0,dS0,ddS0,y\n";
  const auto& x = sol.grid().nodes();
  for (std::size_t i = 0; i < x.size(); ++i)
    os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", x[i], sol.potential().eval(x[i]), sol.s0()[i],
                      sol.ds0()[i], sol.dds0()[i], map.y()[i]);
}

}  // namespace semicl
