#include "semicl/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "semicl/errors.hpp"

namespace semicl {

Potential1D::Potential1D(double mass, double omega, std::map<int, double> anharmonic, double coercivity)
    : mass_(mass), omega_(omega), coercivity_(coercivity), anharmonic_(std::move(anharmonic)) {
  if (!(mass > 0.0)) throw ValidationError("potential: mass must be positive");
  if (!(omega > 0.0)) throw ValidationError("potential: omega must be positive");
  if (coercivity < 0.0 || coercivity >= omega)
    throw ValidationError("potential: coercivity constant must satisfy 0 <= lambda < omega");
  std::vector<double> c(3, 0.0);
  c[2] = 0.5 * mass * omega * omega;
  for (auto it = anharmonic_.begin(); it != anharmonic_.end();) {
    if (it->first < 3)
      throw ValidationError(fmt::format("potential: anharmonic monomial x^{} has degree < 3", it->first));
    if (it->second == 0.0) {
      it = anharmonic_.erase(it);
      continue;
    }
    if (c.size() <= static_cast<std::size_t>(it->first)) c.resize(it->first + 1, 0.0);
    c[it->first] += it->second;
    ++it;
  }
  v_ = Polynomial(std::move(c));
  dv_ = v_.derivative();
  ddv_ = dv_.derivative();
}

double Potential1D::nu() const { return std::sqrt(omega_ * omega_ - coercivity_ * coercivity_); }

namespace {

int total_degree(const Monomial& m) { return std::accumulate(m.exponents.begin(), m.exponents.end(), 0); }

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

}  // namespace

PotentialND::PotentialND(double mass, std::vector<double> omega, std::vector<Monomial> terms,
                         std::vector<double> coercivity)
    : mass_(mass), omega_(std::move(omega)), terms_(std::move(terms)), lambda_(std::move(coercivity)) {
  if (!(mass > 0.0)) throw ValidationError("potential: mass must be positive");
  if (omega_.empty() || omega_.size() > 4) throw ValidationError("potential: dimension must be 1..4");
  if (lambda_.empty()) lambda_.assign(omega_.size(), 0.0);
  if (lambda_.size() != omega_.size()) throw ValidationError("potential: lambda list length must match omega");
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    if (!(omega_[i] > 0.0)) throw ValidationError("potential: frequencies must be positive");
    if (lambda_[i] < 0.0 || lambda_[i] >= omega_[i])
      throw ValidationError("potential: coercivity constants must satisfy 0 <= lambda_i < omega_i");
  }
  for (const Monomial& m : terms_) {
    if (m.exponents.size() != omega_.size())
      throw ValidationError("potential: monomial exponent list has wrong dimension");
    if (std::any_of(m.exponents.begin(), m.exponents.end(), [](int e) { return e < 0; }))
      throw ValidationError("potential: negative exponent");
    if (total_degree(m) < 3)
      throw ValidationError(fmt::format("potential: anharmonic monomial of total degree {} < 3", total_degree(m)));
  }
}

PotentialND PotentialND::from_1d(const Potential1D& v) {
  std::vector<Monomial> terms;
  for (const auto& [p, c] : v.anharmonic()) terms.push_back({{p}, c});
  return PotentialND(v.mass(), {v.omega()}, std::move(terms), {v.coercivity()});
}

std::vector<double> PotentialND::nu() const {
  std::vector<double> r(omega_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::sqrt(omega_[i] * omega_[i] - lambda_[i] * lambda_[i]);
  return r;
}

double PotentialND::eval_anharmonic(const Eigen::VectorXd& x) const {
  double a = 0.0;
  for (const Monomial& m : terms_) {
    double t = m.coeff;
    for (std::size_t i = 0; i < m.exponents.size(); ++i) t *= ipow(x[static_cast<Eigen::Index>(i)], m.exponents[i]);
    a += t;
  }
  return a;
}

double PotentialND::eval(const Eigen::VectorXd& x) const {
  double q = 0.0;
  for (std::size_t i = 0; i < omega_.size(); ++i) q += omega_[i] * omega_[i] * x[static_cast<Eigen::Index>(i)] * x[static_cast<Eigen::Index>(i)];
  return 0.5 * mass_ * q + eval_anharmonic(x);
}

Eigen::VectorXd PotentialND::eval_grad(const Eigen::VectorXd& x) const {
  const Eigen::Index n = dimension();
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) g[i] = mass_ * omega_[i] * omega_[i] * x[i];
  for (const Monomial& m : terms_) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (m.exponents[k] == 0) continue;
      double t = m.coeff * m.exponents[k];
      for (Eigen::Index i = 0; i < n; ++i) t *= ipow(x[i], m.exponents[i] - (i == k ? 1 : 0));
      g[k] += t;
    }
  }
  return g;
}

Eigen::MatrixXd PotentialND::eval_hess(const Eigen::VectorXd& x) const {
  const Eigen::Index n = dimension();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = mass_ * omega_[i] * omega_[i];
  for (const Monomial& m : terms_) {
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index l = k; l < n; ++l) {
        std::vector<int> e = m.exponents;
        double t = m.coeff * e[k];
        --e[k];
        if (e[k] < 0) continue;
        t *= e[l];
        --e[l];
        if (e[l] < 0 || t == 0.0) continue;
        for (Eigen::Index i = 0; i < n; ++i) t *= ipow(x[i], e[i]);
        h(k, l) += t;
        if (l != k) h(l, k) += t;
      }
    }
  }
  return h;
}

Superpotential::Superpotential(Polynomial w) : w_(std::move(w)) {
  if (w_.coefficient(0) != 0.0) throw ValidationError("superpotential: W(0) must vanish");
  if (w_.coefficient(1) != 0.0) throw ValidationError("superpotential: W'(0) must vanish");
  if (!(w_.coefficient(2) > 0.0)) throw ValidationError("superpotential: W''(0) must be positive");
}

Potential1D Superpotential::bosonic_potential() const {
  const Polynomial dw = w_.derivative();
  const Polynomial v = (dw * dw) * 0.5;
  const double omega = 2.0 * w_.coefficient(2);  // W''(0)
  std::map<int, double> terms;
  for (std::size_t p = 3; p < v.coefficients().size(); ++p)
    if (v.coefficient(p) != 0.0) terms[static_cast<int>(p)] = v.coefficient(p);
  return Potential1D(1.0, omega, std::move(terms));
}

Polynomial Superpotential::hbar_term(Sector sector) const {
  const Polynomial ddw = w_.derivative().derivative();
  return ddw * (sector == Sector::plus ? -0.5 : 0.5);
}

Polynomial Superpotential::sector_potential(Sector sector, double hbar) const {
  const Polynomial dw = w_.derivative();
  return (dw * dw) * 0.5 + hbar_term(sector) * hbar;
}

SamplingBox SamplingBox::symmetric(int dimension, double half_width, int resolution) {
  return SamplingBox{std::vector<double>(dimension, -half_width), std::vector<double>(dimension, half_width), resolution};
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.passed; });
}

const HypothesisCheck& ValidationReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no validation check named " + name);
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "pass " : "FAIL ") << c.name << " worst=" << fmt::format("{:.6g}", c.worst_value) << " at (";
    for (std::size_t i = 0; i < c.worst_point.size(); ++i) os << (i ? ", " : "") << fmt::format("{:.6g}", c.worst_point[i]);
    os << ")";
    if (!c.detail.empty()) os << " " << c.detail;
    os << "\n";
  }
  return os.str();
}

namespace {

template <typename F>
void for_each_sample(const SamplingBox& box, F&& f) {
  const std::size_t n = box.lower.size();
  if (box.upper.size() != n || box.resolution < 2) throw ValidationError("sampling box is malformed");
  std::vector<int> idx(n, 0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  while (true) {
    for (std::size_t i = 0; i < n; ++i)
      x[static_cast<Eigen::Index>(i)] =
          box.lower[i] + (box.upper[i] - box.lower[i]) * idx[i] / static_cast<double>(box.resolution - 1);
    f(x);
    std::size_t k = 0;
    while (k < n && ++idx[k] == box.resolution) idx[k++] = 0;
    if (k == n) break;
  }
}

struct WorstTracker {
  HypothesisCheck check;
  explicit WorstTracker(std::string name) {
    check.name = std::move(name);
    check.worst_value = std::numeric_limits<double>::infinity();
  }
  void observe(const Eigen::VectorXd& x, double value) {
    if (value < check.worst_value) {
      check.worst_value = value;
      check.worst_point.assign(x.data(), x.data() + x.size());
    }
  }
};

}  // namespace

ValidationReport validate(const PotentialND& v, const SamplingBox& box) {
  if (static_cast<int>(box.lower.size()) != v.dimension())
    throw ValidationError("sampling box dimension does not match the potential");
  ValidationReport report;
  report.box = box;

  WorstTracker nonneg("nonnegativity"), minimum("origin_minimum"), coercive("coercivity"), convex("convexity"),
      leading("leading_term");

  int top = 2;
  for (const auto& m : v.terms()) top = std::max(top, total_degree(m));
  std::vector<Monomial> top_terms;
  for (const auto& m : v.terms())
    if (total_degree(m) == top) top_terms.push_back(m);

  double vscale = 0.0;
  for_each_sample(box, [&](const Eigen::VectorXd& x) { vscale = std::max(vscale, std::abs(v.eval(x))); });
  const double tol = 1e-12 * (1.0 + vscale);

  const auto& lambda = v.coercivity();
  for_each_sample(box, [&](const Eigen::VectorXd& x) {
    const double value = v.eval(x);
    nonneg.observe(x, value);
    if (x.norm() > 0.0) minimum.observe(x, value);
    double bound = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) bound += lambda[static_cast<std::size_t>(i)] * lambda[static_cast<std::size_t>(i)] * x[i] * x[i];
    coercive.observe(x, v.eval_anharmonic(x) + 0.5 * v.mass() * bound);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v.eval_hess(x), Eigen::EigenvaluesOnly);
    convex.observe(x, es.eigenvalues().minCoeff());
    if (!top_terms.empty() && x.norm() > 0.0) {
      const Eigen::VectorXd u = x / x.norm();
      double form = 0.0;
      for (const auto& m : top_terms) {
        double t = m.coeff;
        for (Eigen::Index i = 0; i < u.size(); ++i) t *= ipow(u[i], m.exponents[static_cast<std::size_t>(i)]);
        form += t;
      }
      leading.observe(x, form);
    }
  });

  nonneg.check.passed = nonneg.check.worst_value >= -tol;
  minimum.check.passed = minimum.check.worst_value > 0.0;
  coercive.check.passed = coercive.check.worst_value >= -tol;
  convex.check.passed = convex.check.worst_value >= -tol;
  if (top_terms.empty()) {
    leading.check.worst_value = 0.0;
    leading.check.detail = "harmonic";
  } else {
    leading.check.passed = top % 2 == 0 && leading.check.worst_value >= 0.0;
    leading.check.detail = fmt::format("degree {}", top);
  }
  report.min_hessian_eigenvalue = convex.check.worst_value;
  report.checks = {nonneg.check, minimum.check, coercive.check, convex.check, leading.check};
  return report;
}

ValidationReport validate(const Potential1D& v, const SamplingBox& box) {
  return validate(PotentialND::from_1d(v), box);
}

}  // namespace semicl
