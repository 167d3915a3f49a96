#include "semicl/resummation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "semicl/errors.hpp"

namespace semicl {

double PadeApproximant::operator()(double z) const {
  auto horner = [z](const std::vector<double>& c) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
  };
  return horner(p) / horner(q);
}

std::vector<std::complex<double>> PadeApproximant::poles() const {
  std::vector<std::complex<double>> r;
  const std::size_t deg = q.size() - 1;
  if (deg == 0) return r;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(deg), static_cast<Eigen::Index>(deg));
  for (std::size_t i = 0; i < deg; ++i) {
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(deg - 1)) = -q[i] / q[deg];
    if (i > 0) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r.push_back(es.eigenvalues()[i]);
  return r;
}

PadeApproximant pade(const std::vector<double>& c_in, int l, int m, double tol) {
  if (l < 0 || m < 0) throw ValidationError("pade: degrees must be nonnegative");
  if (static_cast<std::size_t>(l + m + 1) > c_in.size())
    throw ValidationError(fmt::format("pade: [{}/{}] needs {} coefficients, have {}", l, m, l + m + 1, c_in.size()));
  PadeApproximant r;
  r.requested_l = l;
  r.requested_m = m;
  std::vector<double> c(c_in.begin(), c_in.begin() + l + m + 1);
  const double cnorm = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())).norm();
  double head = 0.0;
  for (int i = 0; i <= l; ++i) head = std::max(head, std::abs(c[static_cast<std::size_t>(i)]));
  if (cnorm == 0.0 || head <= tol * cnorm) {
    r.p = {0.0};
    r.q = {1.0};
    return r;
  }
  auto coef = [&](int k) { return (k >= 0 && k < static_cast<int>(c.size())) ? c[static_cast<std::size_t>(k)] : 0.0; };
  auto toeplitz = [&](int rows_from, int rows, int cols) {
    Eigen::MatrixXd z(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) z(i, j) = coef(rows_from + i - j);
    return z;
  };

  Eigen::VectorXd q = Eigen::VectorXd::Ones(1);
  while (true) {
    if (m == 0) {
      q = Eigen::VectorXd::Ones(1);
      break;
    }
    const Eigen::MatrixXd block = toeplitz(l + 1, m, m + 1);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(block, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int rho = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > tol * cnorm) ++rho;
    if (rho == m) {
      q = svd.matrixV().col(m);
      break;
    }
    l -= m - rho;
    m = rho;
    if (l < 0) {
      l = 0;
    }
  }
  Eigen::VectorXd p = toeplitz(0, l + 1, m + 1) * q;
  // common factor z^lambda
  int lam = 0;
  while (lam < q.size() && std::abs(q[lam]) <= tol) ++lam;
  std::vector<double> pv(p.data(), p.data() + p.size()), qv(q.data() + lam, q.data() + q.size());
  if (lam > 0) pv.erase(pv.begin(), pv.begin() + std::min<std::ptrdiff_t>(lam, static_cast<std::ptrdiff_t>(pv.size())));
  if (pv.empty()) pv = {0.0};
  auto trim = [&](std::vector<double>& v, double scale) {
    while (v.size() > 1 && std::abs(v.back()) <= tol * scale) v.pop_back();
  };
  const double qs = Eigen::Map<Eigen::VectorXd>(qv.data(), static_cast<Eigen::Index>(qv.size())).norm();
  const double ps = std::max(Eigen::Map<Eigen::VectorXd>(pv.data(), static_cast<Eigen::Index>(pv.size())).norm(), 1e-300);
  trim(qv, qs);
  trim(pv, ps);
  const double q0 = qv.front();
  for (double& v : pv) v /= q0;
  for (double& v : qv) v /= q0;
  r.p = std::move(pv);
  r.q = std::move(qv);
  r.l = static_cast<int>(r.p.size()) - 1;
  r.m = static_cast<int>(r.q.size()) - 1;
  return r;
}

namespace {

// Poles within angle_tol of the ray and closer than `reach` flag the result.
void attach_poles(ResummationReport& rep, const PadeApproximant& a, double angle_tol, double reach) {
  rep.effective_l = a.l;
  rep.effective_m = a.m;
  rep.poles = a.poles();
  for (const auto& p : rep.poles) {
    const double angle = std::abs(std::arg(p)) * 180.0 / std::numbers::pi;
    rep.min_pole_angle_deg = std::min(rep.min_pole_angle_deg, angle);
    if (angle < angle_tol) {
      if (std::abs(p) <= reach) {
        rep.reliable = false;
        rep.note = fmt::format("pole at {:.6g} within {:.3g} deg of the positive real axis", std::abs(p), angle);
      } else if (rep.reliable) {
        rep.note = fmt::format("pole at {:.6g} near the ray lies beyond the integration cutoff", std::abs(p));
      }
    }
  }
  if (a.reduced() && rep.note.empty()) rep.note = fmt::format("reduced to [{}/{}]", a.l, a.m);
}

}  // namespace

ResummationReport pade_sum(const PowerSeries& s, int l, int m, double z) {
  const auto a = pade(s.coeffs, l, m);
  ResummationReport rep;
  rep.method = "pade";
  rep.l = l;
  rep.m = m;
  rep.point = z;
  rep.value = a(z);
  // poles of the approximant in z; only ones on [0, z] matter for the sum itself
  attach_poles(rep, a, -1.0, 0.0);
  for (const auto& p : rep.poles)
    if (std::abs(p.imag()) < 1e-12 * std::max(1.0, std::abs(p)) && p.real() * z > 0.0 && std::abs(p.real()) <= std::abs(z)) {
      rep.reliable = false;
      rep.note = "pole between 0 and the evaluation point";
    }
  if (!std::isfinite(rep.value)) throw NumericalError("pade: value is not finite");
  return rep;
}

ResummationReport borel_pade(const PowerSeries& s, int l, int m, double z, ResummationOptions opt) {
  if (!(z > 0.0)) throw ValidationError("borel-pade: evaluation point must be positive");
  std::vector<double> b(s.coeffs.size());
  double fact = 1.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    b[k] = s.coeffs[k] / fact;
  }
  const auto a = pade(b, l, m);
  ResummationReport rep;
  rep.method = "borel-pade";
  rep.l = l;
  rep.m = m;
  rep.point = z;

  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  auto f = [&](double t) { return std::exp(-t) * a(z * t); };
  double acc = 0.0, lo = 0.0, width = 1.0;
  for (int panel = 0; panel < 200; ++panel) {
    const double hi = lo + width;
    double err = 0.0;
    acc += GK::integrate(f, lo, hi, 15, opt.quad_tol, &err);
    // e^{-t} |B(z t)| beyond hi, bounded by the value at the panel edge for rational B of low growth
    const double tail = std::exp(-hi) * std::max(std::abs(a(z * hi)), 1.0) * std::max(1.0, static_cast<double>(a.l));
    lo = hi;
    width *= 2.0;
    if (tail < 1e-16 * std::max(std::abs(acc), 1e-300)) break;
  }
  rep.value = acc;
  rep.cutoff = lo;
  attach_poles(rep, a, opt.pole_angle_deg, z * lo);
  if (!std::isfinite(rep.value)) throw NumericalError("borel-pade: Laplace integral is not finite");
  return rep;
}

void write_report_csv(std::ostream& os, const std::vector<ResummationReport>& reports) {
  os << "method,L,M,effective_L,effective_M,point,value,reliable,min_pole_angle_deg\n";
  for (const auto& r : reports)
    os << fmt::format("{},{},{},{},{},{:.17g},{:.17g},{},{:.17g}\n", r.method, r.l, r.m, r.effective_l, r.effective_m,
                      r.point, r.value, r.reliable ? 1 : 0, r.min_pole_angle_deg);
}

}  // namespace semicl
