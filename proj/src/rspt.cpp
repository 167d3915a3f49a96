#include "semicl/rspt.hpp"

#include <cmath>
#include <map>

#include "semicl/errors.hpp"

namespace semicl {

using boost::multiprecision::cpp_int;

double Surd::value() const { return coeff.convert_to<double>() * std::sqrt(radicand.convert_to<double>()); }

namespace {

// Work in the unnormalized basis |j) = (a^dagger)^j |0>, where a^dagger|j) = |j+1),
// a|j) = j|j-1) and (i|j) = i! delta_ij. (a + a^dagger) has integer entries.
template <typename T>
std::vector<T> apply_ladder_sum(const std::vector<T>& v, int p) {
  std::vector<T> cur = v;
  for (int s = 0; s < p; ++s) {
    std::vector<T> next(cur.size(), T(0));
    for (std::size_t j = 0; j < cur.size(); ++j) {
      if (cur[j] == T(0)) continue;
      if (j > 0) next[j - 1] += T(static_cast<long>(j)) * cur[j];
      if (j + 1 < cur.size()) next[j + 1] += cur[j];
    }
    cur = std::move(next);
  }
  return cur;
}

Rational half_power(int k) {  // 2^{-k}
  return Rational(1, cpp_int(1) << k);
}

// Perturbation sum_t g^{order_t} w_t xi^{power_t}.
template <typename T>
struct Term {
  int order;
  int power;
  T w;
};

template <typename T>
using Perturbation = std::vector<Term<T>>;

template <typename T>
T scale_for_power(int p);

template <>
Rational scale_for_power<Rational>(int p) {
  if (p % 2) throw ValidationError("rspt: odd powers are not available in exact arithmetic");
  return half_power(p / 2);
}

template <>
double scale_for_power<double>(int p) {
  return std::pow(2.0, -0.5 * p);
}

template <typename T>
std::vector<T> rs_energies(const Perturbation<T>& pert, int n, std::size_t order) {
  int pmax = 0;
  for (const auto& t : pert) pmax = std::max(pmax, t.power);
  const std::size_t nb = static_cast<std::size_t>(n) + order * static_cast<std::size_t>(pmax) + 1;
  std::vector<std::vector<T>> psi(order + 1, std::vector<T>(nb, T(0)));
  std::vector<T> e(order + 1, T(0));
  psi[0][static_cast<std::size_t>(n)] = T(1);
  e[0] = T(n) + T(1) / T(2);

  // W_t psi_k, cached per (t, k)
  std::map<std::pair<std::size_t, std::size_t>, std::vector<T>> cache;
  auto w_psi = [&](std::size_t t, std::size_t k) -> const std::vector<T>& {
    auto key = std::make_pair(t, k);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<T> v = apply_ladder_sum(psi[k], pert[t].power);
    const T s = scale_for_power<T>(pert[t].power) * pert[t].w;
    for (auto& c : v) c *= s;
    return cache.emplace(key, std::move(v)).first->second;
  };

  for (std::size_t k = 1; k <= order; ++k) {
    T ek(0);
    for (std::size_t t = 0; t < pert.size(); ++t) {
      const auto r = static_cast<std::size_t>(pert[t].order);
      if (r <= k) ek += w_psi(t, k - r)[static_cast<std::size_t>(n)];
    }
    e[k] = ek;
    if (k == order) break;
    for (std::size_t j = 0; j < nb; ++j) {
      if (j == static_cast<std::size_t>(n)) continue;
      T rhs(0);
      for (std::size_t t = 0; t < pert.size(); ++t) {
        const auto r = static_cast<std::size_t>(pert[t].order);
        if (r <= k) rhs -= w_psi(t, k - r)[j];
      }
      for (std::size_t q = 1; q <= k; ++q) rhs += e[q] * psi[k - q][j];
      psi[k][j] = rhs / T(static_cast<long>(j) - n);
    }
  }
  return e;
}

void check_args(int p, int n) {
  if (n < 0) throw ValidationError("rspt: state index must be nonnegative");
  if (p < 3 || p > 12) throw ValidationError("rspt: perturbation power must be in 3..12");
}

}  // namespace

Surd matrix_element(int p, int i, int j) {
  if (p < 0 || i < 0 || j < 0) throw ValidationError("matrix element: negative argument");
  Surd s;
  if (std::abs(i - j) > p || (p - std::abs(i - j)) % 2 != 0) {
    s.coeff = 0;
    return s;
  }
  std::vector<cpp_int> v(static_cast<std::size_t>(std::max(i, j) + p + 1), 0);
  v[static_cast<std::size_t>(j)] = 1;
  const cpp_int c = apply_ladder_sum(v, p)[static_cast<std::size_t>(i)];
  // <i|x^p|j> = c 2^{-p/2} sqrt(i!/j!)
  std::map<int, int> prime_exp;  // of i!/j!
  auto add_factor = [&](int v0, int sign) {
    for (int q = 2; q * q <= v0; ++q)
      while (v0 % q == 0) {
        prime_exp[q] += sign;
        v0 /= q;
      }
    if (v0 > 1) prime_exp[v0] += sign;
  };
  for (int k = std::min(i, j) + 1; k <= std::max(i, j); ++k) add_factor(k, i > j ? 1 : -1);
  if (p % 2) prime_exp[2] -= p;  // 2^{-p/2} = sqrt(2^{-p})
  Rational coeff(c);
  if (p % 2 == 0) coeff *= half_power(p / 2);
  cpp_int rad = 1;
  for (const auto& [q, e] : prime_exp) {
    const int half = e >= 0 ? e / 2 : -((-e + 1) / 2);  // floor(e/2)
    const int rem = e - 2 * half;                        // 0 or 1
    if (half > 0) coeff *= Rational(boost::multiprecision::pow(cpp_int(q), half));
    if (half < 0) coeff /= Rational(boost::multiprecision::pow(cpp_int(q), -half));
    if (rem) rad *= q;
  }
  s.coeff = coeff;
  s.radicand = rad;
  return s;
}

PowerSeries rs_coupling_series(int p, int n, std::size_t order, Arithmetic mode) {
  check_args(p, n);
  if (mode == Arithmetic::exact) {
    if (order > 12) throw ValidationError("rspt: exact mode supports order <= 12");
    auto e = rs_energies(Perturbation<Rational>{{1, p, Rational(1)}}, n, order);
    return PowerSeries::from_exact(std::move(e), "coupling", n);
  }
  PowerSeries s;
  s.variable = "coupling";
  s.state = n;
  s.coeffs = rs_energies(Perturbation<double>{{1, p, 1.0}}, n, order);
  return s;
}

PowerSeries rs_series(const Potential1D& v, int n, std::size_t order, Arithmetic mode) {
  if (n < 0) throw ValidationError("rspt: state index must be nonnegative");
  const double m = v.mass(), omega = v.omega();
  std::vector<Term<double>> w;
  for (const auto& [p, c] : v.anharmonic()) {
    if (p > 12) throw ValidationError("rspt: perturbation power must be <= 12");
    w.push_back({p - 2, p, c / (std::pow(m, 0.5 * p) * std::pow(omega, 0.5 * p + 1.0))});
  }
  const std::size_t gorder = 2 * order;
  PowerSeries s;
  s.variable = "hbar";
  s.state = n;
  if (mode == Arithmetic::exact) {
    if (order > 12) throw ValidationError("rspt: exact mode supports order <= 12");
    Perturbation<Rational> pert;
    for (const auto& t : w) pert.push_back({t.order, t.power, Rational(t.w)});
    auto e = rs_energies(pert, n, gorder);
    std::vector<Rational> c;
    for (std::size_t j = 0; j <= order; ++j) c.push_back(Rational(omega) * e[2 * j]);
    return PowerSeries::from_exact(std::move(c), "hbar", n);
  }
  auto e = rs_energies(w, n, gorder);
  for (std::size_t j = 0; j <= order; ++j) s.coeffs.push_back(omega * e[2 * j]);
  return s;
}

Rational wigner_third_order(int p, int n) {
  check_args(p, n);
  if (p % 2) throw ValidationError("rspt: odd powers are not available in exact arithmetic");
  const std::size_t nb = static_cast<std::size_t>(n + 2 * p + 1);
  std::vector<Rational> psi0(nb, 0);
  psi0[static_cast<std::size_t>(n)] = 1;
  const Rational s = half_power(p / 2);
  auto apply = [&](const std::vector<Rational>& v) {
    auto r = apply_ladder_sum(v, p);
    for (auto& c : r) c *= s;
    return r;
  };
  const auto w0 = apply(psi0);
  const Rational e1 = w0[static_cast<std::size_t>(n)];
  std::vector<Rational> psi1(nb, 0);
  for (std::size_t j = 0; j < nb; ++j)
    if (j != static_cast<std::size_t>(n)) psi1[j] = -w0[j] / Rational(static_cast<long>(j) - n);
  // (i|j) = i! delta_ij; energies are relative to (n|n) = n!
  const auto w1 = apply(psi1);
  Rational num = 0, norm = 0;
  cpp_int fact = 1;
  for (std::size_t j = 0; j < nb; ++j) {
    if (j > 0) fact *= j;
    num += psi1[j] * w1[j] * Rational(fact);
    norm += psi1[j] * psi1[j] * Rational(fact);
  }
  cpp_int nfact = 1;
  for (int k = 2; k <= n; ++k) nfact *= k;
  return (num - e1 * norm) / Rational(nfact);
}

}  // namespace semicl
