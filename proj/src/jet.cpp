#include "semicl/jet.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace semicl {

Jet Jet::constant(double value, std::size_t degree) {
  Jet j(degree);
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(double x0, std::size_t degree) {
  Jet j(degree);
  j.c_[0] = x0;
  if (degree >= 1) j.c_[1] = 1.0;
  return j;
}

double Jet::evaluate(double h) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * h + *it;
  return acc;
}

Jet Jet::derivative() const {
  if (c_.size() == 1) return Jet(0);
  Jet d(degree() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d.c_[i - 1] = static_cast<double>(i) * c_[i];
  return d;
}

Jet Jet::integral(double constant) const {
  Jet r(degree() + 1);
  r.c_[0] = constant;
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i + 1] = c_[i] / static_cast<double>(i + 1);
  return r;
}

Jet Jet::shift_down(std::size_t k) const {
  assert(k <= degree());
  return Jet(std::vector<double>(c_.begin() + static_cast<std::ptrdiff_t>(k), c_.end()));
}

Jet Jet::truncated(std::size_t d) const {
  std::vector<double> c(d + 1, 0.0);
  std::copy_n(c_.begin(), std::min(c.size(), c_.size()), c.begin());
  return Jet(std::move(c));
}

Jet& Jet::operator+=(const Jet& other) {
  if (other.c_.size() < c_.size()) c_.resize(other.c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += other.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  if (other.c_.size() < c_.size()) c_.resize(other.c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= other.c_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator-(Jet a) { return a *= -1.0; }
Jet operator*(Jet a, double s) { return a *= s; }
Jet operator*(double s, Jet a) { return a *= s; }
Jet operator+(Jet a, double s) { return a += s; }
Jet operator-(Jet a, double s) { return a -= s; }

Jet operator*(const Jet& a, const Jet& b) {
  const std::size_t d = std::min(a.degree(), b.degree());
  Jet r(d);
  for (std::size_t k = 0; k <= d; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i <= k; ++i) s += a[i] * b[k - i];
    r[k] = s;
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  const std::size_t d = std::min(a.degree(), b.degree());
  Jet q(d);
  const double inv = 1.0 / b[0];
  for (std::size_t k = 0; k <= d; ++k) {
    double s = a[k];
    for (std::size_t i = 1; i <= k; ++i) s -= b[i] * q[k - i];
    q[k] = s * inv;
  }
  return q;
}

Jet sqrt(const Jet& a) {
  const std::size_t d = a.degree();
  Jet r(d);
  r[0] = std::sqrt(a[0]);
  const double inv = 1.0 / (2.0 * r[0]);
  for (std::size_t k = 1; k <= d; ++k) {
    double s = a[k];
    for (std::size_t i = 1; i < k; ++i) s -= r[i] * r[k - i];
    r[k] = s * inv;
  }
  return r;
}

Jet exp(const Jet& a) {
  // r' = a' r
  const std::size_t d = a.degree();
  Jet r(d);
  r[0] = std::exp(a[0]);
  for (std::size_t k = 1; k <= d; ++k) {
    double s = 0.0;
    for (std::size_t i = 1; i <= k; ++i) s += static_cast<double>(i) * a[i] * r[k - i];
    r[k] = s / static_cast<double>(k);
  }
  return r;
}

Jet log(const Jet& a) {
  // r' = a'/a
  const std::size_t d = a.degree();
  Jet r(d);
  r[0] = std::log(a[0]);
  for (std::size_t k = 1; k <= d; ++k) {
    double s = static_cast<double>(k) * a[k];
    for (std::size_t i = 1; i < k; ++i) s -= static_cast<double>(i) * r[i] * a[k - i];
    r[k] = s / (static_cast<double>(k) * a[0]);
  }
  return r;
}

Jet pow(const Jet& a, unsigned n) {
  Jet r = Jet::constant(1.0, a.degree());
  Jet base = a;
  while (n > 0) {
    if (n & 1U) r = r * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return r;
}

}  // namespace semicl
