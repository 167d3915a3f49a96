#include "semicl/polynomial.hpp"

#include <algorithm>
#include <cassert>

namespace semicl {

Polynomial::Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) { trim(); }

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  std::vector<double> d;
  for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(static_cast<double>(i) * c_[i]);
  return Polynomial(std::move(d));
}

Jet Polynomial::taylor(double x0, std::size_t degree) const {
  // Repeated synthetic division by (x - x0).
  std::vector<double> work = c_;
  Jet j(degree);
  for (std::size_t k = 0; k <= degree && !work.empty(); ++k) {
    const std::size_t n = work.size();
    for (std::size_t i = n - 1; i-- > 0;) work[i] += x0 * work[i + 1];
    j[k] = work[0];
    work.erase(work.begin());
  }
  return j;
}

Polynomial Polynomial::divided_by_power(std::size_t k) const {
  if (c_.size() <= k) return Polynomial();
  return Polynomial(std::vector<double>(c_.begin() + static_cast<std::ptrdiff_t>(k), c_.end()));
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.c_.size() > c_.size()) c_.resize(other.c_.size(), 0.0);
  for (std::size_t i = 0; i < other.c_.size(); ++i) c_[i] += other.c_[i];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  for (double& v : c_) v *= s;
  trim();
  return *this;
}

Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
Polynomial operator*(Polynomial a, double s) { return a *= s; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  const auto& x = a.coefficients();
  const auto& y = b.coefficients();
  if (x.empty() || y.empty()) return Polynomial();
  std::vector<double> r(x.size() + y.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) r[i + j] += x[i] * y[j];
  return Polynomial(std::move(r));
}

}  // namespace semicl
