#pragma once

#include <cstddef>
#include <vector>

#include "semicl/jet.hpp"

namespace semicl {

/// Dense univariate polynomial, coefficient i multiplies x^i.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  std::size_t degree() const { return c_.empty() ? 0 : c_.size() - 1; }
  const std::vector<double>& coefficients() const { return c_; }
  double coefficient(std::size_t i) const { return i < c_.size() ? c_[i] : 0.0; }

  double operator()(double x) const;
  Polynomial derivative() const;
  /// Taylor coefficients about x0, padded with zeros up to `degree`.
  Jet taylor(double x0, std::size_t degree) const;
  /// Coefficients of p(x)/x^k; the first k coefficients must vanish.
  Polynomial divided_by_power(std::size_t k) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator*=(double s);

 private:
  void trim();
  std::vector<double> c_;
};

Polynomial operator+(Polynomial a, const Polynomial& b);
Polynomial operator*(Polynomial a, double s);
Polynomial operator*(const Polynomial& a, const Polynomial& b);

}  // namespace semicl
