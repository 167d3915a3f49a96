#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace semicl {

/// Truncated Taylor series c_0 + c_1 h + ... + c_D h^D about some expansion point.
///
/// Arithmetic between jets of different degree truncates to the smaller degree.
/// Every transport-equation solve in this library is carried out on jets, which
/// gives exact derivatives of the profiles (no finite differencing) and lets the
/// regularity condition at the origin be imposed on the series itself.
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::size_t degree) : c_(degree + 1, 0.0) {}
  Jet(std::vector<double> coefficients) : c_(std::move(coefficients)) {}

  static Jet constant(double value, std::size_t degree);
  /// The identity map expanded about x0: x0 + h.
  static Jet variable(double x0, std::size_t degree);

  std::size_t degree() const { return c_.size() - 1; }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }
  std::span<const double> coefficients() const { return c_; }
  double value() const { return c_[0]; }

  double evaluate(double h) const;

  Jet derivative() const;
  /// Antiderivative with the given constant term; degree grows by one.
  Jet integral(double constant = 0.0) const;
  /// Divides by h^k, dropping the first k coefficients (caller guarantees they vanish).
  Jet shift_down(std::size_t k) const;
  Jet truncated(std::size_t degree) const;

  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator+=(double s) { c_[0] += s; return *this; }
  Jet& operator-=(double s) { c_[0] -= s; return *this; }
  Jet& operator*=(double s);

 private:
  std::vector<double> c_{0.0};
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator-(Jet a);
Jet operator*(Jet a, double s);
Jet operator*(double s, Jet a);
Jet operator+(Jet a, double s);
Jet operator-(Jet a, double s);
Jet operator*(const Jet& a, const Jet& b);
/// Requires b[0] != 0.
Jet operator/(const Jet& a, const Jet& b);

Jet sqrt(const Jet& a);  // requires a[0] > 0
Jet exp(const Jet& a);
Jet log(const Jet& a);   // requires a[0] > 0
Jet pow(const Jet& a, unsigned n);

}  // namespace semicl
