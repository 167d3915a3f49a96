#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semicl/polynomial.hpp"

namespace semicl {

/// V(x) = 1/2 m omega^2 x^2 + sum_p c_p x^p, p >= 3.
///
/// `coercivity` is the constant lambda with A(x) >= -1/2 m lambda^2 x^2; the
/// quadratic lower bound on S0 uses nu = sqrt(omega^2 - lambda^2).
class Potential1D {
 public:
  Potential1D(double mass, double omega, std::map<int, double> anharmonic = {}, double coercivity = 0.0);

  static Potential1D harmonic(double mass, double omega) { return {mass, omega}; }
  static Potential1D quartic(double lambda) { return {1.0, 1.0, {{4, lambda}}}; }
  static Potential1D sectic(double lambda) { return {1.0, 1.0, {{6, lambda}}}; }

  double mass() const { return mass_; }
  double omega() const { return omega_; }
  double coercivity() const { return coercivity_; }
  double nu() const;
  const std::map<int, double>& anharmonic() const { return anharmonic_; }
  bool is_harmonic() const { return anharmonic_.empty(); }

  /// Full potential as a dense polynomial.
  const Polynomial& polynomial() const { return v_; }

  double eval(double x) const { return v_(x); }
  double eval_grad(double x) const { return dv_(x); }
  double eval_hess(double x) const { return ddv_(x); }

 private:
  double mass_;
  double omega_;
  double coercivity_;
  std::map<int, double> anharmonic_;
  Polynomial v_, dv_, ddv_;
};

/// Monomial coeff * prod_i x_i^{exponents[i]}.
struct Monomial {
  std::vector<int> exponents;
  double coeff = 0.0;
};

/// V(x) = 1/2 m sum_i omega_i^2 x_i^2 + A(x), A a polynomial with no terms of degree < 3.
class PotentialND {
 public:
  PotentialND(double mass, std::vector<double> omega, std::vector<Monomial> terms = {},
              std::vector<double> coercivity = {});

  static PotentialND from_1d(const Potential1D& v);

  int dimension() const { return static_cast<int>(omega_.size()); }
  double mass() const { return mass_; }
  const std::vector<double>& omega() const { return omega_; }
  const std::vector<double>& coercivity() const { return lambda_; }
  std::vector<double> nu() const;
  const std::vector<Monomial>& terms() const { return terms_; }

  double eval(const Eigen::VectorXd& x) const;
  double eval_anharmonic(const Eigen::VectorXd& x) const;
  Eigen::VectorXd eval_grad(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd eval_hess(const Eigen::VectorXd& x) const;

 private:
  double mass_;
  std::vector<double> omega_;
  std::vector<Monomial> terms_;
  std::vector<double> lambda_;
};

/// Superpotential W (W(0) = 0) of a one-dimensional supersymmetric oscillator.
///
/// The two scalar sectors carry V_plus = 1/2 W'^2 - (hbar/2) W'' and
/// V_minus = 1/2 W'^2 + (hbar/2) W''. exp(-W/hbar) is annihilated in the plus
/// sector when W grows at infinity.
class Superpotential {
 public:
  enum class Sector { plus, minus };

  explicit Superpotential(Polynomial w);

  const Polynomial& w() const { return w_; }
  /// The hbar-independent part 1/2 W'^2 as an admissible oscillator potential (m = 1).
  Potential1D bosonic_potential() const;
  /// Coefficient of hbar in the sector potential: -W''/2 (plus) or +W''/2 (minus).
  Polynomial hbar_term(Sector sector) const;
  /// Full sector potential at a given hbar.
  Polynomial sector_potential(Sector sector, double hbar) const;

 private:
  Polynomial w_;
};

/// Axis-aligned sampling box with `resolution` points per axis.
struct SamplingBox {
  std::vector<double> lower;
  std::vector<double> upper;
  int resolution = 41;

  static SamplingBox symmetric(int dimension, double half_width, int resolution = 41);
};

struct HypothesisCheck {
  std::string name;
  bool passed = true;
  /// Worst sampled point and the value of the checked quantity there.
  std::vector<double> worst_point;
  double worst_value = 0.0;
  std::string detail;
};

struct ValidationReport {
  SamplingBox box;
  std::vector<HypothesisCheck> checks;
  /// Minimum Hessian eigenvalue over the box.
  double min_hessian_eigenvalue = 0.0;

  bool passed() const;
  const HypothesisCheck& check(const std::string& name) const;
  std::string summary() const;
};

/// Samples nonnegativity, strict origin minimum, coercivity with the declared
/// constants, convexity and the leading-term sign over the box.
ValidationReport validate(const Potential1D& v, const SamplingBox& box);
ValidationReport validate(const PotentialND& v, const SamplingBox& box);

}  // namespace semicl
