#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "semicl/jet.hpp"
#include "semicl/polynomial.hpp"
#include "semicl/potentials.hpp"

namespace semicl {

/// Nodes x_0 < ... < x_N with 0 among them.
class Grid1D {
 public:
  explicit Grid1D(std::vector<double> nodes);

  /// 2n+1 equally spaced nodes on [-X, X].
  static Grid1D uniform(double half_width, std::size_t n_half);
  /// Spacing grows geometrically away from the origin by `ratio` per cell.
  static Grid1D stretched(double half_width, std::size_t n_half, double ratio);

  const std::vector<double>& nodes() const { return x_; }
  std::size_t size() const { return x_.size(); }
  double operator[](std::size_t i) const { return x_[i]; }
  std::size_t origin_index() const { return origin_; }
  /// Halves every cell.
  Grid1D refined() const;

 private:
  std::vector<double> x_;
  std::size_t origin_ = 0;
};

struct FundamentalSolutionOptions {
  /// Radius below which series about the origin replace pointwise formulas.
  /// Zero selects min(0.4 R, 1) with R the distance from 0 to the nearest
  /// complex zero of V(x)/x^2.
  double switch_radius = 0.0;
  std::size_t origin_degree = 96;
};

/// S0 with S0' = sign(x) sqrt(2 m V), S0(0) = 0.
class FundamentalSolution1D {
 public:
  FundamentalSolution1D(const Potential1D& v, Grid1D grid, FundamentalSolutionOptions opt = {});

  const Potential1D& potential() const { return v_; }
  const Grid1D& grid() const { return grid_; }
  double mass() const { return v_.mass(); }
  double omega() const { return v_.omega(); }

  const std::vector<double>& s0() const { return s0_; }
  const std::vector<double>& ds0() const { return ds0_; }
  const std::vector<double>& dds0() const { return dds0_; }

  double S0(double x) const;
  double dS0(double x) const;
  double ddS0(double x) const;

  /// Taylor jet of S0' about x0 (valid at x0 = 0 as well).
  Jet dS0_jet(double x0, std::size_t degree) const;
  /// G = S0'/(m x) expanded about the origin, G(0) = omega.
  const Jet& origin_G() const { return origin_g_; }

  /// Distance from x0 to the nearest complex singularity of S0'.
  double singularity_distance(double x0) const;
  double switch_radius() const { return r_switch_; }

  /// max |S0'^2/(2m) - V| over the nodes.
  double hj_residual() const;

 private:
  double integrate_ds0(double a, double b) const;

  Potential1D v_;
  Grid1D grid_;
  Polynomial g_;  // V / x^2
  std::vector<double> g_roots_re_, g_roots_im_;
  double r_switch_ = 0.0;
  Jet origin_g_;
  std::vector<double> s0_, ds0_, dds0_;
};

/// y(x) = x exp(int_0^x [m omega/S0'(u) - 1/u] du), so that dy/dt = omega y
/// along the flow dx/dt = S0'/m.
class SternbergMap1D {
 public:
  explicit SternbergMap1D(const FundamentalSolution1D& sol);

  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& dy() const { return dy_; }
  double operator()(double x) const;
  double derivative(double x) const;

 private:
  double integrand(double u) const;
  double log_ratio(double x) const;  // log(y/x)

  const FundamentalSolution1D* sol_;
  Jet origin_integrand_;
  std::vector<double> y_, dy_, log_ratio_;
};

/// Columns x, V, S0, dS0, ddS0, y.
void write_csv(std::ostream& os, const FundamentalSolution1D& sol, const SternbergMap1D& map);

/// Integrates f over [a, b] with 10-point Gauss-Legendre on panels no longer than `panel`.
template <typename F>
double composite_gauss(F&& f, double a, double b, double panel);

}  // namespace semicl

#include "semicl/detail/composite_gauss.hpp"
