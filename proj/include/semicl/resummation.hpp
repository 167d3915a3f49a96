#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "semicl/series.hpp"

namespace semicl {

/// p(z)/q(z) with q(0) = 1.
struct PadeApproximant {
  std::vector<double> p, q;
  int requested_l = 0, requested_m = 0;
  /// Degrees after removing rank deficiency; differ from the request when reduced.
  int l = 0, m = 0;
  bool reduced() const { return l != requested_l || m != requested_m; }

  double operator()(double z) const;
  std::vector<std::complex<double>> poles() const;
};

/// [L/M] Pade approximant of c_0 + c_1 z + ... by the SVD construction of
/// Gonnet, Guttel and Trefethen: singular values of the M x (M+1) Toeplitz block
/// below tol * ||c|| lower (L, M) until the system has full rank.
PadeApproximant pade(const std::vector<double>& c, int l, int m, double tol = 1e-14);

struct ResummationOptions {
  /// Poles of the Borel-plane approximant closer than this angle to the
  /// positive real axis, and inside the truncated integration range, mark the
  /// result unreliable.
  double pole_angle_deg = 5.0;
  double quad_tol = 1e-13;
};

struct ResummationReport {
  std::string method;  // "pade" or "borel-pade"
  int l = 0, m = 0;
  int effective_l = 0, effective_m = 0;
  double point = 0.0;
  double value = 0.0;
  /// Laplace variable s where the integral was truncated (Borel-Pade only).
  double cutoff = 0.0;
  /// Poles of the approximant (Borel plane for Borel-Pade).
  std::vector<std::complex<double>> poles;
  /// Smallest |arg| of the poles (degrees); 180 when there are none.
  double min_pole_angle_deg = 180.0;
  bool reliable = true;
  std::string note;
};

ResummationReport pade_sum(const PowerSeries& s, int l, int m, double z);

/// Borel transform c_k / k!, [L/M] Pade of the transform, then
/// int_0^inf e^{-s} B(z s) ds on doubling panels of adaptive Gauss-Kronrod.
ResummationReport borel_pade(const PowerSeries& s, int l, int m, double z, ResummationOptions opt = {});

/// One header line and one row per report.
void write_report_csv(std::ostream& os, const std::vector<ResummationReport>& reports);

}  // namespace semicl
