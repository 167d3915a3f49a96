#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace semicl {

using Rational = boost::multiprecision::cpp_rational;

/// Truncated power series c_0 + c_1 z + ... + c_K z^K.
///
/// `exact` is either empty (float mode) or holds the same coefficients as
/// rationals, in which case `coeffs` are their rounded values.
struct PowerSeries {
  std::string variable = "hbar";
  int state = 0;
  std::vector<double> coeffs;
  std::vector<Rational> exact;

  bool is_exact() const { return !exact.empty(); }
  std::size_t size() const { return coeffs.size(); }
  double operator()(double z) const;

  static PowerSeries from_exact(std::vector<Rational> c, std::string variable = "hbar", int state = 0);
};

/// Plain text: '#' header lines with key=value, then one coefficient per line
/// (p/q for exact series, 17 significant digits otherwise).
void write_series(std::ostream& os, const PowerSeries& s);
PowerSeries read_series(std::istream& is);

}  // namespace semicl
