#pragma once

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

namespace semicl {

template <typename F>
double composite_gauss(F&& f, double a, double b, double panel) {
  if (a == b) return 0.0;
  if (b < a) return -composite_gauss(f, b, a, panel);
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / panel)));
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    s += boost::math::quadrature::gauss<double, 10>::integrate(f, a + i * h, a + (i + 1) * h);
  return s;
}

}  // namespace semicl
