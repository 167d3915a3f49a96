#include "semicl/series.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "semicl/errors.hpp"

namespace semicl {

double PowerSeries::operator()(double z) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

PowerSeries PowerSeries::from_exact(std::vector<Rational> c, std::string variable, int state) {
  PowerSeries s;
  s.variable = std::move(variable);
  s.state = state;
  for (const auto& r : c) s.coeffs.push_back(r.convert_to<double>());
  s.exact = std::move(c);
  return s;
}

void write_series(std::ostream& os, const PowerSeries& s) {
  os << "# variable=" << s.variable << "\n# state=" << s.state << "\n# mode=" << (s.is_exact() ? "exact" : "float")
     << "\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s.is_exact())
      os << s.exact[k].str() << "\n";
    else
      os << fmt::format("{:.17g}\n", s.coeffs[k]);
  }
}

PowerSeries read_series(std::istream& is) {
  PowerSeries s;
  std::vector<Rational> exact;
  bool all_exact = true;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string kv;
      while (hs >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        if (key == "variable") s.variable = value;
        else if (key == "state") s.state = std::stoi(value);
      }
      continue;
    }
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok.empty()) continue;
    const bool rational = tok.find_first_of(".eE") == std::string::npos;
    if (rational) {
      try {
        Rational r(tok);
        exact.push_back(r);
        s.coeffs.push_back(r.convert_to<double>());
        continue;
      } catch (const std::exception&) {
        throw ValidationError("series: cannot parse coefficient '" + tok + "'");
      }
    }
    all_exact = false;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ValidationError("series: cannot parse coefficient '" + tok + "'");
    s.coeffs.push_back(v);
  }
  if (s.coeffs.empty()) throw ValidationError("series: no coefficients");
  if (all_exact) s.exact = std::move(exact);
  return s;
}

}  // namespace semicl
