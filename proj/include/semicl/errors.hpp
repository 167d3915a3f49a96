#pragma once

#include <stdexcept>
#include <string>

namespace semicl {

/// Input violates a model hypothesis (bad potential, bad lattice problem, bad config).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver stopped without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical computation left its domain of validity (vanishing denominators,
/// truncated domains too small, lost regularity at the origin).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace semicl
