#pragma once

#include <stdexcept>
#include <string>

namespace mhcap {

// Iterative scheme failed to reach its tolerance (quadrature, series tail, ...).
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_tolerance(achieved) {}
  double achieved_tolerance;
};

// A sign change could not be established for a root / fixed-point solve.
struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The collision formula's sample space is exhausted (contending_hops * x >= 1).
struct SaturationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every Monte Carlo trial was censored at some grid point.
struct AllCensoredError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Routing walk has no forward candidate.
struct DeadEndError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mhcap
