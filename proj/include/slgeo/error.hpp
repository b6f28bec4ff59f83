#pragma once

#include <stdexcept>
#include <string>

namespace slgeo {

// Violated precondition: bad arguments, infeasible parameters, dimension
// mismatch.  Maps to CLI exit status 2.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation that was set up correctly but did not succeed: step-size
// underflow, Newton divergence, no bracket found.  Maps to exit status 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace slgeo
