#pragma once

#include <stdexcept>
#include <string>

namespace phasekey {

// Bad arguments: out-of-range parameters, wrong dimensions, non-physical
// matrices.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

// The postselection keeps (numerically) nothing of the state.
class DegeneratePostselection : public std::runtime_error {
 public:
  explicit DegeneratePostselection(const std::string& what) : std::runtime_error(what) {}
};

// No attack state satisfies the observed constraints.
class Infeasible : public std::runtime_error {
 public:
  explicit Infeasible(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace phasekey
