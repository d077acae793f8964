#pragma once

#include <stdexcept>
#include <string>

namespace catlab {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Two points or measures that do not live in the same space.
struct IncompatibleSpaceError : Error {
  using Error::Error;
};

// Input outside the diameter/radius regime a theorem requires.
struct RegimeError : Error {
  using Error::Error;
};

// Triangle inequality or perimeter condition violated.
struct InfeasibleError : Error {
  using Error::Error;
};

// Angle at a degenerate configuration.
struct UndefinedAngleError : Error {
  using Error::Error;
};

// Iterative solver failed to reach its tolerance.
struct SolverError : Error {
  using Error::Error;
};

}  // namespace catlab
