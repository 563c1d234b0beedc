#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lsc {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed arguments: bad dimensions, non-finite data, out-of-range config.
struct InvalidInputError : Error {
  using Error::Error;
};

// Structurally valid input on which the operation is not defined,
// e.g. a rank-deficient design matrix handed to lad_solve.
struct DegenerateInputError : Error {
  using Error::Error;
};

// The feasible set of a constrained program is empty.
struct InfeasibleError : Error {
  using Error::Error;
};

// The computation ran but its result carries no usable content,
// e.g. every column of the input was classified as an outlier.
struct DegenerateResultError : Error {
  using Error::Error;
};

// A column sketch missed every inlier; retry with a fresh seed.
struct ResampleNeededError : Error {
  ResampleNeededError(const std::string& what, std::uint64_t seed_used)
      : Error(what), seed(seed_used) {}
  std::uint64_t seed;
};

// Parameter regime the implemented bounds do not cover (e.g. basis rank < 2).
struct UnsupportedRegimeError : Error {
  using Error::Error;
};

}  // namespace lsc
