#pragma once

#include <stdexcept>
#include <string>

namespace kdq {

/// Invalid user-supplied configuration or command-line input.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numerical procedure could not produce a valid result (infeasible
/// weight system, non-partitionable measurement set, singular confusion
/// matrix, enumeration overflow, ...).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An infeasible linear system, annotated with the least-squares residual
/// that ruled it out.
struct InfeasibleError : NumericError {
  InfeasibleError(const std::string& what, double residual_value)
      : NumericError(what), residual(residual_value) {}
  double residual;
};

/// File input/output failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kdq
