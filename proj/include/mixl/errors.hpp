#pragma once

#include <stdexcept>
#include <string>

namespace mixl {

// Bad model specification or incompatible inputs (wrong spec hash, bad flags).
struct SpecError : std::runtime_error {
  explicit SpecError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent data files.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (non-PSD covariance, domain errors in metrics).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mixl
