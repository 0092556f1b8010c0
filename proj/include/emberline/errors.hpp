#pragma once

#include <stdexcept>
#include <string>

namespace emberline {

// Raised for missing/unreadable/malformed input files. CLI maps this to exit 2.
struct FileError : std::runtime_error {
  explicit FileError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a computation produces non-finite results (e.g. diverging
// calibration loss). CLI maps this to exit 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace emberline
