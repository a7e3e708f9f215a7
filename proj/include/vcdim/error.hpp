#pragma once

#include <stdexcept>
#include <string>

namespace vcdim {

/// Raised for invalid inputs or failed preconditions in any module.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when reading or writing a file fails.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vcdim
