#pragma once

#include <stdexcept>
#include <string>

namespace svarid {

// Malformed input or violated precondition. The CLI maps this to exit code 2.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure such as a near-singular system or an unstable process.
// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace svarid
