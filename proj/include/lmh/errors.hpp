#pragma once

#include <stdexcept>
#include <string>

namespace lmh {

// Bad input: malformed files, out-of-range indices, violated preconditions.
class InvalidInput : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown: singular factorizations, non-convergence, failed checks.
class NumericalFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace lmh
