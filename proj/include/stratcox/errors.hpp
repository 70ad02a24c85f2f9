#pragma once

#include <stdexcept>
#include <string>

namespace stratcox {

// Base class for everything thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: malformed files, invalid configuration, contract violations.
struct validation_error : error {
    using error::error;
};

// Numerical failure: overflow, loss of monotonicity, corrupted accumulators.
struct numeric_error : error {
    using error::error;
};

// Invariant breach that should be impossible with valid inputs.
struct internal_error : error {
    using error::error;
};

}  // namespace stratcox
