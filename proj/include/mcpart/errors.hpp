#pragma once

#include <stdexcept>
#include <string>

namespace mcpart {

// Base for all library errors. Precondition violations use
// std::invalid_argument directly.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Problems with input content: malformed files, bad labels, degenerate
// training sets.
struct DataError : Error {
    using Error::Error;
};

// Numerical failures: construction budgets exhausted, undefined decision
// values, singular systems without a fallback.
struct NumericError : Error {
    using Error::Error;
};

}  // namespace mcpart
