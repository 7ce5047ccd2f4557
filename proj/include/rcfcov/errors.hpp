#pragma once

#include <stdexcept>
#include <string>

namespace rcfcov {

// Matrix has a non-positive pivot: numerically singular or indefinite.
struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Factor diagonal collapsed: duplicated or degenerate samples.
struct RankDeficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative solver hit its iteration cap.
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scalar argument outside the mathematical domain of the function.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Incompatible or out-of-range matrix dimensions.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Invalid sweep configuration (CLI maps this to exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rcfcov
