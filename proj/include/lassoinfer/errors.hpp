#pragma once

#include <stdexcept>

namespace lassoinfer {

// Bad caller input: dimension mismatch, invalid index set, parse failure.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure: solver exceeded its iteration budget, degenerate fit.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rank-deficient least-squares system.
struct SingularError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed configuration file or option combination.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lassoinfer
