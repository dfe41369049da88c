#pragma once

#include <stdexcept>
#include <string>

namespace torusric {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violated operation precondition (bad parameters, wrong sizes).
struct PreconditionError : Error {
    using Error::Error;
};

// Evaluation outside the domain of a function.
struct DomainError : Error {
    using Error::Error;
};

// Independent computations disagree.
struct InconsistencyError : Error {
    using Error::Error;
};

// Iterative solver failed to converge.
struct ConvergenceError : Error {
    using Error::Error;
};

}  // namespace torusric
