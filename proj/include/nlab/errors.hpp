#pragma once

#include <stdexcept>
#include <string>

namespace nlab {

/// Base class for all failures this library raises on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A precondition stated by the operation contract was violated.
struct PreconditionError : Error {
    using Error::Error;
};

/// A requested point or ball leaves the oracle's declared domain.
struct DomainError : PreconditionError {
    using PreconditionError::PreconditionError;
};

/// Frequency gate: beta(p, r/2) <= 10, caller should take the naive path.
struct LowFrequencyError : PreconditionError {
    using PreconditionError::PreconditionError;
};

/// Integrand vanished to working precision; the quantity is undefined.
struct QuadratureFloorError : Error {
    using Error::Error;
};

/// A configured work budget was exceeded (partial results may exist).
struct BudgetError : Error {
    using Error::Error;
};

}  // namespace nlab
