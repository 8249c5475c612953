#pragma once

#include <stdexcept>
#include <string>

namespace cvkernel {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Argument outside the supported integer range (factorial guards etc.).
struct RangeError : Error {
    using Error::Error;
};

/// Mathematically invalid input (divergent integral, non-finite value, ...).
struct DomainError : Error {
    using Error::Error;
};

/// State vector that should be normalized is not.
struct NormalizationError : Error {
    using Error::Error;
};

/// Truncation produced the zero state.
struct DegenerateStateError : Error {
    using Error::Error;
};

/// Requested truncation cannot capture the required norm fraction.
struct TruncationError : Error {
    using Error::Error;
};

/// A seed parameter makes the underlying Gaussian integral diverge.
struct DivergentIntegralError : DomainError {
    using DomainError::DomainError;
};

/// Evaluation would exceed the configured term budget.
struct BudgetError : Error {
    using Error::Error;
};

/// Mismatched vector/matrix dimensions.
struct ShapeError : Error {
    using Error::Error;
};

/// Numerical result failed its own accuracy estimate.
struct AccuracyError : Error {
    using Error::Error;
};

/// A stated premise of a bound does not hold for the given inputs.
struct PremiseError : Error {
    using Error::Error;
};

/// Training data with only one class.
struct DegenerateLabelsError : Error {
    using Error::Error;
};

/// File could not be read or written.
struct IoError : Error {
    using Error::Error;
};

} // namespace cvkernel
