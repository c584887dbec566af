#pragma once

#include <stdexcept>
#include <string>

namespace flocsim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model or scenario parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A state or argument outside the domain where a map is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An analysis was called on input that violates its precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Numerical kernel failure (no convergence, broken invariant).
class NumericError : public Error {
public:
    using Error::Error;
};

/// find_root was given an interval without a sign change.
class BracketError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Adaptive integration stopped before reaching the end of the span.
class IntegrationError : public NumericError {
public:
    IntegrationError(const std::string& what, double last_time)
        : NumericError(what + " (last valid t = " + std::to_string(last_time) + ")"),
          last_time_(last_time) {}

    double last_time() const noexcept { return last_time_; }

private:
    double last_time_;
};

} // namespace flocsim
