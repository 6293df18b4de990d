#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace blowup {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A user-supplied function returned a non-positive or non-finite value.
class InvalidFunctionError : public Error {
public:
    using Error::Error;
};

/// Quadrature or root-finding breakdown.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Keller-Osserman condition violated (tail integral diverges).
class KellerOssermanError : public Error {
public:
    using Error::Error;
};

/// Inconsistent configuration (declared and computed constants disagree, bad schema, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Positivity of the iterate could not be maintained.
class PositivityError : public Error {
public:
    using Error::Error;
};

/// Grid too coarse for the requested operation.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// A sub/super-solution bracket was violated during monotone iteration.
class BracketError : public Error {
public:
    using Error::Error;
};

/// An iteration failed to converge. Carries the last iterate or trace for diagnosis.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, std::vector<double> trace)
        : Error(what), trace_(std::move(trace)) {}

    [[nodiscard]] const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

}  // namespace blowup
