#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace relucert {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes of two operands do not line up. Message names both shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Row/column/sample index outside its valid range.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Non-finite entries, out-of-range labels, empty inputs.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Iterative solver ran out of iterations. Carries the last iterate and
/// the residual at the point of failure.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, std::vector<double> last_iterate, double residual)
        : Error(msg), last_iterate_(std::move(last_iterate)), residual_(residual) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
    double residual() const noexcept { return residual_; }

private:
    std::vector<double> last_iterate_;
    double residual_;
};

/// Operation defined only for a restricted network shape (e.g. the
/// decision boundary certificate needs exactly one hidden layer).
class UnsupportedArchitectureError : public Error {
public:
    using Error::Error;
};

/// Base class for file I/O failures.
class IoError : public Error {
public:
    using Error::Error;
};

class BadMagicError : public IoError {
public:
    using IoError::IoError;
};

class VersionError : public IoError {
public:
    using IoError::IoError;
};

class TruncatedFileError : public IoError {
public:
    TruncatedFileError(const std::string& msg, std::size_t expected_bytes, std::size_t found_bytes)
        : IoError(msg), expected_bytes_(expected_bytes), found_bytes_(found_bytes) {}

    std::size_t expected_bytes() const noexcept { return expected_bytes_; }
    std::size_t found_bytes() const noexcept { return found_bytes_; }

private:
    std::size_t expected_bytes_;
    std::size_t found_bytes_;
};

class WidthMismatchError : public IoError {
public:
    using IoError::IoError;
};

} // namespace relucert
