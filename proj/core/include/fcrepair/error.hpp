#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fcrepair {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (trace files, XES, PNML).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    /// 1-based line of the offending input, 0 when unknown.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// An operation was called on an input that violates its contract
/// (e.g. repairing a net that is not free-choice).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A configured bound (state count, subset states, search budget) was hit.
class ResourceLimitError : public Error {
public:
    ResourceLimitError(const std::string& what, std::size_t bound)
        : Error(what + " (bound " + std::to_string(bound) + ")"), bound_(bound) {}

    std::size_t bound() const noexcept { return bound_; }

private:
    std::size_t bound_;
};

/// Iterative numerics did not reach the requested tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace fcrepair
