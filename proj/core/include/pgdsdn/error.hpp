#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pgdsdn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid vertex ids, mismatched graphs, malformed shapes.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A random generator exhausted its retry budget.
class GenerationError : public Error {
public:
    GenerationError(const std::string& what, std::size_t attempts)
        : Error(what), attempts_(attempts) {}
    std::size_t attempts() const noexcept { return attempts_; }

private:
    std::size_t attempts_;
};

/// Singular systems, non-finite iterates, failed residual checks.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what, std::ptrdiff_t index = -1)
        : Error(what), index_(index) {}
    /// Iteration or pivot index the failure refers to, -1 when not applicable.
    std::ptrdiff_t index() const noexcept { return index_; }

private:
    std::ptrdiff_t index_;
};

/// A message or a filter exceeds the communication range of the network.
class RangeError : public Error {
public:
    RangeError(const std::string& what, std::size_t from, std::size_t to, std::size_t hops)
        : Error(what), from_(from), to_(to), hops_(hops) {}
    std::size_t from() const noexcept { return from_; }
    std::size_t to() const noexcept { return to_; }
    std::size_t hops() const noexcept { return hops_; }

private:
    std::size_t from_;
    std::size_t to_;
    std::size_t hops_;
};

/// Malformed input files; line is 1-based, 0 when unknown.
class IoError : public Error {
public:
    explicit IoError(const std::string& what, std::size_t line = 0) : Error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace pgdsdn
