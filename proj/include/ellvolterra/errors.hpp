#pragma once

#include <stdexcept>
#include <string>

namespace ellvolterra {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t expected, std::size_t got)
        : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(got)),
          expected_(expected), got_(got) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t got() const noexcept { return got_; }

private:
    std::size_t expected_;
    std::size_t got_;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A point is not on the probability simplex, even after the renormalization allowance.
class SimplexError : public Error {
public:
    using Error::Error;
};

class SizeGuardExceeded : public Error {
public:
    using Error::Error;
};

class EntryNotFractional : public Error {
public:
    using Error::Error;
};

/// A cycle specification is malformed or cannot be realized inside the requested class.
class SpecError : public Error {
public:
    using Error::Error;
};

class ParamRangeError : public Error {
public:
    using Error::Error;
};

} // namespace ellvolterra
