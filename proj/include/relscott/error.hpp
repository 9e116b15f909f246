#pragma once

#include <stdexcept>
#include <string>

namespace relscott {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition or physical constraint on the inputs does not hold.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// An iterative or adaptive numerical procedure failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

} // namespace relscott
