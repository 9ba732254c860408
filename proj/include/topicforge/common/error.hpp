#pragma once

#include <stdexcept>
#include <string>

namespace topicforge {

/// Base for every error raised by the library. Callers that only care about
/// "the pipeline refused this input" catch this type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: missing file, missing column, out-of-range value.
class InputError : public Error {
public:
    using Error::Error;
};

/// Numerical failure during a computation (divergence, non-finite loss).
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace topicforge
