#pragma once

#include <stdexcept>
#include <string>

namespace aerq {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or unusable input: bad dimensions, non-finite values,
// rank-deficient design, unparsable files.
class InputError : public Error {
public:
    using Error::Error;
};

// A numerical routine could not complete (iteration limit, singular
// system, an LP status that the model rules out).
class NumericalError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IterationLimitError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// The extreme fit does not have a unique optimal base of size p+1.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

} // namespace aerq
