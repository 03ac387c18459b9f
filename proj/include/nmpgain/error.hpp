#pragma once

#include <stdexcept>
#include <string>

namespace nmpgain {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on the input was violated (unstable where stability is
// required, non-proper where properness is required, zero divisor, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// A root sits on the imaginary axis (within the axis tolerance), where the
// quantity being computed is undefined.
class DegenerateError : public Error {
public:
    using Error::Error;
};

} // namespace nmpgain
