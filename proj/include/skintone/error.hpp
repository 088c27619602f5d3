#pragma once

#include <stdexcept>
#include <string>

namespace skintone {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file (cascade XML, manifest, SH json, landmarks, images).
class ParseError : public Error {
public:
    using Error::Error;
};

// Well-formed input the library deliberately does not handle.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Input that is structurally fine but unusable (empty mask, face too small, ...).
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace skintone
