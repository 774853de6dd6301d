// Error taxonomy shared by all seisid modules.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seisid {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A finite-value or domain precondition was violated.
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

// Dimensions or lengths do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

// A computation produced a non-finite intermediate.
class NumericError : public Error {
public:
    using Error::Error;
};

// Malformed text input; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Hour indices out of sequence.
class OrderingError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Fit denominator is zero (constant reference sequence).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

class RankDeficiencyError : public Error {
public:
    using Error::Error;
};

class EmptyDatasetError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace seisid
