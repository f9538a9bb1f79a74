#pragma once

#include <stdexcept>
#include <string>

namespace sketchjl {

// Parameter outside its admissible range (epsilon/delta/r/...).
struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Hash-family sizes the field cannot host (n > p or m > p).
struct UnsupportedParametersError : InvalidParameterError {
    using InvalidParameterError::InvalidParameterError;
};

// Spread dimension d*alpha exceeds the hash field.
struct DomainOverflowError : InvalidParameterError {
    using InvalidParameterError::InvalidParameterError;
};

struct InvalidSeedError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Hash evaluation outside [0, n).
struct OutOfDomainError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// sign evaluation on a family whose range is not {0,1}.
struct WrongRangeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Vector length / index does not match the transform.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Request would materialize more than the module's size guard allows.
struct CapacityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Precondition violation on diagnostic inputs (e.g. ||x||_inf > c).
struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what, std::size_t line_no = 0)
        : std::runtime_error(what), line(line_no) {}
    std::size_t line;
};

}  // namespace sketchjl
