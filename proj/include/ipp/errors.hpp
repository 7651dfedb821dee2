#pragma once

#include <stdexcept>
#include <string>

namespace ipp {

// Malformed or out-of-contract arguments (dimensions, counts, non-finite values).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Arguments outside the mathematical domain of a function, e.g. sd <= 0.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// |log sd| above the guard threshold; raised instead of saturating.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

// Cholesky or determinant checks on covariance / intervention matrices.
class DecompositionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Statistical test inputs that leave the statistic undefined (zero variance).
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OptimizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File parsing failures; the message names the line and column.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ipp
