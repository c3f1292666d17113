#pragma once

#include <stdexcept>
#include <string>

namespace ufb {

/// Input data that violates a documented precondition (shape, finiteness, ranges).
class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scalar parameter outside its admissible range (eps <= 0, t >= 0 for the kernel, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A geometric request that leaves the computational domain.
class DomainError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// An iterative method failed to meet its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_change)
        : std::runtime_error(what), last_change_(last_change) {}
    double last_change() const noexcept { return last_change_; }

private:
    double last_change_;
};

/// A computation produced non-finite values. `last_valid` locates the last good state.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double last_valid)
        : std::runtime_error(what), last_valid_(last_valid) {}
    double last_valid() const noexcept { return last_valid_; }

private:
    double last_valid_;
};

}  // namespace ufb
