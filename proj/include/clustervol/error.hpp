#pragma once

#include <stdexcept>
#include <string>

namespace clustervol {

// Bad input or configuration. The CLI maps these to exit code 2.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed file content; carries the 1-based line number when known.
class ParseError : public InvalidInput {
public:
    ParseError(const std::string& what, std::size_t line)
        : InvalidInput(what), line_(line) {}
    explicit ParseError(const std::string& what) : InvalidInput(what) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

// Numerical failures. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Regressor with zero variance; the caller decides the fallback.
class DegenerateRegressor : public NumericalError {
public:
    DegenerateRegressor() : NumericalError("regressor has zero variance") {}
};

class AllSeriesDegenerate : public NumericalError {
public:
    AllSeriesDegenerate()
        : NumericalError("no series admits a conditional least squares AR(1) fit") {}
};

class NonConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace clustervol
