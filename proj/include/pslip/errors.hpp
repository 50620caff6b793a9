#pragma once

#include <stdexcept>
#include <string>

namespace pslip {

// Base class; `code()` maps onto the CLI exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual int code() const noexcept { return 2; }
};

class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    [[nodiscard]] const std::string& field() const noexcept { return field_; }
    [[nodiscard]] int code() const noexcept override { return 1; }

private:
    std::string field_;
};

// Argument outside the mathematical domain of a routine.
class DomainError : public Error {
public:
    using Error::Error;
};

// Evaluation landed on a branch cut without a side prescription.
class BranchError : public Error {
public:
    using Error::Error;
};

class PoleError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

class TruncationError : public Error {
public:
    TruncationError(const std::string& what, int n_max)
        : Error(what + " (n_max=" + std::to_string(n_max) + ", increase n_max)"), n_max_(n_max) {}
    [[nodiscard]] int n_max() const noexcept { return n_max_; }

private:
    int n_max_;
};

class BracketError : public Error {
public:
    using Error::Error;
};

// Momentum left the analyticity strip of the Fourier series.
class StripExitError : public Error {
public:
    using Error::Error;
};

}  // namespace pslip
