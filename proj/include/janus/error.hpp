#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace janus {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised for invalid parameters or configuration values. `field` names the
// offending config path (e.g. "correlation", "mint_policy.mint_fee").
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class DimensionError : public Error {
public:
    DimensionError(std::size_t expected, std::size_t actual)
        : Error("dimension mismatch: expected length " + std::to_string(expected) +
                ", got " + std::to_string(actual)),
          expected_(expected), actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

// Numerical breakdown: non-finite iterates, failed factorizations and the like.
class NumericalError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public NumericalError {
public:
    DivergenceError(std::size_t iteration, double last_residual)
        : NumericalError("fixed-point iteration diverged at iteration " +
                         std::to_string(iteration) + " (last residual " +
                         std::to_string(last_residual) + ")"),
          iteration_(iteration), last_residual_(last_residual) {}

    std::size_t iteration() const noexcept { return iteration_; }
    double last_residual() const noexcept { return last_residual_; }

private:
    std::size_t iteration_;
    double last_residual_;
};

}  // namespace janus
