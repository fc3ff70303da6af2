#pragma once

#include <stdexcept>
#include <string>

namespace driftev {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments, unknown catalog ids, bad configuration.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed (non-convergence, overflow guard, breakdown).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Inverse iteration ran out of iterations.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double last_quotient, double gap_estimate)
        : NumericalError(what), last_quotient_(last_quotient), gap_estimate_(gap_estimate) {}

    double last_quotient() const noexcept { return last_quotient_; }
    double gap_estimate() const noexcept { return gap_estimate_; }

private:
    double last_quotient_;
    double gap_estimate_;
};

/// Weighted pencil assembly refused because the weights would underflow.
class OverflowGuard : public NumericalError {
public:
    OverflowGuard(const std::string& what, double exponent_span)
        : NumericalError(what), exponent_span_(exponent_span) {}

    double exponent_span() const noexcept { return exponent_span_; }

private:
    double exponent_span_;
};

}  // namespace driftev
