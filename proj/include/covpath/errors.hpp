#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace covpath {

// Base for every failure the library reports.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failures. The CLI maps these to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Bad user input. The CLI maps these to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularUpdate : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class Infeasible : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoFeasibleRoot : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NumericalBreakdown : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StepCollapse : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class LineSearchFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class MaxItersExceeded : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Carries the iterate with the smallest residual seen before the cap hit.
class MaxSweepsExceeded : public NumericalError {
public:
    MaxSweepsExceeded(const std::string& what, Eigen::MatrixXd best, double best_residual)
        : NumericalError(what), best_(std::move(best)), best_residual_(best_residual) {}

    const Eigen::MatrixXd& best() const noexcept { return best_; }
    double best_residual() const noexcept { return best_residual_; }

private:
    Eigen::MatrixXd best_;
    double best_residual_;
};

class DegenerateInstance : public InputError {
public:
    using InputError::InputError;
};

class ParseError : public InputError {
public:
    using InputError::InputError;
};

class AsymmetricInput : public InputError {
public:
    using InputError::InputError;
};

class NonPositiveDiagonal : public InputError {
public:
    using InputError::InputError;
};

}  // namespace covpath
