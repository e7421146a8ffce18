#pragma once

#include <stdexcept>
#include <string>

namespace sb {

/// Base of every error raised by the library. The CLI maps subclasses onto
/// process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameter outside its domain (alpha not in (0,2], non-positive scale, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A quadrature or root finder did not reach the configured tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Fewer samples than an estimator needs.
class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Data that carry no spread (constant sequence, zero interquartile range).
class DegenerateData : public Error {
public:
    using Error::Error;
};

class SingularCovariance : public Error {
public:
    using Error::Error;
};

/// An EM component collapsed below 1/N weight.
class DegenerateComponent : public Error {
public:
    using Error::Error;
};

/// Spectral fit could not be solved on the requested number of directions.
class SpectralFitError : public Error {
public:
    using Error::Error;
};

/// Tabulated density window/resolution too coarse for the requested accuracy.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// Density grid with fewer than two distinct values.
class FlatDensity : public Error {
public:
    using Error::Error;
};

class FrameMismatch : public Error {
public:
    using Error::Error;
};

/// m(empty) = 1: no pignistic decision is possible.
class TotalConflict : public Error {
public:
    using Error::Error;
};

/// Moebius inversion produced a clearly negative mass.
class InvalidCommonality : public Error {
public:
    using Error::Error;
};

/// Model cdf returned a value outside [0,1] or a NaN.
class NonFiniteCdf : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Raised by an estimator inside the pipeline; carries the class label.
class EstimatorFailure : public Error {
public:
    EstimatorFailure(std::string label, const std::string& what)
        : Error(label + ": " + what), label_(std::move(label)) {}
    const std::string& label() const noexcept { return label_; }

private:
    std::string label_;
};

}  // namespace sb
