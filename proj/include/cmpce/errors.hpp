#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmpce {

/// Base of every error raised by the library.
///
/// `numerical()` separates failures of the numerics (non-convergence,
/// degenerate inputs to a formula) from malformed input; the CLI maps the
/// former to exit code 2 and the latter to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual bool numerical() const noexcept { return false; }
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class InvalidMapError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class IngestionError : public Error {
public:
    using Error::Error;
};

class ConsistencyError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
    bool numerical() const noexcept override { return true; }
};

class UndefinedIndicesError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A model threw while being evaluated at a quadrature node or sample.
class ModelEvaluationError : public NumericalError {
public:
    ModelEvaluationError(std::size_t index, const std::string& what)
        : NumericalError("model evaluation failed at point " + std::to_string(index) + ": " + what),
          index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace cmpce
