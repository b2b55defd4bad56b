#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace relaxir {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a precondition (dimension mismatch, zero reference vector, ...).
class ContractViolation : public Error {
  public:
    using Error::Error;
};

/// Base for failures of the numerical algorithms themselves.
class NumericalFailure : public Error {
  public:
    using Error::Error;
};

class SingularMatrixError : public NumericalFailure {
  public:
    using NumericalFailure::NumericalFailure;
};

class ConvergenceFailure : public NumericalFailure {
  public:
    using NumericalFailure::NumericalFailure;
};

/// A NaN or infinity reached a container that only holds finite values.
class NonFiniteValue : public NumericalFailure {
  public:
    using NumericalFailure::NumericalFailure;
};

class IoError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& detail() const noexcept { return detail_; }

  private:
    std::size_t line_;
    std::string detail_;
};

} // namespace relaxir
