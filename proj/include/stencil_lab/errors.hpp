#pragma once

#include <stdexcept>
#include <string>

namespace stencil_lab {

/// Parse failure in an expression or config file. `offset` is the byte
/// position in the source text (0-based); config errors carry a line number
/// in the message instead.
class ParseError : public std::runtime_error {
public:
  ParseError(std::string message, std::size_t offset)
      : std::runtime_error(std::move(message)), offset(offset) {}
  std::size_t offset;
};

/// Domain error while evaluating an expression (division by zero, sqrt of a
/// negative number, overflowing power). Carries the offending sub-expression
/// and the evaluation point, already formatted into the message.
class EvalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The requested symbolic derivative does not exist within the fixed
/// function set (general a^b with both sides non-constant).
class DifferentiationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A structural precondition on inputs failed (bad stencil, box not
/// divisible by h, inconsistent dimensions, out-of-range constant, ...).
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A mathematical precondition checked at runtime failed (chi_lambda < 0 on
/// the grid, c below c0, time-dependent coefficients in an elliptic solve).
class PreconditionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The state left the representable range during time stepping.
class NumericalError : public std::runtime_error {
public:
  NumericalError(std::string message, long step)
      : std::runtime_error(std::move(message)), step(step) {}
  long step;
};

} // namespace stencil_lab
