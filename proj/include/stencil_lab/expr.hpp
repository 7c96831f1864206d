#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stencil_lab {

/// Built-in functions of the coefficient language. `pos(y) = max(y, 0)`,
/// `neg(y) = max(-y, 0)`. `sel(c, a, b)` is the internal selector used by
/// symbolic derivatives of the nonsmooth primitives: a if c > 0, else b
/// (ties take the else branch, so d/dy pos(y) at 0 evaluates to 0).
/// Coefficients written by hand never need `sel`, but it parses and renders
/// like any other function so derivative output round-trips.
enum class FuncKind { sin, cos, exp, sqrt, abs, min, max, pos, neg, sel };

/// Immutable scalar expression in the variables t, x1, .., xd.
///
/// Grammar: numbers, variables, + - * / ^ with the usual precedence
/// (^ binds tighter than unary minus and associates right), parentheses and
/// function calls. Only this fixed function set exists; unknown identifiers
/// are parse errors, which keeps symbolic differentiation closed.
class Expression {
public:
  /// Literal zero.
  Expression();

  /// Parses `source`. Throws ParseError with a byte offset and the token
  /// class that was expected.
  static Expression parse(std::string_view source);

  static Expression number(double value);
  /// Variable by index: 0 is t, i >= 1 is x_i.
  static Expression variable(int index);
  static Expression call(FuncKind f, std::vector<Expression> args);

  /// Evaluates at (t, x). Throws EvalError on domain violations
  /// (division by zero, sqrt of a negative argument, non-finite power)
  /// rather than propagating NaN.
  double evaluate(double t, std::span<const double> x) const;

  /// Exact symbolic derivative. var_index 0 differentiates in t, i >= 1 in
  /// x_i. The nonsmooth primitives differentiate by case split via `sel`
  /// (valid off their measure-zero tie sets). a^b requires a constant
  /// exponent or a constant positive base; otherwise DifferentiationError.
  Expression differentiate(int var_index) const;

  /// Substitutes x_i <- factor * x_i for every spatial variable (t is kept).
  Expression scale_space(double factor) const;

  /// Renders to text that parses back to an equivalent expression.
  std::string render() const;

  bool structurally_equal(const Expression& other) const;

  /// Largest spatial index used (0 when the expression only uses t or
  /// constants). Callers check it against the problem dimension.
  int max_space_index() const;
  bool uses_time() const;
  /// True when abs/min/max/pos/neg/sel occur anywhere in the tree.
  bool has_nonsmooth() const;
  bool is_zero_literal() const;

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);
  Expression pow(const Expression& exponent) const;

  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  explicit Expression(NodePtr n) : node_(std::move(n)) {}
  const NodePtr& node() const { return node_; }

private:
  NodePtr node_;
};

} // namespace stencil_lab
