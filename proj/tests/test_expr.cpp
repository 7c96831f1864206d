#include "doctest.h"

#include <cmath>
#include <vector>

#include "stencil_lab/errors.hpp"
#include "stencil_lab/expr.hpp"
#include "test_helpers.hpp"

using namespace stencil_lab;

namespace {

double eval1(const Expression& e, double x, double t = 0.0) {
  std::vector<double> xs = {x};
  return e.evaluate(t, xs);
}

} // namespace

TEST_CASE("expression parsing and evaluation") {
  CHECK(eval1(Expression::parse("1/(1+x1^2)"), 2.0) == doctest::Approx(0.2));
  CHECK(eval1(Expression::parse("2+3*4^2"), 0.0) == 50.0);
  CHECK(eval1(Expression::parse("-x1^2"), 3.0) == -9.0);
  CHECK(eval1(Expression::parse("2^-3"), 0.0) == 0.125);
  CHECK(eval1(Expression::parse("max(min(x1,1),-1)"), 2.5) == 1.0);
  CHECK(eval1(Expression::parse("max(min(x1,1),-1)"), -2.5) == -1.0);
  CHECK(eval1(Expression::parse("max(min(x1,1),-1)"), 0.25) == 0.25);
  CHECK(eval1(Expression::parse("abs(0-3)"), 0.0) == 3.0);
  CHECK(eval1(Expression::parse("pos(0-2)"), 0.0) == 0.0);
  CHECK(eval1(Expression::parse("neg(0-2)"), 0.0) == 2.0);
  CHECK(eval1(Expression::parse("sel(1,5,7)"), 0.0) == 5.0);
  CHECK(eval1(Expression::parse("sel(0,5,7)"), 0.0) == 7.0);
  CHECK(eval1(Expression::parse("2*t + x1"), 1.0, 3.0) == 7.0);
  CHECK(eval1(Expression::parse("exp(0)+sqrt(4)"), 0.0) == 3.0);
  CHECK(eval1(Expression::parse("sin(0)+cos(0)"), 0.0) == 1.0);
}

TEST_CASE("expression observers") {
  const Expression e = Expression::parse("2*t + x2");
  CHECK(e.uses_time());
  CHECK(e.max_space_index() == 2);
  CHECK_FALSE(e.has_nonsmooth());
  CHECK(Expression::parse("abs(x1)").has_nonsmooth());
  CHECK(Expression().is_zero_literal());
  CHECK(Expression::parse("0").is_zero_literal());
  CHECK_FALSE(Expression::parse("1").is_zero_literal());
  CHECK(Expression::parse("sin(x1)").max_space_index() == 1);
  CHECK_FALSE(Expression::parse("sin(x1)").uses_time());
}

TEST_CASE("parse errors carry byte offsets") {
  try {
    Expression::parse("1+*2");
    FAIL_CHECK("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset == 2);
  }
  CHECK_THROWS_AS(Expression::parse("foo(x1)"), ParseError);
  CHECK_THROWS_AS(Expression::parse("(1+2"), ParseError);
  CHECK_THROWS_AS(Expression::parse(""), ParseError);
  CHECK_THROWS_AS(Expression::parse("min(1)"), ParseError);
}

TEST_CASE("render round-trips structurally") {
  for (const char* src :
       {"1/(1+x1^2)", "-x1^2+2*t", "max(min(x1,1),-1)", "sel(x1,1,0-1)",
        "exp(sin(x1)*x1)+sqrt(1+x1^2)", "x1^2^3", "2^-3"}) {
    const Expression e = Expression::parse(src);
    const Expression back = Expression::parse(e.render());
    CHECK_MESSAGE(e.structurally_equal(back), "round trip failed for " << src);
  }
  CHECK_FALSE(Expression::parse("x1+1").structurally_equal(
      Expression::parse("1+x1")));
}

TEST_CASE("symbolic derivative matches a finite-difference oracle") {
  const Expression e = Expression::parse("exp(sin(x1)*x1)+sqrt(1+x1^2)");
  const Expression de = e.differentiate(1);
  const double fd_h = 1e-5;
  for (double x : {-1.7, -0.3, 0.0, 0.9, 2.4}) {
    const double fd = (eval1(e, x + fd_h) - eval1(e, x - fd_h)) / (2.0 * fd_h);
    CHECK(eval1(de, x) == doctest::Approx(fd).epsilon(1e-6));
  }
  // time derivative
  const Expression g = Expression::parse("t^2*x1");
  CHECK(eval1(g.differentiate(0), 3.0, 2.0) == doctest::Approx(12.0));
  // derivative in an absent variable is zero
  CHECK(eval1(g.differentiate(2), 5.0, 2.0) == 0.0);
}

TEST_CASE("derivatives of nonsmooth primitives case-split") {
  const Expression dabs = Expression::parse("abs(x1)").differentiate(1);
  CHECK(eval1(dabs, -2.0) == -1.0);
  CHECK(eval1(dabs, 2.0) == 1.0);
  const Expression dpos = Expression::parse("pos(x1)").differentiate(1);
  CHECK(eval1(dpos, 0.0) == 0.0); // ties take the else branch
  CHECK(eval1(dpos, 1.0) == 1.0);
  const Expression dclamp =
      Expression::parse("max(min(x1,1),-1)").differentiate(1);
  CHECK(eval1(dclamp, 0.5) == 1.0);
  CHECK(eval1(dclamp, 2.0) == 0.0);
}

TEST_CASE("power differentiation rules") {
  const Expression k = Expression::parse("x1^3").differentiate(1);
  CHECK(eval1(k, 2.0) == doctest::Approx(12.0));
  const Expression c = Expression::parse("2^x1").differentiate(1);
  CHECK(eval1(c, 3.0) == doctest::Approx(8.0 * std::log(2.0)));
  CHECK_THROWS_AS(Expression::parse("x1^x1").differentiate(1),
                  DifferentiationError);
}

TEST_CASE("evaluation domain errors") {
  CHECK_THROWS_AS(eval1(Expression::parse("1/x1"), 0.0), EvalError);
  CHECK_THROWS_AS(eval1(Expression::parse("sqrt(0-1-x1)"), 0.0), EvalError);
  // sqrt'(0) divides by zero
  CHECK_THROWS_AS(eval1(Expression::parse("sqrt(x1^2)").differentiate(1), 0.0),
                  EvalError);
}

TEST_CASE("scale_space substitutes spatial variables only") {
  const Expression e = Expression::parse("x1^2+t");
  CHECK(eval1(e.scale_space(2.0), 3.0, 1.0) == doctest::Approx(37.0));
  const Expression q = Expression::parse("x1^2");
  // q(x/2) * 4 == q(x) for the quadratic
  const Expression scaled = q.scale_space(0.5) * Expression::number(4.0);
  for (double x : {-2.0, 0.4, 1.6})
    CHECK(eval1(scaled, x) == doctest::Approx(eval1(q, x)));
}

TEST_CASE("expression builders compose") {
  const Expression x = Expression::variable(1);
  const Expression e = (x + Expression::number(1.0)) * x - x / x;
  CHECK(eval1(e, 2.0) == doctest::Approx(5.0));
  const Expression m =
      Expression::call(FuncKind::max, {x, Expression::number(0.0)});
  CHECK(eval1(m, -3.0) == 0.0);
  CHECK(eval1(-x, 4.0) == -4.0);
  CHECK(eval1(x.pow(Expression::number(4.0)), 2.0) == 16.0);
}
