#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "stencil_lab/elliptic.hpp"
#include "stencil_lab/errors.hpp"
#include "test_helpers.hpp"
#include "test_problems.hpp"

using namespace stencil_lab;

namespace {
const double pi = std::numbers::pi;
}

TEST_CASE("x-independent equation has the constant solution f / c") {
  Problem p = prob1d(DomainKind::periodic, 0.0, 1.0, 0.25, "1", "2", "6");
  EllipticResult res = solve_elliptic(p);
  for (std::size_t i = 0; i < res.u.size(); ++i)
    CHECK(res.u[i] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(res.residual <= 1e-10);
}

TEST_CASE("sweeps agree with the direct tridiagonal solve") {
  Problem p = prob1d(DomainKind::box, -10.0, 10.0, 0.5, "1", "1",
                     "1/(1+x1^2)");
  EllipticOptions o;
  o.tol = 1e-12;
  EllipticResult gs = solve_elliptic(p, o);
  EllipticResult tri = solve_tridiagonal_1d(p);
  CHECK(max_abs_diff(gs.u, tri.u) <= 1e-10);
  CHECK(tri.residual <= 1e-9);

  // Jacobi option converges to the same fixed point
  EllipticOptions j;
  j.tol = 1e-12;
  j.jacobi = true;
  EllipticResult jac = solve_elliptic(p, j);
  CHECK(max_abs_diff(jac.u, tri.u) <= 1e-10);
}

TEST_CASE("Dirichlet data pins the boundary layer") {
  Problem p = prob1d(DomainKind::box, -1.0, 1.0, 0.25, "1", "1", "1",
                     "sin(x1)");
  EllipticResult res = solve_elliptic(p);
  CHECK(res.u[0] == doctest::Approx(std::sin(-1.0)));
  CHECK(res.u[res.u.size() - 1] == doctest::Approx(std::sin(1.0)));
}

TEST_CASE("comparison principle and linearity") {
  Problem p = prob1d(DomainKind::box, -5.0, 5.0, 0.5, "1", "1",
                     "1/(1+x1^2)");
  EllipticResult a = solve_elliptic(p);
  for (std::size_t i = 0; i < a.u.size(); ++i) CHECK(a.u[i] >= -1e-9);

  Problem hi = p;
  hi.coeffs.f = Expression::parse("1/(1+x1^2) + 0.5");
  EllipticResult b = solve_elliptic(hi);
  for (std::size_t i = 0; i < a.u.size(); ++i)
    CHECK(b.u[i] >= a.u[i] - 1e-9);

  Problem twice = p;
  twice.coeffs.f = Expression::parse("2/(1+x1^2)");
  EllipticResult c = solve_elliptic(twice);
  for (std::size_t i = 0; i < a.u.size(); ++i)
    CHECK(c.u[i] == doctest::Approx(2.0 * a.u[i]).epsilon(1e-8));
}

TEST_CASE("preconditions: c below c0 and time-dependent coefficients") {
  Problem p = prob1d(DomainKind::box, -1.0, 1.0, 0.5, "1", "0", "1");
  expect_error<PreconditionError>([&] { solve_elliptic(p); }, "c0");

  Problem t = prob1d(DomainKind::box, -1.0, 1.0, 0.5, "1", "1+t", "1");
  expect_error<PreconditionError>([&] { solve_elliptic(t); }, "t");
}

TEST_CASE("iteration cap raises NotConvergedError with the best iterate") {
  Problem p = prob1d(DomainKind::box, -10.0, 10.0, 0.25, "1", "1",
                     "1/(1+x1^2)");
  EllipticOptions o;
  o.tol = 1e-14;
  o.max_iter = 2;
  try {
    solve_elliptic(p, o);
    FAIL_CHECK("expected NotConvergedError");
  } catch (const NotConvergedError& e) {
    CHECK(e.iterations == 2);
    CHECK(e.residual > 1e-14);
    CHECK(e.best.size() == p.domain.size());
  }
}

TEST_CASE("resolvent integration agrees with the direct solve") {
  // includes a nonzero-boundary case: the lateral layer is reproduced
  Problem p = prob1d(DomainKind::box, -1.0, 1.0, 0.5, "1", "2", "0", "1");
  GridFunction via = solve_via_resolvent(p, 1e-5);
  EllipticResult direct = solve_elliptic(p);
  CHECK(max_abs_diff(via, direct.u) <= 3e-5);
}

TEST_CASE("series oracle: mass identity and exactness on linear sources") {
  SeriesOracleResult one =
      series_oracle_1d(Expression::parse("1"), 0.5, 0.0, 250, 1e-10);
  CHECK(one.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(one.tail_bound <= 1e-10);
  CHECK(one.terms == 251);

  // u - u'' = x has the exact solution u = x
  SeriesOracleResult lin =
      series_oracle_1d(Expression::parse("x1"), 0.5, 2.0, 300, 1e-8);
  CHECK(lin.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("series oracle matches the truncated-domain solve") {
  Problem p = prob1d(DomainKind::box, -60.0, 60.0, 0.5, "1", "1",
                     "1/(1+x1^2)");
  EllipticResult direct = solve_tridiagonal_1d(p);
  for (double x : {-1.0, 0.0, 2.5}) {
    SeriesOracleResult o =
        series_oracle_1d(p.coeffs.f, 0.5, x, 300, 1e-10);
    std::vector<int> mi = {
        static_cast<int>(std::lround((x + 60.0) / 0.5))};
    CHECK(direct.u[p.domain.flat_index(mi)] ==
          doctest::Approx(o.value).epsilon(1e-6));
  }
}

TEST_CASE("series oracle rejects bad inputs") {
  expect_error<PreconditionError>(
      [] {
        series_oracle_1d(Expression::parse("1"), 0.5, 0.0, 10, 1e-10);
      },
      "tail");
  CHECK_THROWS_AS(
      series_oracle_1d(Expression::parse("x2"), 0.5, 0.0, 10, 1e-3),
      ValidationError);
  CHECK_THROWS_AS(
      series_oracle_1d(Expression::parse("1"), -0.5, 0.0, 10, 1e-3),
      ValidationError);
}
