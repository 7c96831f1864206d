#pragma once

#include "stencil_lab/operators.hpp"

namespace stencil_lab {

struct EllipticOptions {
  double tol = 1e-10;
  long max_iter = 200000;
  /// Jacobi sweeps instead of Gauss-Seidel (slower, order-independent).
  bool jacobi = false;
  bool tabulate = true;
};

struct EllipticResult {
  GridFunction u;
  long iterations = 0;
  double residual = 0.0;
};

/// Thrown when the sweep count runs out; carries the best iterate.
class NotConvergedError : public std::runtime_error {
public:
  NotConvergedError(std::string message, GridFunction best, long iterations,
                    double residual)
      : std::runtime_error(std::move(message)),
        best(std::move(best)),
        iterations(iterations),
        residual(residual) {}
  GridFunction best;
  long iterations;
  double residual;
};

/// Solves L u + f = 0 (interior; u = g on the boundary layer of box
/// domains) by Gauss-Seidel sweeps on the diagonally dominant form
/// (c + h^-2 sum chi) u = h^-2 sum chi u(.+h lambda) + f, until the
/// residual sup-norm |L u + f| <= tol. Preconditions checked on the grid:
/// coefficients t-independent, chi_lambda >= 0, c >= c0 > 0.
EllipticResult solve_elliptic(const Problem& prob, const EllipticOptions& opts = {});

/// Direct Thomas solve of the same system for d = 1 box domains with
/// Lambda_1 = {+1, -1}; reference route for cross-checks.
EllipticResult solve_tridiagonal_1d(const Problem& prob);

/// Elliptic solution via the killed parabolic flow: with nu = c0/2,
/// u = integral_0^inf e^{-nu t} v(t) dt where D_t v = (L + nu) v, v(0) = f,
/// and the lateral layer of v pinned at nu*g so the integrated layer equals
/// g. Truncation and trapezoid step are chosen so the total quadrature
/// error stays around `tol`.
GridFunction solve_via_resolvent(const Problem& prob, double tol);

struct SeriesOracleResult {
  double value = 0.0;
  double tail_bound = 0.0;
  int terms = 0;
};

/// Whole-line oracle for the 1D model scheme
///   h^-2 (u(x+h) - 2u(x) + u(x-h)) - u(x) + f(x) = 0,
/// summed as u(x) = sum_n h^2 2^n / (2+h^2)^(n+1) * E_n f, where E_n is the
/// exact n-step random-walk average (binomial weights). The geometric tail
/// after n_max terms is bounded by (2/(2+h^2))^(n_max+1) * sup |f| over a
/// sampled window; throws PreconditionError when that bound exceeds tol.
SeriesOracleResult series_oracle_1d(const Expression& f, double h, double x,
                                    int n_max, double tol);

} // namespace stencil_lab
