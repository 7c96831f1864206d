#pragma once

#include "stencil_lab/expr.hpp"
#include "stencil_lab/lattice.hpp"
#include "stencil_lab/report.hpp"

#include <span>
#include <vector>

namespace stencil_lab {

/// Coefficient fields of the scheme, aligned with the stencil: q[i], p[i]
/// belong to stencil.vectors[i]. Missing entries default to literal zero.
struct CoefficientSet {
  std::vector<Expression> q;
  std::vector<Expression> p;
  Expression c;
  Expression f;
  Expression g;
};

/// Named constants of a problem. c0 is the uniform lower bound assumed on
/// c, delta the slack parameter of the difference-quotient conditions, K1
/// the structural constant, m the declared smoothness order (metadata for
/// extrapolation), T the time horizon, theta the artificial-diffusion shift
/// already applied to p (kept for reporting), kappa the nondegeneracy
/// threshold (0 = not provided).
struct ProblemConstants {
  double c0 = 1.0;
  double delta = 0.2;
  double K1 = 1.0;
  int m = 1;
  double T = 1.0;
  double theta = 0.0;
  double kappa = 0.0;
};

/// A discretized problem: lattice domain, stencil, coefficients, constants.
struct Problem {
  Domain domain;
  Stencil stencil;
  CoefficientSet coeffs;
  ProblemConstants constants;

  /// Structural validation (stencil, dimensions of coefficient variables,
  /// constant ranges). Throws ValidationError naming the offending field.
  void validate() const;
  /// True when no coefficient references t.
  bool time_independent() const;
  /// Same problem on the same box at a different spacing.
  Problem with_h(double new_h) const;
  /// p_lambda -> p_lambda + theta for every lambda; requires a symmetric
  /// stencil set so the added drift cancels in the limit.
  Problem add_theta(double theta) const;
};

/// chi_lambda = q_lambda + h * p_lambda at one point.
double chi(const Problem& prob, std::size_t lambda_index, double t,
           std::span<const double> x);

/// The scheme operator assembled on the problem's grid: interior index
/// list, per-lambda neighbor tables (periodic wrap precomputed), and
/// coefficient caches. Caches are filled once when the coefficients are
/// t-independent (or tabulate=false forces lazy re-evaluation per call,
/// which produces bit-identical values).
class AssembledOperator {
public:
  explicit AssembledOperator(const Problem& prob, bool tabulate = true);

  const Problem& problem() const { return *prob_; }
  /// Flat indices of the interior set (all points for periodic domains).
  const std::vector<std::size_t>& interior() const { return interior_; }
  /// Neighbor flat index of interior point k under stencil vector li.
  std::size_t neighbor(std::size_t k, std::size_t li) const {
    return neighbors_[li][k];
  }

  double chi_at(std::size_t li, std::size_t k, double t);
  double c_at(std::size_t k, double t);
  double f_at(std::size_t k, double t);

  /// out = L0 u = h^-2 sum_lambda chi_lambda (u(x+h lambda) - u(x)) on the
  /// interior; zero on the boundary layer. out must live on the same grid.
  void apply_L0(const GridFunction& u, double t, GridFunction& out);
  /// out = L u = L0 u - c u.
  void apply_L(const GridFunction& u, double t, GridFunction& out);

  /// sup over the grid of (c + h^-2 sum chi) at time t.
  double sup_row_sum(double t);

private:
  struct Field {
    Expression e;
    bool time_dep = false;
    bool cached = false;
    double cached_t = 0.0;
    std::vector<double> values; // per interior point
  };
  double field_at(Field& f, std::size_t k, double t);
  void ensure(Field& f, double t);

  const Problem* prob_;
  bool tabulate_;
  std::vector<std::size_t> interior_;
  std::vector<std::vector<std::size_t>> neighbors_; // [lambda][interior k]
  std::vector<std::vector<double>> points_;         // interior point coords
  std::vector<Field> chi_;                          // per lambda
  Field c_, f_;
  double inv_h2_;
};

GridFunction apply_L0(const Problem& prob, const GridFunction& u, double t);
GridFunction apply_L(const Problem& prob, const GridFunction& u, double t);

/// Second-order limit coefficients at a point: a_ij = 1/2 sum q_lambda
/// lambda_i lambda_j, b_i = sum p_lambda lambda_i, plus c.
struct LimitCoefficients {
  std::vector<double> a; // row-major d x d
  std::vector<double> b;
  double c = 0.0;
};

LimitCoefficients limit_coefficients(const Problem& prob, double t,
                                     std::span<const double> x);

/// The limit operator applied symbolically to phi: sum a_ij D_i D_j phi +
/// sum b_i D_i phi - c phi, with a_ij, b_i assembled as expressions.
Expression continuum_operator_applied(const Problem& prob, const Expression& phi);

/// Source that makes `v` the exact limit solution: f = -(limit operator)v.
Expression manufacture_f(const Problem& prob, const Expression& v);

/// Sup over interior points of |L_h phi - (limit operator) phi| at t = 0,
/// for each h; fitted order of the decay.
ConvergenceReport consistency_error(const Problem& prob, const Expression& phi,
                                    std::span<const double> h_list);

/// Names of nonsmooth coefficient fields when the declared smoothness order
/// m >= 1; empty when there is nothing to warn about.
std::vector<std::string> smoothness_warnings(const Problem& prob);

} // namespace stencil_lab
