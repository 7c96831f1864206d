#pragma once

#include "stencil_lab/operators.hpp"
#include "stencil_lab/report.hpp"

#include <optional>

namespace stencil_lab {

/// Where the checkers sample: the full spatial grid crossed with a uniform
/// t-grid of t_samples points in [0, T] (a single t when every coefficient
/// is t-independent). Derivative-based checks skip sample points where a
/// symbolic derivative hits a domain error (ties of nonsmooth primitives,
/// sqrt'(0)); skipped points are counted in the record note.
struct SampleSpec {
  int t_samples = 17;
};

/// Optional uniform overrides for the free budget objects of the
/// quadratic-form condition; by default the pointwise-minimal feasible
/// choices are used.
struct QuadraticFormBudgets {
  std::optional<double> r_lambda_mu; // uniform r_{lambda mu}
  std::optional<double> p_lambda_mu; // uniform p_{lambda mu}
};

/// chi_lambda >= 0 and c >= c0 on the sampled set.
CheckRecord check_positivity(const Problem& prob, const SampleSpec& spec = {});
/// Lambda_1 = -Lambda_1 and q_lambda = q_{-lambda} on the sampled set.
CheckRecord check_symmetry_S(const Problem& prob, const SampleSpec& spec = {});
/// sum_lambda lambda q_lambda is constant in x at each t.
CheckRecord check_drift_constancy(const Problem& prob, const SampleSpec& spec = {});
/// sum_lambda (D_i q_lambda) phi(lambda) = 0 for every additive phi on
/// Lambda_1 u {0} (basis computed from the additivity constraints).
CheckRecord check_linearity_orthogonality(const Problem& prob,
                                          const SampleSpec& spec = {});
/// The quadratic-form dominance condition at each sample: the difference
/// quotient form A(xi) (J1, J2, |delta p| and cross terms, m = 1) must be
/// dominated by B(xi) = (2-8 delta) c |xi|^2 + K1 sum chi_lambda xi^2 +
/// delta h^-2 sum chi_lambda (xi_lambda + xi_-lambda)^2; checked as
/// min eig(B - A) >= -1e-9, plus the two scalar budget margins for the
/// difference-quotient mass against 2*delta*c and delta*c.
CheckRecord check_quadratic_form(const Problem& prob, const SampleSpec& spec = {},
                                 const QuadraticFormBudgets& budgets = {});
/// The rougher sufficient condition: pointwise in lambda,
/// 10 sum_mu (d_lambda r_mu)^2 + 4 sum_nu |sum_mu (d_lambda r_mu)(d_nu r_mu)|
/// + 2 sum_mu |d_lambda p_mu + d_mu p_lambda + (d_lambda r_mu)^2 +
/// (d_mu r_lambda)^2| <= c + K1 q_lambda, with r = sqrt(q) and d the
/// h-difference quotient.
CheckRecord check_rough_condition(const Problem& prob, const SampleSpec& spec = {});
/// d = 1, Lambda_1 = {+1,-1}, q_1 = q_-1 = a: 14 (r')^2 + b' <= (1-delta) c
/// + K1 a with r = sqrt(a) and b the limit drift, both differentiated
/// symbolically.
CheckRecord check_explicit_1d(const Problem& prob, const SampleSpec& spec = {});
/// Symmetric set, min q >= kappa > 0 (kappa from the problem constants) and
/// D q_{-lambda} = D q_lambda: the nondegenerate shortcut to the conditions
/// above for small h.
CheckRecord check_nondegenerate_shortcut(const Problem& prob,
                                         const SampleSpec& spec = {});

/// Runs the named checks ("all" or a subset of: positivity, symmetry,
/// drift-constancy, linearity-orthogonality, quadratic-form,
/// rough-condition, explicit-1d, nondegenerate-shortcut). With h_sweep the
/// suite reruns at h, h/2, h/4, suffixing record names. The budgets apply
/// to quadratic-form only.
AssumptionReport run_checks(const Problem& prob,
                            const std::vector<std::string>& names,
                            const SampleSpec& spec = {}, bool h_sweep = false,
                            const QuadraticFormBudgets& budgets = {});

std::vector<std::string> all_check_names();

/// Basis of the additive functions phi on Lambda_1 u {0} (phi(0) = 0,
/// phi(mu + lambda) = phi(mu) + phi(lambda) whenever all three lie in the
/// set), one vector of phi values per stencil entry. Exposed for tests.
std::vector<std::vector<double>> linear_function_basis(const Stencil& stencil);

/// Eigenvalues (ascending) and eigenvectors (columns, matching order) of a
/// symmetric n x n matrix by cyclic Jacobi rotations. Exposed for tests.
struct EigenResult {
  std::vector<double> values;
  std::vector<double> vectors; // row-major, column j = eigenvector j
};
EigenResult symmetric_eigen(std::vector<double> a, std::size_t n);

} // namespace stencil_lab
