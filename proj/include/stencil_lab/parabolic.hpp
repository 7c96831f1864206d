#pragma once

#include "stencil_lab/operators.hpp"

#include <functional>
#include <optional>

namespace stencil_lab {

/// Largest explicit-Euler step kept stable with a 0.9 safety factor:
/// 0.9 / sup(c + h^-2 sum chi). The sup over t is taken in two passes, a
/// coarse uniform sampling and a re-sampling at the implied step
/// resolution; t-independent coefficients collapse to one pass.
double stable_dt(const Problem& prob);

struct ParabolicOptions {
  /// Step override, used by time-refinement studies. Not clamped: the
  /// caller owns stability when overriding.
  std::optional<double> dt;
  /// Pre-tabulate t-independent coefficient fields (identical values).
  bool tabulate = true;
};

/// Stored forward-Euler trajectory: uniform step from stable_dt (or the
/// override) with one final partial step landing exactly on T.
struct Trajectory {
  std::vector<double> times;
  std::vector<GridFunction> states;
  double dt = 0.0;
};

/// One explicit Euler step at a time, for callers that stream instead of
/// storing (resolvent integration, gradient studies). Box domains keep the
/// Dirichlet layer pinned at g; periodic domains update every point.
class ParabolicStepper {
public:
  ParabolicStepper(const Problem& prob, bool tabulate = true);

  const GridFunction& state() const { return u_; }
  double time() const { return t_; }
  long step_index() const { return step_; }

  /// Advances by dt. Throws NumericalError with the step index when the
  /// state leaves the representable range.
  void advance(double dt);

private:
  const Problem* prob_;
  AssembledOperator op_;
  GridFunction u_, lu_;
  double t_ = 0.0;
  long step_ = 0;
};

Trajectory solve_parabolic(const Problem& prob, const ParabolicOptions& opts = {});

/// Outcome of checking a trajectory against the discrete maximum principle.
/// For each trajectory time the running-sup bound
///   G(t) e^{nu t} + integral_0^t F(s) e^{nu (t-s)} ds
/// is accumulated by trapezoidal quadrature, with nu = sup(C - c) and G the
/// sup of e^{-nu s} v_+ over the parabolic boundary seen so far. When
/// nu < 0 the simpler bound sup v_+ + |nu|^-1 sup F applies as well; the
/// margin uses the larger (both are valid), since explicit Euler output
/// satisfies the differential inequality only up to O(dt) and can undercut
/// the time-resolved bound by that much.
struct MaxPrincipleReport {
  double nu = 0.0;
  bool corollary_applicable = false;
  double margin = 0.0; // min over t of bound - sup_x v
  double worst_time = 0.0;
  double bound_at_worst = 0.0;
  double vbar_at_worst = 0.0;
  std::vector<double> times, vbar, bound;
};

/// Preconditions: traj was produced for `prob` (or a problem whose solution
/// satisfies D_t v <= L v + C vbar_+ + F); C is an expression in (t, x), F a
/// function of t. For solver output with equality use C = 0 and
/// F(t) = sup_x f_+(t, .), see sup_f_plus.
MaxPrincipleReport verify_max_principle(const Problem& prob,
                                        const Trajectory& traj,
                                        const Expression& C,
                                        const std::function<double(double)>& F);

/// F(t) = sup over the grid of max(f(t, x), 0).
std::function<double(double)> sup_f_plus(const Problem& prob);

} // namespace stencil_lab
