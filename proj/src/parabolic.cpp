#include "stencil_lab/parabolic.hpp"

#include "stencil_lab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stencil_lab {

namespace {

double sup_row_sum_over(const Problem& prob, AssembledOperator& op,
                        std::span<const double> ts) {
  double s = -std::numeric_limits<double>::infinity();
  for (double t : ts) s = std::max(s, op.sup_row_sum(t));
  (void)prob;
  return s;
}

} // namespace

double stable_dt(const Problem& prob) {
  prob.validate();
  AssembledOperator op(prob, /*tabulate=*/true);
  const double T = prob.constants.T;
  std::vector<double> ts;
  if (prob.time_independent()) {
    ts = {0.0};
  } else {
    for (int i = 0; i <= 32; ++i) ts.push_back(T * i / 32.0);
  }
  double s = sup_row_sum_over(prob, op, ts);
  if (!(s > 0.0))
    throw PreconditionError("stable_dt: sup(c + h^-2 sum chi) is not positive");
  double dt = 0.9 / s;
  if (!prob.time_independent()) {
    // second pass at the implied step resolution, capped for degenerate cases
    long steps = static_cast<long>(std::ceil(T / dt));
    long stride = std::max(1L, steps / 20000L);
    ts.clear();
    for (long n = 0; n <= steps; n += stride)
      ts.push_back(std::min(T, static_cast<double>(n) * dt));
    s = sup_row_sum_over(prob, op, ts);
    dt = 0.9 / s;
  }
  return dt;
}

ParabolicStepper::ParabolicStepper(const Problem& prob, bool tabulate)
    : prob_(&prob),
      op_(prob, tabulate),
      u_(GridFunction::sample(prob.coeffs.g, prob.domain, 0.0)),
      lu_(prob.domain) {
  u_.set_time(0.0);
}

void ParabolicStepper::advance(double dt) {
  op_.apply_L(u_, t_, lu_);
  const auto& interior = op_.interior();
  bool ok = true;
  for (std::size_t k = 0; k < interior.size(); ++k) {
    const std::size_t i = interior[k];
    double v = u_[i] + dt * (lu_[i] + op_.f_at(k, t_));
    if (!std::isfinite(v)) ok = false;
    u_[i] = v;
  }
  t_ += dt;
  ++step_;
  u_.set_time(t_);
  if (!ok)
    throw NumericalError("parabolic step produced a non-finite value at step " +
                             std::to_string(step_),
                         step_);
}

Trajectory solve_parabolic(const Problem& prob, const ParabolicOptions& opts) {
  prob.validate();
  const double T = prob.constants.T;
  double dt = opts.dt ? *opts.dt : stable_dt(prob);
  if (!(dt > 0.0)) throw ValidationError("solve_parabolic: dt must be positive");
  Trajectory traj;
  traj.dt = dt;
  ParabolicStepper stepper(prob, opts.tabulate);
  traj.times.push_back(0.0);
  traj.states.push_back(stepper.state());
  const double eps = 1e-12 * std::max(1.0, T);
  while (stepper.time() < T - eps) {
    double step = std::min(dt, T - stepper.time());
    stepper.advance(step);
    traj.times.push_back(stepper.time());
    traj.states.push_back(stepper.state());
  }
  return traj;
}

std::function<double(double)> sup_f_plus(const Problem& prob) {
  // snapshot what we need; the returned closure outlives the call site args
  Expression f = prob.coeffs.f;
  Domain dom = prob.domain;
  return [f, dom](double t) {
    double s = 0.0;
    std::vector<double> x(static_cast<std::size_t>(dom.dim()));
    for (std::size_t i = 0; i < dom.size(); ++i) {
      dom.point(i, x);
      s = std::max(s, f.evaluate(t, x));
    }
    return std::max(s, 0.0);
  };
}

MaxPrincipleReport verify_max_principle(const Problem& prob,
                                        const Trajectory& traj,
                                        const Expression& C,
                                        const std::function<double(double)>& F) {
  if (traj.states.empty())
    throw ValidationError("verify_max_principle: empty trajectory");
  const Domain& dom = prob.domain;
  Margins m = interior_margins(dom, prob.stencil);

  // boundary layer flats (empty for periodic domains)
  std::vector<char> is_interior(dom.size(), 0);
  for_each_interior(dom, m, [&](std::span<const int>, std::size_t flat) {
    is_interior[flat] = 1;
  });
  std::vector<std::size_t> boundary;
  for (std::size_t i = 0; i < dom.size(); ++i)
    if (!is_interior[i]) boundary.push_back(i);

  // nu = sup over grid x trajectory times of (C - c)
  double nu = -std::numeric_limits<double>::infinity();
  {
    Expression diff = C - prob.coeffs.c;
    bool tdep = diff.uses_time();
    std::vector<double> x(static_cast<std::size_t>(dom.dim()));
    for (std::size_t ti = 0; ti < traj.times.size(); ++ti) {
      for (std::size_t i = 0; i < dom.size(); ++i) {
        dom.point(i, x);
        nu = std::max(nu, diff.evaluate(traj.times[ti], x));
      }
      if (!tdep) break;
    }
  }

  MaxPrincipleReport rep;
  rep.nu = nu;
  rep.corollary_applicable = nu < 0.0;

  // G(t): running sup of e^{-nu s} v_+ over the parabolic boundary:
  // the whole t = 0 slice, then the lateral layer at each time.
  const GridFunction& v0 = traj.states.front();
  double G = 0.0, G_raw = 0.0;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    G = std::max(G, std::max(v0[i], 0.0));
    G_raw = G;
  }
  double integral = 0.0;  // trapezoid of F(s) e^{nu (t - s)}
  double F_sup = F(0.0);  // running sup of F over [0, t]
  double F_prev = F_sup;

  rep.margin = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    const double t = traj.times[n];
    const GridFunction& v = traj.states[n];
    if (n > 0) {
      const double ds = t - traj.times[n - 1];
      const double Fn = F(t);
      integral = integral * std::exp(nu * ds) +
                 0.5 * ds * (F_prev * std::exp(nu * ds) + Fn);
      F_prev = Fn;
      F_sup = std::max(F_sup, Fn);
      for (std::size_t b : boundary) {
        double vp = std::max(v[b], 0.0);
        G = std::max(G, std::exp(-nu * t) * vp);
        G_raw = std::max(G_raw, vp);
      }
    }
    double vbar = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) vbar = std::max(vbar, v[i]);
    double bound = G * std::exp(nu * t) + integral;
    if (rep.corollary_applicable)
      bound = std::max(bound, G_raw + F_sup / -nu);
    rep.times.push_back(t);
    rep.vbar.push_back(vbar);
    rep.bound.push_back(bound);
    double margin = bound - vbar;
    if (margin < rep.margin) {
      rep.margin = margin;
      rep.worst_time = t;
      rep.bound_at_worst = bound;
      rep.vbar_at_worst = vbar;
    }
  }
  return rep;
}

} // namespace stencil_lab
