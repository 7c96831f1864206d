#include "stencil_lab/estimates.hpp"

#include "stencil_lab/elliptic.hpp"
#include "stencil_lab/errors.hpp"
#include "stencil_lab/parabolic.hpp"
#include "stencil_lab/threads.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stencil_lab {

namespace {

/// Flat-index tables over the set of points where both the unit shifts
/// (central gradient) and the stencil shifts stay on the grid.
struct FunctionalTables {
  std::vector<std::size_t> center;
  std::vector<std::vector<std::size_t>> axis_plus, axis_minus; // [axis][k]
  std::vector<std::vector<std::size_t>> shifted;               // [lambda][k]
};

std::size_t shifted_flat(const Domain& dom, std::span<const int> mi,
                         std::span<const int> shift, std::vector<int>& tmp) {
  const auto& ext = dom.extents();
  for (std::size_t i = 0; i < mi.size(); ++i) {
    int v = mi[i] + shift[i];
    if (dom.kind() == DomainKind::periodic) {
      v %= ext[i];
      if (v < 0) v += ext[i];
    }
    tmp[i] = v;
  }
  return dom.flat_index(tmp);
}

FunctionalTables build_tables(const Domain& dom, const Stencil& st) {
  FunctionalTables tb;
  const std::size_t d = static_cast<std::size_t>(dom.dim());
  tb.axis_plus.resize(d);
  tb.axis_minus.resize(d);
  tb.shifted.resize(st.size());
  const Margins common =
      max_margins(unit_margins(dom), interior_margins(dom, st));
  std::vector<int> tmp(d), shift(d, 0);
  for_each_interior(dom, common,
                    [&](std::span<const int> mi, std::size_t flat) {
                      tb.center.push_back(flat);
                      for (std::size_t i = 0; i < d; ++i) {
                        std::fill(shift.begin(), shift.end(), 0);
                        shift[i] = 1;
                        tb.axis_plus[i].push_back(
                            shifted_flat(dom, mi, shift, tmp));
                        shift[i] = -1;
                        tb.axis_minus[i].push_back(
                            shifted_flat(dom, mi, shift, tmp));
                      }
                      for (std::size_t li = 0; li < st.size(); ++li)
                        tb.shifted[li].push_back(shifted_flat(
                            dom, mi, st.vectors[li], tmp));
                    });
  return tb;
}

struct Sups {
  double u = 0.0, tau0_du = 0.0, U = 0.0, sum = 0.0;

  void fold(const Sups& o) {
    u = std::max(u, o.u);
    tau0_du = std::max(tau0_du, o.tau0_du);
    U = std::max(U, o.U);
    sum = std::max(sum, o.sum);
  }
};

Sups eval_functional(const FunctionalTables& tb, const Stencil& st, double h,
                     std::span<const double> u) {
  Sups s;
  const std::size_t d = tb.axis_plus.size();
  for (std::size_t k = 0; k < tb.center.size(); ++k) {
    const double uv = std::abs(u[tb.center[k]]);
    double g2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double g =
          (u[tb.axis_plus[i][k]] - u[tb.axis_minus[i][k]]) / (2.0 * h);
      g2 += g * g;
    }
    const double du = st.tau0 * std::sqrt(g2);
    double U2 = 0.0;
    for (std::size_t li = 0; li < st.size(); ++li) {
      const double w =
          st.tau[li] * (u[tb.shifted[li][k]] - u[tb.center[k]]) / h;
      U2 += w * w;
    }
    const double uf = std::sqrt(U2);
    s.u = std::max(s.u, uv);
    s.tau0_du = std::max(s.tau0_du, du);
    s.U = std::max(s.U, uf);
    s.sum = std::max(s.sum, uv + du + uf);
  }
  return s;
}

/// sup |g| over the Dirichlet layer (points some stencil shift pushes out of
/// a box); 0 for periodic domains, which have no lateral boundary.
double lateral_sup(const Problem& prob) {
  if (prob.domain.kind() == DomainKind::periodic) return 0.0;
  const Margins m = interior_margins(prob.domain, prob.stencil);
  std::vector<char> interior(prob.domain.size(), 0);
  for_each_interior(prob.domain, m,
                    [&](std::span<const int>, std::size_t flat) {
                      interior[flat] = 1;
                    });
  const GridFunction g = GridFunction::sample(prob.coeffs.g, prob.domain, 0.0);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!interior[i]) s = std::max(s, std::abs(g[i]));
  return s;
}

GradientStudyRow study_one(const Problem& prob,
                           const GradientStudyOptions& opts) {
  GradientStudyRow row;
  const double h = prob.domain.h();
  row.h = h;
  row.F1 = compute_F1(prob, opts.samples);
  const FunctionalTables tb = build_tables(prob.domain, prob.stencil);
  double boundary = lateral_sup(prob);
  Sups total;
  if (opts.mode == StudyMode::parabolic) {
    const GridFunction g0 =
        GridFunction::sample(prob.coeffs.g, prob.domain, 0.0);
    const Sups s0 = eval_functional(tb, prob.stencil, h, g0.values());
    boundary = std::max(boundary, s0.sum);
    total.fold(s0);
    ParabolicStepper stepper(prob);
    const double dt = stable_dt(prob);
    const double T = prob.constants.T;
    const double eps = 1e-12 * std::max(1.0, T);
    while (stepper.time() < T - eps) {
      stepper.advance(std::min(dt, T - stepper.time()));
      total.fold(
          eval_functional(tb, prob.stencil, h, stepper.state().values()));
    }
  } else {
    EllipticOptions eo;
    eo.tol = opts.elliptic_tol;
    const EllipticResult res = solve_elliptic(prob, eo);
    total = eval_functional(tb, prob.stencil, h, res.u.values());
  }
  row.sup_u = total.u;
  row.sup_tau0_du = total.tau0_du;
  row.sup_U = total.U;
  row.boundary = boundary;
  const double denom = row.F1 + boundary;
  if (denom > 0.0)
    row.R = total.sum / denom;
  else
    row.R = (total.sum == 0.0)
                ? 0.0
                : std::numeric_limits<double>::infinity();
  return row;
}

} // namespace

double compute_F1(const Problem& prob, const SampleSpec& spec) {
  const int d = prob.domain.dim();
  std::vector<Expression> df;
  for (int i = 1; i <= d; ++i) df.push_back(prob.coeffs.f.differentiate(i));
  std::vector<double> ts{0.0};
  if (prob.coeffs.f.uses_time()) {
    const int n = std::max(2, spec.t_samples);
    ts.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      ts[static_cast<std::size_t>(i)] =
          prob.constants.T * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  double sup = 0.0;
  std::vector<double> x(static_cast<std::size_t>(d));
  for (double t : ts)
    for (std::size_t flat = 0; flat < prob.domain.size(); ++flat) {
      prob.domain.point(flat, x);
      try {
        double g2 = 0.0;
        for (const auto& e : df) {
          const double gi = e.evaluate(t, x);
          g2 += gi * gi;
        }
        sup = std::max(sup, std::abs(prob.coeffs.f.evaluate(t, x)) +
                                std::sqrt(g2));
      } catch (const EvalError&) {
        // nonsmooth f: derivative undefined on its tie set; skip the point
      }
    }
  return sup;
}

GradientStudy gradient_bound_study(const Problem& prob,
                                   std::span<const double> h_list,
                                   const GradientStudyOptions& opts) {
  prob.validate();
  if (h_list.empty())
    throw ValidationError("gradient_bound_study: h_list is empty");
  for (std::size_t i = 1; i < h_list.size(); ++i)
    if (!(h_list[i] < h_list[i - 1]))
      throw ValidationError(
          "gradient_bound_study: h_list must be strictly decreasing");
  GradientStudy study;
  study.rows.resize(h_list.size());
  parallel_for_index(h_list.size(), [&](std::size_t i) {
    study.rows[i] = study_one(prob.with_h(h_list[i]), opts);
  });
  return study;
}

} // namespace stencil_lab
