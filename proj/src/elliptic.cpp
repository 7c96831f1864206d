#include "stencil_lab/elliptic.hpp"

#include "stencil_lab/errors.hpp"
#include "stencil_lab/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stencil_lab {

namespace {

std::string point_label(std::span<const double> x) {
  std::string s = "(";
  char buf[32];
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    std::snprintf(buf, sizeof buf, "%g", x[i]);
    s += buf;
  }
  return s + ")";
}

void check_elliptic_preconditions(const Problem& prob) {
  prob.validate();
  auto require_static = [](const Expression& e, const char* name) {
    if (e.uses_time())
      throw PreconditionError(std::string("elliptic solve: coefficient '") +
                              name + "' depends on t");
  };
  for (const auto& e : prob.coeffs.q) require_static(e, "q");
  for (const auto& e : prob.coeffs.p) require_static(e, "p");
  require_static(prob.coeffs.c, "c");
  require_static(prob.coeffs.f, "f");

  const Domain& dom = prob.domain;
  std::vector<double> x(static_cast<std::size_t>(dom.dim()));
  for (std::size_t i = 0; i < dom.size(); ++i) {
    dom.point(i, x);
    double cv = prob.coeffs.c.evaluate(0.0, x);
    if (cv < prob.constants.c0 - 1e-12)
      throw PreconditionError("elliptic solve: c = " + std::to_string(cv) +
                              " < c0 = " + std::to_string(prob.constants.c0) +
                              " at x = " + point_label(x));
    for (std::size_t li = 0; li < prob.stencil.size(); ++li) {
      double cl = chi(prob, li, 0.0, x);
      if (cl < -1e-12)
        throw PreconditionError("elliptic solve: chi < 0 at x = " +
                                point_label(x));
    }
  }
}

double residual_sup(AssembledOperator& op, const GridFunction& u,
                    const std::vector<double>& fvals) {
  // |L u + f| on the interior
  const auto& interior = op.interior();
  const double inv_h2 =
      1.0 / (op.problem().domain.h() * op.problem().domain.h());
  double r = 0.0;
  for (std::size_t k = 0; k < interior.size(); ++k) {
    const std::size_t i = interior[k];
    double acc = 0.0;
    for (std::size_t li = 0; li < op.problem().stencil.size(); ++li)
      acc += op.chi_at(li, k, 0.0) * (u[op.neighbor(k, li)] - u[i]);
    double res = acc * inv_h2 - op.c_at(k, 0.0) * u[i] + fvals[k];
    r = std::max(r, std::fabs(res));
  }
  return r;
}

} // namespace

EllipticResult solve_elliptic(const Problem& prob, const EllipticOptions& opts) {
  check_elliptic_preconditions(prob);
  AssembledOperator op(prob, opts.tabulate);
  const auto& interior = op.interior();
  const double inv_h2 = 1.0 / (prob.domain.h() * prob.domain.h());

  GridFunction u = GridFunction::sample(prob.coeffs.g, prob.domain, 0.0);
  std::vector<double> fvals(interior.size());
  for (std::size_t k = 0; k < interior.size(); ++k) fvals[k] = op.f_at(k, 0.0);

  GridFunction next = u; // Jacobi scratch
  double res = residual_sup(op, u, fvals);
  long it = 0;
  while (res > opts.tol) {
    if (it >= opts.max_iter)
      throw NotConvergedError("elliptic solve: residual " +
                                  std::to_string(res) + " > tol after " +
                                  std::to_string(it) + " sweeps",
                              u, it, res);
    GridFunction& target = opts.jacobi ? next : u;
    for (std::size_t k = 0; k < interior.size(); ++k) {
      const std::size_t i = interior[k];
      double num = fvals[k];
      double den = op.c_at(k, 0.0);
      for (std::size_t li = 0; li < prob.stencil.size(); ++li) {
        double w = op.chi_at(li, k, 0.0) * inv_h2;
        num += w * u[op.neighbor(k, li)];
        den += w;
      }
      target[i] = num / den;
    }
    if (opts.jacobi)
      for (std::size_t k = 0; k < interior.size(); ++k)
        u[interior[k]] = next[interior[k]];
    ++it;
    res = residual_sup(op, u, fvals);
  }
  return {std::move(u), it, res};
}

EllipticResult solve_tridiagonal_1d(const Problem& prob) {
  check_elliptic_preconditions(prob);
  const Domain& dom = prob.domain;
  if (dom.dim() != 1 || dom.kind() != DomainKind::box)
    throw ValidationError("tridiagonal solve: requires a 1D box domain");
  std::vector<int> plus = {1}, minus = {-1};
  auto ip = prob.stencil.index_of(plus);
  auto im = prob.stencil.index_of(minus);
  if (prob.stencil.size() != 2 || !ip || !im)
    throw ValidationError("tridiagonal solve: requires Lambda_1 = {+1, -1}");

  const std::size_t n = dom.size();
  if (n < 3) throw ValidationError("tridiagonal solve: grid too small");
  const double inv_h2 = 1.0 / (dom.h() * dom.h());
  GridFunction u = GridFunction::sample(prob.coeffs.g, dom, 0.0);

  // interior unknowns 1..n-2; Thomas elimination
  const std::size_t m = n - 2;
  std::vector<double> diag(m), upper(m), rhs(m);
  std::vector<double> x(1);
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t i = k + 1;
    dom.point(i, x);
    double cp = chi(prob, *ip, 0.0, x) * inv_h2;
    double cm = chi(prob, *im, 0.0, x) * inv_h2;
    double cv = prob.coeffs.c.evaluate(0.0, x);
    diag[k] = cv + cp + cm;
    upper[k] = -cp;
    rhs[k] = prob.coeffs.f.evaluate(0.0, x);
    if (k == 0) rhs[k] += cm * u[0];
    if (k == m - 1) rhs[k] += cp * u[n - 1];
    if (k > 0) {
      // eliminate the sub-diagonal -cm against row k-1
      double w = cm / diag[k - 1];
      diag[k] += w * upper[k - 1];
      rhs[k] += w * rhs[k - 1];
    }
  }
  for (std::size_t k = m; k-- > 0;) {
    double v = rhs[k];
    if (k + 1 < m) v -= upper[k] * u[k + 2];
    u[k + 1] = v / diag[k];
  }
  AssembledOperator op(prob, true);
  std::vector<double> fvals(op.interior().size());
  for (std::size_t k = 0; k < fvals.size(); ++k) fvals[k] = op.f_at(k, 0.0);
  const double res = residual_sup(op, u, fvals);
  return {std::move(u), 1, res};
}

GridFunction solve_via_resolvent(const Problem& prob, double tol) {
  check_elliptic_preconditions(prob);
  const double nu = prob.constants.c0 / 2.0;

  GridFunction u(prob.domain, 0.0);
  double sup_f, sup_layer;
  {
    GridFunction fs = GridFunction::sample(prob.coeffs.f, prob.domain, 0.0);
    GridFunction gs = GridFunction::sample(prob.coeffs.g, prob.domain, 0.0);
    sup_f = sup_norm(fs);
    sup_layer = nu * sup_norm(gs);
  }
  // |v(t)| never exceeds max of the initial data and the pinned layer
  const double scale = std::max(sup_f, sup_layer);
  if (scale == 0.0) return u;

  // killed flow: c <- c - nu >= c0 - nu = nu > 0, source 0
  Problem flow = prob;
  flow.coeffs.c = prob.coeffs.c - Expression::number(nu);
  flow.coeffs.f = Expression();
  flow.constants.c0 = nu;

  const double t_end = std::log(2.0 * scale / (nu * tol)) / nu;
  if (t_end <= 0.0) return u;

  AssembledOperator op(flow, true);
  double B = 0.0;
  for (std::size_t k = 0; k < op.interior().size(); ++k) {
    double row = std::fabs(op.c_at(k, 0.0));
    for (std::size_t li = 0; li < flow.stencil.size(); ++li)
      row += 2.0 * op.chi_at(li, k, 0.0) / (prob.domain.h() * prob.domain.h());
    B = std::max(B, row);
  }
  double dt = std::sqrt(12.0 * tol * nu) / ((nu + B) * std::sqrt(scale));
  dt = std::min(dt, stable_dt(flow));
  dt = std::min(dt, t_end / 50.0);

  // pin the lateral layer at nu * g
  GridFunction v = GridFunction::sample(prob.coeffs.f, prob.domain, 0.0);
  {
    Margins m = interior_margins(prob.domain, prob.stencil);
    std::vector<char> is_interior(prob.domain.size(), 0);
    for_each_interior(prob.domain, m, [&](std::span<const int>, std::size_t i) {
      is_interior[i] = 1;
    });
    GridFunction g0 = GridFunction::sample(prob.coeffs.g, prob.domain, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!is_interior[i]) v[i] = nu * g0[i];
  }

  GridFunction lv(prob.domain);
  GridFunction mid = v;
  GridFunction lmid(prob.domain);
  const auto& interior = op.interior();
  double t = 0.0;
  long step = 0;
  // trapezoid accumulation of e^{-nu t} v(t) with per-interval widths
  std::vector<double> prev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) prev[i] = v[i]; // e^{0} v(0)
  while (t < t_end) {
    double step_dt = std::min(dt, t_end - t);
    // Heun step: second order in dt, matching the quadrature order
    op.apply_L(v, t, lv);
    for (std::size_t k = 0; k < interior.size(); ++k) {
      const std::size_t i = interior[k];
      mid[i] = v[i] + step_dt * lv[i];
    }
    op.apply_L(mid, t + step_dt, lmid);
    bool ok = true;
    for (std::size_t k = 0; k < interior.size(); ++k) {
      const std::size_t i = interior[k];
      double nv = v[i] + 0.5 * step_dt * (lv[i] + lmid[i]);
      if (!std::isfinite(nv)) ok = false;
      v[i] = nv;
    }
    ++step;
    if (!ok)
      throw NumericalError("resolvent flow produced a non-finite value at step " +
                               std::to_string(step),
                           step);
    t += step_dt;
    const double w = std::exp(-nu * t);
    for (std::size_t i = 0; i < v.size(); ++i) {
      double cur = w * v[i];
      u[i] += 0.5 * step_dt * (prev[i] + cur);
      prev[i] = cur;
    }
  }
  return u;
}

SeriesOracleResult series_oracle_1d(const Expression& f, double h, double x,
                                    int n_max, double tol) {
  if (!(h > 0.0)) throw ValidationError("series oracle: h must be positive");
  if (n_max < 0) throw ValidationError("series oracle: n_max must be >= 0");
  if (f.max_space_index() > 1 || f.uses_time())
    throw ValidationError("series oracle: f must be a function of x1 only");

  const double rho = 2.0 / (2.0 + h * h);
  // sampled sup of |f| over the window the walk can reach, plus slack
  double window = (static_cast<double>(n_max) + 1.0) * h;
  double sup_f = 0.0;
  std::vector<double> xv(1);
  for (double s = -window * 1.5; s <= window * 1.5; s += h / 4.0) {
    xv[0] = x + s;
    sup_f = std::max(sup_f, std::fabs(f.evaluate(0.0, xv)));
  }
  double tail = std::pow(rho, n_max + 1) * sup_f;
  if (tail > tol)
    throw PreconditionError(
        "series oracle: geometric tail bound " + std::to_string(tail) +
        " exceeds tolerance " + std::to_string(tol) + " at n_max = " +
        std::to_string(n_max));

  // E_n f(x) = sum_j pmf[j] f(x + h (2j - n)), pmf the symmetric binomial
  std::vector<double> pmf = {1.0};
  double value = 0.0;
  double weight = h * h / (2.0 + h * h); // h^2 2^n / (2+h^2)^(n+1) at n = 0
  for (int n = 0; n <= n_max; ++n) {
    double e = 0.0;
    for (int j = 0; j <= n; ++j) {
      xv[0] = x + h * static_cast<double>(2 * j - n);
      e += pmf[static_cast<std::size_t>(j)] * f.evaluate(0.0, xv);
    }
    value += weight * e;
    weight *= rho;
    // pmf(n+1) by convolving with (1/2, 1/2)
    std::vector<double> next(static_cast<std::size_t>(n) + 2, 0.0);
    for (int j = 0; j <= n; ++j) {
      next[static_cast<std::size_t>(j)] += 0.5 * pmf[static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(j) + 1] +=
          0.5 * pmf[static_cast<std::size_t>(j)];
    }
    pmf = std::move(next);
  }
  return {value, tail, n_max + 1};
}

} // namespace stencil_lab
