#include "stencil_lab/operators.hpp"

#include "stencil_lab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stencil_lab {

namespace {

std::string vec_label(const std::vector<int>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

} // namespace

void Problem::validate() const {
  stencil.validate();
  if (stencil.dim() != domain.dim())
    throw ValidationError("problem: stencil dimension " +
                          std::to_string(stencil.dim()) +
                          " does not match domain dimension " +
                          std::to_string(domain.dim()));
  if (coeffs.q.size() != stencil.size() || coeffs.p.size() != stencil.size())
    throw ValidationError("problem: q/p entry count does not match stencil");
  auto check_vars = [&](const Expression& e, const char* name) {
    if (e.max_space_index() > domain.dim())
      throw ValidationError(std::string("problem: coefficient '") + name +
                            "' uses x" + std::to_string(e.max_space_index()) +
                            " beyond dimension " + std::to_string(domain.dim()));
  };
  for (std::size_t i = 0; i < stencil.size(); ++i) {
    check_vars(coeffs.q[i], "q");
    check_vars(coeffs.p[i], "p");
  }
  check_vars(coeffs.c, "c");
  check_vars(coeffs.f, "f");
  check_vars(coeffs.g, "g");
  if (coeffs.g.uses_time())
    throw ValidationError("problem: boundary/initial data g must not use t");
  if (!(constants.c0 > 0.0)) throw ValidationError("problem: c0 must be > 0");
  if (!(constants.delta > 0.0 && constants.delta <= 1.0))
    throw ValidationError("problem: delta must lie in (0,1]");
  if (!(constants.K1 >= 1.0)) throw ValidationError("problem: K1 must be >= 1");
  if (constants.m < 0) throw ValidationError("problem: m must be >= 0");
  if (!(constants.T > 0.0)) throw ValidationError("problem: T must be > 0");
  if (constants.theta < 0.0) throw ValidationError("problem: theta must be >= 0");
}

bool Problem::time_independent() const {
  for (const auto& e : coeffs.q)
    if (e.uses_time()) return false;
  for (const auto& e : coeffs.p)
    if (e.uses_time()) return false;
  return !coeffs.c.uses_time() && !coeffs.f.uses_time();
}

Problem Problem::with_h(double new_h) const {
  Problem p = *this;
  p.domain = Domain(domain.kind(), domain.lower(), domain.upper(), new_h);
  return p;
}

Problem Problem::add_theta(double theta) const {
  if (!stencil.symmetric_set())
    throw ValidationError(
        "add_theta requires a symmetric stencil set (Lambda_1 = -Lambda_1)");
  Problem out = *this;
  for (auto& pe : out.coeffs.p) pe = pe + Expression::number(theta);
  out.constants.theta += theta;
  return out;
}

double chi(const Problem& prob, std::size_t lambda_index, double t,
           std::span<const double> x) {
  return prob.coeffs.q[lambda_index].evaluate(t, x) +
         prob.domain.h() * prob.coeffs.p[lambda_index].evaluate(t, x);
}

AssembledOperator::AssembledOperator(const Problem& prob, bool tabulate)
    : prob_(&prob), tabulate_(tabulate) {
  const Domain& dom = prob.domain;
  const double h = dom.h();
  inv_h2_ = 1.0 / (h * h);
  Margins m = interior_margins(dom, prob.stencil);
  // neighbor tables and point coordinates, one pass over the interior
  neighbors_.resize(prob.stencil.size());
  std::vector<int> nb(static_cast<std::size_t>(dom.dim()));
  for_each_interior(dom, m, [&](std::span<const int> idx, std::size_t flat) {
    interior_.push_back(flat);
    points_.push_back(dom.point(flat));
    for (std::size_t li = 0; li < prob.stencil.size(); ++li) {
      const auto& lam = prob.stencil.vectors[li];
      for (std::size_t k = 0; k < nb.size(); ++k) {
        int v = idx[k] + lam[k];
        if (dom.kind() == DomainKind::periodic) {
          v %= dom.extents()[k];
          if (v < 0) v += dom.extents()[k];
        }
        nb[k] = v;
      }
      neighbors_[li].push_back(dom.flat_index(nb));
    }
  });
  if (interior_.empty())
    throw ValidationError("problem: the interior set is empty");
  const double hh = h;
  for (std::size_t li = 0; li < prob.stencil.size(); ++li) {
    Field f;
    f.e = prob.coeffs.q[li] + Expression::number(hh) * prob.coeffs.p[li];
    f.time_dep = f.e.uses_time();
    chi_.push_back(std::move(f));
  }
  c_.e = prob.coeffs.c;
  c_.time_dep = c_.e.uses_time();
  f_.e = prob.coeffs.f;
  f_.time_dep = f_.e.uses_time();
}

void AssembledOperator::ensure(Field& f, double t) {
  if (f.cached && (!f.time_dep || f.cached_t == t)) return;
  f.values.resize(interior_.size());
  for (std::size_t k = 0; k < interior_.size(); ++k)
    f.values[k] = f.e.evaluate(t, points_[k]);
  f.cached = true;
  f.cached_t = t;
}

double AssembledOperator::field_at(Field& f, std::size_t k, double t) {
  if (!tabulate_) return f.e.evaluate(t, points_[k]);
  ensure(f, t);
  return f.values[k];
}

double AssembledOperator::chi_at(std::size_t li, std::size_t k, double t) {
  return field_at(chi_[li], k, t);
}
double AssembledOperator::c_at(std::size_t k, double t) {
  return field_at(c_, k, t);
}
double AssembledOperator::f_at(std::size_t k, double t) {
  return field_at(f_, k, t);
}

void AssembledOperator::apply_L0(const GridFunction& u, double t,
                                 GridFunction& out) {
  if (u.domain() != prob_->domain || out.domain() != prob_->domain)
    throw ValidationError("apply_L0: grid function domain mismatch");
  std::fill(out.values().begin(), out.values().end(), 0.0);
  if (tabulate_) {
    for (auto& f : chi_) ensure(f, t);
    for (std::size_t k = 0; k < interior_.size(); ++k) {
      const std::size_t i = interior_[k];
      double acc = 0.0;
      for (std::size_t li = 0; li < chi_.size(); ++li)
        acc += chi_[li].values[k] * (u[neighbors_[li][k]] - u[i]);
      out[i] = acc * inv_h2_;
    }
    return;
  }
  for (std::size_t k = 0; k < interior_.size(); ++k) {
    const std::size_t i = interior_[k];
    double acc = 0.0;
    for (std::size_t li = 0; li < chi_.size(); ++li)
      acc += chi_at(li, k, t) * (u[neighbors_[li][k]] - u[i]);
    out[i] = acc * inv_h2_;
  }
}

void AssembledOperator::apply_L(const GridFunction& u, double t,
                                GridFunction& out) {
  apply_L0(u, t, out);
  for (std::size_t k = 0; k < interior_.size(); ++k) {
    const std::size_t i = interior_[k];
    out[i] -= c_at(k, t) * u[i];
  }
}

double AssembledOperator::sup_row_sum(double t) {
  double s = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < interior_.size(); ++k) {
    double row = c_at(k, t);
    for (std::size_t li = 0; li < chi_.size(); ++li)
      row += chi_at(li, k, t) * inv_h2_;
    s = std::max(s, row);
  }
  return s;
}

GridFunction apply_L0(const Problem& prob, const GridFunction& u, double t) {
  AssembledOperator op(prob, /*tabulate=*/false);
  GridFunction out(prob.domain);
  op.apply_L0(u, t, out);
  out.set_time(t);
  return out;
}

GridFunction apply_L(const Problem& prob, const GridFunction& u, double t) {
  AssembledOperator op(prob, /*tabulate=*/false);
  GridFunction out(prob.domain);
  op.apply_L(u, t, out);
  out.set_time(t);
  return out;
}

LimitCoefficients limit_coefficients(const Problem& prob, double t,
                                     std::span<const double> x) {
  const auto d = static_cast<std::size_t>(prob.domain.dim());
  LimitCoefficients lc;
  lc.a.assign(d * d, 0.0);
  lc.b.assign(d, 0.0);
  for (std::size_t li = 0; li < prob.stencil.size(); ++li) {
    const auto& lam = prob.stencil.vectors[li];
    double qv = prob.coeffs.q[li].evaluate(t, x);
    double pv = prob.coeffs.p[li].evaluate(t, x);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j)
        lc.a[i * d + j] += 0.5 * qv * lam[i] * lam[j];
      lc.b[i] += pv * lam[i];
    }
  }
  lc.c = prob.coeffs.c.evaluate(t, x);
  return lc;
}

Expression continuum_operator_applied(const Problem& prob,
                                      const Expression& phi) {
  const auto d = static_cast<std::size_t>(prob.domain.dim());
  Expression zero;
  // first and second symbolic derivatives of phi
  std::vector<Expression> dphi;
  for (std::size_t i = 1; i <= d; ++i)
    dphi.push_back(phi.differentiate(static_cast<int>(i)));
  Expression acc = zero;
  for (std::size_t i = 1; i <= d; ++i) {
    for (std::size_t j = 1; j <= d; ++j) {
      // a_ij = 1/2 sum_lambda q_lambda lambda_i lambda_j as an expression
      Expression aij = zero;
      for (std::size_t li = 0; li < prob.stencil.size(); ++li) {
        double w = 0.5 * prob.stencil.vectors[li][i - 1] *
                   prob.stencil.vectors[li][j - 1];
        if (w != 0.0) aij = aij + Expression::number(w) * prob.coeffs.q[li];
      }
      if (!aij.is_zero_literal())
        acc = acc + aij * dphi[i - 1].differentiate(static_cast<int>(j));
    }
    Expression bi = zero;
    for (std::size_t li = 0; li < prob.stencil.size(); ++li) {
      double w = prob.stencil.vectors[li][i - 1];
      if (w != 0.0) bi = bi + Expression::number(w) * prob.coeffs.p[li];
    }
    if (!bi.is_zero_literal()) acc = acc + bi * dphi[i - 1];
  }
  return acc - prob.coeffs.c * phi;
}

Expression manufacture_f(const Problem& prob, const Expression& v) {
  return Expression::number(0.0) - continuum_operator_applied(prob, v);
}

ConvergenceReport consistency_error(const Problem& prob, const Expression& phi,
                                    std::span<const double> h_list) {
  if (h_list.size() < 2)
    throw ValidationError("consistency_error: need at least two h values");
  Expression limit = continuum_operator_applied(prob, phi);
  ConvergenceReport report;
  const double t = 0.0;
  for (double h : h_list) {
    Problem ph = prob.with_h(h);
    const Domain& dom = ph.domain;
    Margins m = interior_margins(dom, ph.stencil);
    const double inv_h2 = 1.0 / (h * h);
    double sup = 0.0;
    std::vector<double> x(static_cast<std::size_t>(dom.dim()));
    std::vector<double> xs(x.size());
    for_each_interior(dom, m, [&](std::span<const int>, std::size_t flat) {
      dom.point(flat, x);
      double lh = 0.0;
      double phi_x = phi.evaluate(t, x);
      for (std::size_t li = 0; li < ph.stencil.size(); ++li) {
        const auto& lam = ph.stencil.vectors[li];
        for (std::size_t k = 0; k < x.size(); ++k) xs[k] = x[k] + h * lam[k];
        lh += chi(ph, li, t, x) * (phi.evaluate(t, xs) - phi_x);
      }
      lh = lh * inv_h2 - ph.coeffs.c.evaluate(t, x) * phi_x;
      sup = std::max(sup, std::fabs(lh - limit.evaluate(t, x)));
    });
    report.rows.push_back({h, sup});
  }
  fit_order(report);
  return report;
}

void fit_order(ConvergenceReport& report) {
  const auto& rows = report.rows;
  if (rows.size() < 2) {
    report.fitted_order = std::numeric_limits<double>::quiet_NaN();
    report.diagnostic = "order fit needs at least two refinement levels";
    return;
  }
  double maxerr = 0.0;
  for (const auto& r : rows) maxerr = std::max(maxerr, r.error);
  if (maxerr <= 1e-12) {
    report.fitted_order = std::numeric_limits<double>::infinity();
    report.diagnostic = "exact to roundoff at every h";
    return;
  }
  // monotone: error must not increase as h decreases (rows in decreasing h)
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].h >= rows[i - 1].h)
      throw ValidationError("fit_order: h values must be strictly decreasing");
    if (rows[i].error > rows[i - 1].error * (1.0 + 1e-9) + 1e-14) {
      report.fitted_order = std::numeric_limits<double>::quiet_NaN();
      report.diagnostic = "non-monotone error sequence at h = " +
                          std::to_string(rows[i].h);
      return;
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = 0;
  for (const auto& r : rows) {
    double lx = std::log(r.h);
    double ly = std::log(std::max(r.error, 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    n += 1;
  }
  report.fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<std::string> smoothness_warnings(const Problem& prob) {
  std::vector<std::string> out;
  if (prob.constants.m < 1) return out;
  auto scan = [&](const Expression& e, const std::string& name) {
    if (e.has_nonsmooth())
      out.push_back("coefficient " + name +
                    " uses a nonsmooth primitive while smoothness order m=" +
                    std::to_string(prob.constants.m) +
                    " is declared; extrapolation order may degrade");
  };
  for (std::size_t i = 0; i < prob.stencil.size(); ++i) {
    scan(prob.coeffs.q[i], "q" + vec_label(prob.stencil.vectors[i]));
    scan(prob.coeffs.p[i], "p" + vec_label(prob.stencil.vectors[i]));
  }
  scan(prob.coeffs.c, "c");
  scan(prob.coeffs.f, "f");
  return out;
}

} // namespace stencil_lab
