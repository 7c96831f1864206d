#pragma once

#include <string>

#include "stencil_lab/operators.hpp"

/// Symmetric 1D problem with Lambda_1 = {+1, -1}, shared q, optional drift
/// pair. Tests tweak the returned problem's constants directly.
inline stencil_lab::Problem prob1d(stencil_lab::DomainKind kind, double lo,
                                   double hi, double h, const std::string& q,
                                   const std::string& c, const std::string& f,
                                   const std::string& g = "0",
                                   const std::string& p_plus = "0",
                                   const std::string& p_minus = "0") {
  using namespace stencil_lab;
  Domain dom(kind, {lo}, {hi}, h);
  Stencil st;
  st.vectors = {{1}, {-1}};
  st.tau = {1.0, 1.0};
  st.tau0 = 0.0;
  CoefficientSet co;
  co.q = {Expression::parse(q), Expression::parse(q)};
  co.p = {Expression::parse(p_plus), Expression::parse(p_minus)};
  co.c = Expression::parse(c);
  co.f = Expression::parse(f);
  co.g = Expression::parse(g);
  Problem prob{std::move(dom), std::move(st), std::move(co), {}};
  prob.validate();
  return prob;
}

/// 1D problem on an arbitrary shift set, one q string per shift, p = 0.
inline stencil_lab::Problem multi1d(stencil_lab::DomainKind kind, double lo,
                                    double hi, double h,
                                    const std::vector<int>& lambdas,
                                    const std::vector<std::string>& qs,
                                    const std::string& c,
                                    const std::string& f) {
  using namespace stencil_lab;
  Domain dom(kind, {lo}, {hi}, h);
  Stencil st;
  CoefficientSet co;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    st.vectors.push_back({lambdas[i]});
    st.tau.push_back(1.0);
    co.q.push_back(Expression::parse(qs[i]));
    co.p.push_back(Expression());
  }
  st.tau0 = 0.0;
  co.c = Expression::parse(c);
  co.f = Expression::parse(f);
  co.g = Expression();
  Problem prob{std::move(dom), std::move(st), std::move(co), {}};
  prob.validate();
  return prob;
}

/// One-sided 1D problem with Lambda_1 = {+1}.
inline stencil_lab::Problem upwind1d(stencil_lab::DomainKind kind, double lo,
                                     double hi, double h, const std::string& q,
                                     const std::string& p,
                                     const std::string& c,
                                     const std::string& f,
                                     const std::string& g = "0") {
  using namespace stencil_lab;
  Domain dom(kind, {lo}, {hi}, h);
  Stencil st;
  st.vectors = {{1}};
  st.tau = {1.0};
  st.tau0 = 0.0;
  CoefficientSet co;
  co.q = {Expression::parse(q)};
  co.p = {Expression::parse(p)};
  co.c = Expression::parse(c);
  co.f = Expression::parse(f);
  co.g = Expression::parse(g);
  Problem prob{std::move(dom), std::move(st), std::move(co), {}};
  prob.validate();
  return prob;
}
