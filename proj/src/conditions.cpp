#include "stencil_lab/conditions.hpp"

#include "stencil_lab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <utility>

namespace stencil_lab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num_text(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string vec_text(std::span<const int> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  s += ")";
  return s;
}

std::string dvec_text(std::span<const double> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += num_text(v[i]);
  }
  s += ")";
  return s;
}

std::vector<double> time_samples(const Problem& prob, int requested) {
  if (prob.time_independent()) return {0.0};
  const int n = std::max(2, requested);
  std::vector<double> ts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    ts[static_cast<std::size_t>(i)] =
        prob.constants.T * static_cast<double>(i) / static_cast<double>(n - 1);
  return ts;
}

/// Tracks the worst (smallest) margin together with its sample location.
struct Worst {
  double margin = kInf;
  double t = 0.0;
  std::vector<double> x;
  std::string witness;

  void offer(double m, double at_t, std::span<const double> at_x,
             std::string w = {}) {
    if (m < margin) {
      margin = m;
      t = at_t;
      x.assign(at_x.begin(), at_x.end());
      witness = std::move(w);
    }
  }
};

CheckRecord finish(std::string name, const Worst& w, double tol,
                   std::string note = {}) {
  CheckRecord r;
  r.name = std::move(name);
  r.margin = w.margin;
  r.tolerance = tol;
  r.verdict = (w.margin >= -tol) ? Verdict::pass : Verdict::fail;
  r.t = w.t;
  r.x = w.x;
  r.witness = w.witness;
  r.note = std::move(note);
  return r;
}

CheckRecord skipped(std::string name, std::string note) {
  CheckRecord r;
  r.name = std::move(name);
  r.verdict = Verdict::not_applicable;
  r.note = std::move(note);
  return r;
}

/// Visits every (t, x) of the full grid crossed with the t-samples.
template <class Fn>
void for_each_sample(const Problem& prob, const SampleSpec& spec, Fn&& fn) {
  const auto ts = time_samples(prob, spec.t_samples);
  std::vector<double> x(static_cast<std::size_t>(prob.domain.dim()));
  for (double t : ts)
    for (std::size_t flat = 0; flat < prob.domain.size(); ++flat) {
      prob.domain.point(flat, x);
      fn(t, std::span<const double>(x));
    }
}

/// Visits (t, x) with x restricted to points whose one-step stencil shifts
/// stay inside a box domain (every point for periodic domains).
template <class Fn>
void for_each_interior_sample(const Problem& prob, const SampleSpec& spec,
                              Fn&& fn) {
  const auto ts = time_samples(prob, spec.t_samples);
  const Margins m = interior_margins(prob.domain, prob.stencil);
  std::vector<double> x(static_cast<std::size_t>(prob.domain.dim()));
  for (double t : ts)
    for_each_interior(prob.domain, m,
                      [&](std::span<const int>, std::size_t flat) {
                        prob.domain.point(flat, x);
                        fn(t, std::span<const double>(x));
                      });
}

/// Sampled facts needed by the (S)-gated checkers.
struct SymmetryFacts {
  bool set_symmetric = false;
  double q_asym = 0.0; // sup |q_lambda - q_{-lambda}|
  double min_q = kInf;
  double min_p = kInf;
};

SymmetryFacts sample_symmetry_facts(const Problem& prob,
                                    const SampleSpec& spec) {
  SymmetryFacts facts;
  facts.set_symmetric = prob.stencil.symmetric_set();
  const std::size_t n = prob.stencil.size();
  for_each_sample(prob, spec, [&](double t, std::span<const double> x) {
    for (std::size_t li = 0; li < n; ++li) {
      const double qv = prob.coeffs.q[li].evaluate(t, x);
      const double pv = prob.coeffs.p[li].evaluate(t, x);
      facts.min_q = std::min(facts.min_q, qv);
      facts.min_p = std::min(facts.min_p, pv);
      if (facts.set_symmetric) {
        const auto ni = prob.stencil.negation_index(li);
        const double qn = prob.coeffs.q[*ni].evaluate(t, x);
        facts.q_asym = std::max(facts.q_asym, std::abs(qv - qn));
      }
    }
  });
  return facts;
}

/// One-step difference-quotient table at a sample point:
/// dr[li*n+mu] = (r_mu(x + h lambda_li) - r_mu(x)) / h with r = sqrt(max(q,0)),
/// dp likewise for p, plus chi and c at the point itself.
struct QuotientTable {
  std::vector<double> dr, dp, chi_v;
  double c = 0.0;
};

void fill_quotients(const Problem& prob, double t, std::span<const double> x,
                    QuotientTable& tb) {
  const std::size_t n = prob.stencil.size();
  const double h = prob.domain.h();
  const std::size_t d = x.size();
  tb.dr.assign(n * n, 0.0);
  tb.dp.assign(n * n, 0.0);
  tb.chi_v.assign(n, 0.0);
  std::vector<double> r0(n), p0(n), y(d);
  for (std::size_t mu = 0; mu < n; ++mu) {
    const double qv = prob.coeffs.q[mu].evaluate(t, x);
    const double pv = prob.coeffs.p[mu].evaluate(t, x);
    r0[mu] = std::sqrt(std::max(qv, 0.0));
    p0[mu] = pv;
    tb.chi_v[mu] = qv + h * pv;
  }
  for (std::size_t li = 0; li < n; ++li) {
    const auto& lam = prob.stencil.vectors[li];
    for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + h * lam[i];
    for (std::size_t mu = 0; mu < n; ++mu) {
      const double qs = prob.coeffs.q[mu].evaluate(t, y);
      const double ps = prob.coeffs.p[mu].evaluate(t, y);
      tb.dr[li * n + mu] = (std::sqrt(std::max(qs, 0.0)) - r0[mu]) / h;
      tb.dp[li * n + mu] = (ps - p0[mu]) / h;
    }
  }
  tb.c = prob.coeffs.c.evaluate(t, x);
}

std::string stencil_order_text(const Stencil& st) {
  std::string s;
  for (std::size_t i = 0; i < st.size(); ++i) {
    if (i) s += " ";
    s += vec_text(st.vectors[i]);
  }
  return s;
}

} // namespace

bool AssumptionReport::all_pass() const {
  for (const auto& r : records)
    if (r.verdict == Verdict::fail) return false;
  return true;
}

bool AssumptionReport::any_fail() const { return !all_pass(); }

const char* to_string(Verdict v) {
  switch (v) {
  case Verdict::pass: return "pass";
  case Verdict::fail: return "fail";
  case Verdict::not_applicable: return "not-applicable";
  }
  return "?";
}

CheckRecord check_positivity(const Problem& prob, const SampleSpec& spec) {
  Worst w;
  const std::size_t n = prob.stencil.size();
  for_each_sample(prob, spec, [&](double t, std::span<const double> x) {
    for (std::size_t li = 0; li < n; ++li)
      w.offer(chi(prob, li, t, x), t, x,
              "chi_" + vec_text(prob.stencil.vectors[li]));
    w.offer(prob.coeffs.c.evaluate(t, x) - prob.constants.c0, t, x, "c - c0");
  });
  return finish("positivity", w, 1e-12);
}

CheckRecord check_symmetry_S(const Problem& prob, const SampleSpec& spec) {
  const std::string name = "symmetry";
  if (!prob.stencil.symmetric_set()) {
    CheckRecord r;
    r.name = name;
    r.verdict = Verdict::fail;
    r.margin = -1.0;
    r.witness = "Lambda_1 set";
    r.note = "Lambda_1 is not closed under negation";
    return r;
  }
  Worst w;
  const std::size_t n = prob.stencil.size();
  for_each_sample(prob, spec, [&](double t, std::span<const double> x) {
    for (std::size_t li = 0; li < n; ++li) {
      const auto ni = prob.stencil.negation_index(li);
      const double diff = std::abs(prob.coeffs.q[li].evaluate(t, x) -
                                   prob.coeffs.q[*ni].evaluate(t, x));
      w.offer(-diff, t, x,
              "q_" + vec_text(prob.stencil.vectors[li]) + " - q_" +
                  vec_text(prob.stencil.vectors[*ni]));
    }
  });
  return finish(name, w, 1e-12);
}

CheckRecord check_drift_constancy(const Problem& prob, const SampleSpec& spec) {
  const std::size_t n = prob.stencil.size();
  const std::size_t d = static_cast<std::size_t>(prob.domain.dim());
  const auto ts = time_samples(prob, spec.t_samples);
  Worst w;
  double worst_spread = 0.0;
  std::vector<double> x(d), drift(d);
  for (double t : ts) {
    std::vector<double> lo(d, kInf), hi(d, -kInf);
    std::vector<double> lo_x(d * d, 0.0), hi_x(d * d, 0.0);
    double mag = 0.0;
    for (std::size_t flat = 0; flat < prob.domain.size(); ++flat) {
      prob.domain.point(flat, x);
      std::fill(drift.begin(), drift.end(), 0.0);
      for (std::size_t li = 0; li < n; ++li) {
        const double qv = prob.coeffs.q[li].evaluate(t, x);
        const auto& lam = prob.stencil.vectors[li];
        for (std::size_t i = 0; i < d; ++i) drift[i] += lam[i] * qv;
      }
      for (std::size_t i = 0; i < d; ++i) {
        mag = std::max(mag, std::abs(drift[i]));
        if (drift[i] < lo[i]) {
          lo[i] = drift[i];
          std::copy(x.begin(), x.end(), lo_x.begin() + static_cast<long>(i * d));
        }
        if (drift[i] > hi[i]) {
          hi[i] = drift[i];
          std::copy(x.begin(), x.end(), hi_x.begin() + static_cast<long>(i * d));
        }
      }
    }
    const double tol_eff = 1e-10 * (1.0 + mag);
    for (std::size_t i = 0; i < d; ++i) {
      const double spread = hi[i] - lo[i];
      const double m = tol_eff - spread;
      if (m < w.margin) worst_spread = spread;
      w.offer(m, t,
              std::span<const double>(hi_x.data() + i * d, d),
              "component " + std::to_string(i + 1));
    }
  }
  CheckRecord r = finish("drift-constancy", w, 0.0);
  r.note = "worst spread of sum_lambda lambda q_lambda = " +
           num_text(worst_spread) + " (tolerance 1e-10 * (1 + magnitude))";
  return r;
}

std::vector<std::vector<double>> linear_function_basis(const Stencil& stencil) {
  const std::size_t n = stencil.size();
  const std::size_t d = static_cast<std::size_t>(stencil.dim());
  std::vector<std::vector<double>> rows;
  std::vector<int> nu(d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      bool zero = true;
      for (std::size_t k = 0; k < d; ++k) {
        nu[k] = stencil.vectors[i][k] + stencil.vectors[j][k];
        if (nu[k] != 0) zero = false;
      }
      std::vector<double> row(n, 0.0);
      if (zero) { // phi(lambda) + phi(mu) = phi(0) = 0
        row[i] += 1.0;
        row[j] += 1.0;
        rows.push_back(std::move(row));
      } else if (auto k = stencil.index_of(nu)) {
        row[*k] += 1.0; // phi(nu) - phi(lambda) - phi(mu) = 0
        row[i] -= 1.0;
        row[j] -= 1.0;
        rows.push_back(std::move(row));
      }
    }

  // Reduced row echelon form with partial pivoting; pivot tolerance 1e-12.
  std::vector<int> pivot_row_of_col(n, -1);
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < rows.size(); ++col) {
    std::size_t best = rank;
    double mag = std::abs(rows[rank][col]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r)
      if (std::abs(rows[r][col]) > mag) {
        best = r;
        mag = std::abs(rows[r][col]);
      }
    if (mag < 1e-12) continue;
    std::swap(rows[rank], rows[best]);
    const double piv = rows[rank][col];
    for (std::size_t c2 = 0; c2 < n; ++c2) rows[rank][c2] /= piv;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank) continue;
      const double f = rows[r][col];
      if (f == 0.0) continue;
      for (std::size_t c2 = 0; c2 < n; ++c2) rows[r][c2] -= f * rows[rank][c2];
    }
    pivot_row_of_col[col] = static_cast<int>(rank);
    ++rank;
  }

  std::vector<std::vector<double>> basis;
  for (std::size_t col = 0; col < n; ++col) {
    if (pivot_row_of_col[col] >= 0) continue;
    std::vector<double> v(n, 0.0);
    v[col] = 1.0;
    for (std::size_t c2 = 0; c2 < n; ++c2)
      if (pivot_row_of_col[c2] >= 0)
        v[c2] = -rows[static_cast<std::size_t>(pivot_row_of_col[c2])][col];
    // normalize: largest-magnitude entry becomes +1
    std::size_t arg = 0;
    for (std::size_t c2 = 1; c2 < n; ++c2)
      if (std::abs(v[c2]) > std::abs(v[arg])) arg = c2;
    const double scale = v[arg];
    for (auto& e : v) e /= scale;
    basis.push_back(std::move(v));
  }
  return basis;
}

CheckRecord check_linearity_orthogonality(const Problem& prob,
                                          const SampleSpec& spec) {
  const std::string name = "linearity-orthogonality";
  const auto basis = linear_function_basis(prob.stencil);
  if (basis.empty()) {
    CheckRecord r;
    r.name = name;
    r.verdict = Verdict::pass;
    r.margin = 0.0;
    r.tolerance = 1e-10;
    r.note = "the linear-function space on Lambda_1 u {0} is trivial";
    return r;
  }
  const std::size_t n = prob.stencil.size();
  const int d = prob.domain.dim();
  std::vector<std::vector<Expression>> dq(n);
  try {
    for (std::size_t li = 0; li < n; ++li)
      for (int i = 1; i <= d; ++i)
        dq[li].push_back(prob.coeffs.q[li].differentiate(i));
  } catch (const DifferentiationError& e) {
    return skipped(name, std::string("cannot differentiate q: ") + e.what());
  }
  Worst w;
  std::size_t skipped_samples = 0, total = 0;
  for_each_sample(prob, spec, [&](double t, std::span<const double> x) {
    ++total;
    try {
      for (int i = 0; i < d; ++i) {
        std::vector<double> dqv(n);
        for (std::size_t li = 0; li < n; ++li)
          dqv[li] = dq[li][static_cast<std::size_t>(i)].evaluate(t, x);
        for (const auto& phi : basis) {
          double s = 0.0;
          for (std::size_t li = 0; li < n; ++li) s += dqv[li] * phi[li];
          w.offer(-std::abs(s), t, x,
                  "phi = " + dvec_text(phi) + " on " +
                      stencil_order_text(prob.stencil) + ", axis x" +
                      std::to_string(i + 1));
        }
      }
    } catch (const EvalError&) {
      ++skipped_samples;
    }
  });
  std::string note =
      std::to_string(basis.size()) + " basis function(s) tested";
  if (skipped_samples > 0) {
    if (skipped_samples == total)
      return skipped(name, "derivative evaluation failed at every sample");
    note += "; skipped " + std::to_string(skipped_samples) +
            " sample(s) where the derivative is undefined";
  }
  return finish(name, w, 1e-10, note);
}

EigenResult symmetric_eigen(std::vector<double> a, std::size_t n) {
  if (a.size() != n * n)
    throw ValidationError("symmetric_eigen: matrix size does not match n");
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  double frob = 0.0;
  for (double e : a) frob += e * e;
  frob = std::sqrt(frob);
  const double stop = 1e-15 * std::max(frob, 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (std::sqrt(2.0 * off) <= stop) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) <= stop / static_cast<double>(n * n)) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e154)
          t = 1.0 / (2.0 * theta);
        else
          t = (theta >= 0 ? 1.0 : -1.0) /
              (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        a[p * n + p] -= t * apq;
        a[q * n + q] += t * apq;
        a[p * n + q] = a[q * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = a[p * n + k] = akp - s * (akq + tau * akp);
          a[k * n + q] = a[q * n + k] = akq + s * (akp - tau * akq);
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = vkp - s * (vkq + tau * vkp);
          v[k * n + q] = vkq + s * (vkp - tau * vkq);
        }
      }
  }
  // sort eigenvalues ascending, permute eigenvector columns to match
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i * n + i] < a[j * n + j];
  });
  EigenResult out;
  out.values.resize(n);
  out.vectors.assign(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a[order[j] * n + order[j]];
    for (std::size_t k = 0; k < n; ++k)
      out.vectors[k * n + j] = v[k * n + order[j]];
  }
  return out;
}

CheckRecord check_quadratic_form(const Problem& prob, const SampleSpec& spec,
                                 const QuadraticFormBudgets& budgets) {
  const std::string name = "quadratic-form";
  const double delta = prob.constants.delta;
  if (!(delta < 0.25))
    return skipped(name, "requires delta in (0, 1/4); delta = " +
                             num_text(delta));
  const SymmetryFacts facts = sample_symmetry_facts(prob, spec);
  if (!facts.set_symmetric)
    return skipped(name, "requires Lambda_1 = -Lambda_1");
  if (facts.q_asym > 1e-12)
    return skipped(name, "requires q_lambda = q_{-lambda}; sampled asymmetry " +
                             num_text(facts.q_asym));
  if (facts.min_q < -1e-12)
    return skipped(name, "requires q >= 0; sampled min q = " +
                             num_text(facts.min_q));
  if (facts.min_p < -1e-12)
    return skipped(name, "requires p >= 0; sampled min p = " +
                             num_text(facts.min_p));

  const std::size_t n = prob.stencil.size();
  const double h = prob.domain.h();
  const double inv_h2 = 1.0 / (h * h);
  const double K1 = prob.constants.K1;
  std::vector<std::size_t> neg(n);
  for (std::size_t li = 0; li < n; ++li)
    neg[li] = *prob.stencil.negation_index(li);

  Worst w;                 // min eigenvalue of B - A
  Worst wr, wp;            // budget slack margins
  std::size_t skipped_samples = 0, total = 0;
  QuotientTable tb;
  std::vector<double> E(n * n);
  for_each_interior_sample(prob, spec, [&](double t, std::span<const double> x) {
    ++total;
    try {
      fill_quotients(prob, t, x, tb);
    } catch (const EvalError&) {
      ++skipped_samples;
      return;
    }
    // E = B - A as a quadratic form in xi, evaluated with m = 1
    std::fill(E.begin(), E.end(), 0.0);
    for (std::size_t li = 0; li < n; ++li) {
      double diag = (2.0 - 8.0 * delta) * tb.c + K1 * tb.chi_v[li];
      for (std::size_t mu = 0; mu < n; ++mu) {
        const double dr = tb.dr[li * n + mu];
        diag -= 10.0 / (1.0 - 4.0 * delta) * dr * dr;
        diag -= 2.0 * delta * std::abs(tb.dp[li * n + mu]);
      }
      E[li * n + li] += diag;
      // chi_lambda (xi_lambda + xi_{-lambda})^2 with weight delta/h^2
      const std::size_t ni = neg[li];
      const double pw = delta * inv_h2 * tb.chi_v[li];
      E[li * n + li] += pw;
      E[ni * n + ni] += pw;
      E[li * n + ni] += pw;
      E[ni * n + li] += pw;
      for (std::size_t ka = 0; ka < n; ++ka) {
        // J2 rank-one terms and the symmetrized cross terms
        double g = 0.0;
        for (std::size_t mu = 0; mu < n; ++mu)
          g += tb.dr[li * n + mu] * tb.dr[ka * n + mu];
        E[li * n + ka] -= 2.0 / (1.0 - 4.0 * delta) * g;
        const double c_lm =
            tb.dp[li * n + ka] + tb.dr[li * n + ka] * tb.dr[li * n + ka];
        const double c_ml =
            tb.dp[ka * n + li] + tb.dr[ka * n + li] * tb.dr[ka * n + li];
        E[li * n + ka] -= c_lm + c_ml;
      }
    }
    const EigenResult eig = symmetric_eigen(E, n);
    std::vector<double> xi(n);
    for (std::size_t k = 0; k < n; ++k) xi[k] = eig.vectors[k * n + 0];
    w.offer(eig.values[0], t, x,
            "xi = " + dvec_text(xi) + " on " +
                stencil_order_text(prob.stencil));

    // budget constraints, checked with the minimal feasible (or the
    // user-supplied uniform) budget functions
    double sum_r = 0.0, sum_p = 0.0;
    double feas_r = kInf, feas_p = kInf;
    for (std::size_t mu = 0; mu < n; ++mu) {
      double sup_r = 0.0, sup_p = 0.0;
      for (std::size_t li = 0; li < n; ++li) {
        const double allow = delta * (tb.chi_v[mu] + tb.chi_v[li]) * inv_h2;
        const double dr2 =
            tb.dr[li * n + mu] * tb.dr[li * n + mu];
        const double dpa = std::abs(tb.dp[li * n + mu]);
        if (budgets.r_lambda_mu) {
          const double r2 = *budgets.r_lambda_mu * *budgets.r_lambda_mu;
          feas_r = std::min(feas_r, r2 + allow - dr2);
          sup_r = r2;
        } else {
          sup_r = std::max(sup_r, std::max(0.0, dr2 - allow));
        }
        if (budgets.p_lambda_mu) {
          feas_p = std::min(feas_p, *budgets.p_lambda_mu + allow - dpa / delta);
          sup_p = *budgets.p_lambda_mu;
        } else {
          sup_p = std::max(sup_p, std::max(0.0, dpa / delta - allow));
        }
      }
      sum_r += sup_r;
      sum_p += sup_p;
    }
    double slack_r = 2.0 * delta * tb.c - sum_r;
    double slack_p = delta * tb.c - sum_p;
    if (budgets.r_lambda_mu) slack_r = std::min(slack_r, feas_r);
    if (budgets.p_lambda_mu) slack_p = std::min(slack_p, feas_p);
    wr.offer(slack_r, t, x);
    wp.offer(slack_p, t, x);
  });

  if (total > 0 && skipped_samples == total)
    return skipped(name, "coefficient evaluation failed at every sample");
  std::string note = "budget slack: r " + num_text(wr.margin) + ", p " +
                     num_text(wp.margin);
  if (wr.margin < -1e-9 || wp.margin < -1e-9)
    note += " (budget constraint violated)";
  if (prob.constants.m != 1)
    note += "; evaluated with m = 1 (declared m = " +
            std::to_string(prob.constants.m) + ")";
  if (skipped_samples > 0)
    note += "; skipped " + std::to_string(skipped_samples) + " sample(s)";
  return finish(name, w, 1e-9, note);
}

CheckRecord check_rough_condition(const Problem& prob, const SampleSpec& spec) {
  const std::string name = "rough-condition";
  const SymmetryFacts facts = sample_symmetry_facts(prob, spec);
  if (!facts.set_symmetric)
    return skipped(name, "requires Lambda_1 = -Lambda_1");
  if (facts.q_asym > 1e-12)
    return skipped(name, "requires q_lambda = q_{-lambda}; sampled asymmetry " +
                             num_text(facts.q_asym));
  if (facts.min_q < -1e-12)
    return skipped(name, "requires q >= 0; sampled min q = " +
                             num_text(facts.min_q));
  if (facts.min_p < -1e-12)
    return skipped(name, "requires p >= 0; sampled min p = " +
                             num_text(facts.min_p));

  const std::size_t n = prob.stencil.size();
  const double K1 = prob.constants.K1;
  Worst w;
  std::size_t skipped_samples = 0, total = 0;
  QuotientTable tb;
  for_each_interior_sample(prob, spec, [&](double t, std::span<const double> x) {
    ++total;
    try {
      fill_quotients(prob, t, x, tb);
      for (std::size_t li = 0; li < n; ++li) {
        double lhs = 0.0;
        for (std::size_t mu = 0; mu < n; ++mu)
          lhs += 10.0 * tb.dr[li * n + mu] * tb.dr[li * n + mu];
        for (std::size_t nu = 0; nu < n; ++nu) {
          double inner = 0.0;
          for (std::size_t mu = 0; mu < n; ++mu)
            inner += tb.dr[li * n + mu] * tb.dr[nu * n + mu];
          lhs += 4.0 * std::abs(inner);
        }
        for (std::size_t mu = 0; mu < n; ++mu)
          lhs += 2.0 * std::abs(tb.dp[li * n + mu] + tb.dp[mu * n + li] +
                                tb.dr[li * n + mu] * tb.dr[li * n + mu] +
                                tb.dr[mu * n + li] * tb.dr[mu * n + li]);
        const double rhs =
            tb.c + K1 * prob.coeffs.q[li].evaluate(t, x);
        w.offer(rhs - lhs, t, x,
                "lambda = " + vec_text(prob.stencil.vectors[li]));
      }
    } catch (const EvalError&) {
      ++skipped_samples;
    }
  });
  if (total > 0 && skipped_samples == total)
    return skipped(name, "coefficient evaluation failed at every sample");
  std::string note;
  if (skipped_samples > 0)
    note = "skipped " + std::to_string(skipped_samples) + " sample(s)";
  return finish(name, w, 1e-9, note);
}

CheckRecord check_explicit_1d(const Problem& prob, const SampleSpec& spec) {
  const std::string name = "explicit-1d";
  if (prob.domain.dim() != 1)
    return skipped(name, "requires d = 1");
  const std::vector<int> plus{1}, minus{-1};
  const auto ip = prob.stencil.index_of(plus);
  const auto im = prob.stencil.index_of(minus);
  if (prob.stencil.size() != 2 || !ip || !im)
    return skipped(name, "requires Lambda_1 = {+1, -1}");
  if (!prob.coeffs.q[*ip].structurally_equal(prob.coeffs.q[*im])) {
    // accept sampled equality as well
    double asym = 0.0;
    for_each_sample(prob, spec, [&](double t, std::span<const double> x) {
      asym = std::max(asym, std::abs(prob.coeffs.q[*ip].evaluate(t, x) -
                                     prob.coeffs.q[*im].evaluate(t, x)));
    });
    if (asym > 1e-12)
      return skipped(name, "requires q_1 = q_{-1}; sampled asymmetry " +
                               num_text(asym));
  }
  const Expression a = prob.coeffs.q[*ip];
  const Expression b = prob.coeffs.p[*ip] - prob.coeffs.p[*im];
  Expression r_prime, b_prime;
  try {
    r_prime = Expression::call(FuncKind::sqrt, {a}).differentiate(1);
    b_prime = b.differentiate(1);
  } catch (const DifferentiationError& e) {
    return skipped(name, std::string("cannot differentiate: ") + e.what());
  }
  const double delta = prob.constants.delta;
  const double K1 = prob.constants.K1;
  Worst w;
  std::size_t skipped_samples = 0, total = 0;
  for_each_sample(prob, spec, [&](double t, std::span<const double> x) {
    ++total;
    try {
      const double rp = r_prime.evaluate(t, x);
      const double bp = b_prime.evaluate(t, x);
      const double av = a.evaluate(t, x);
      const double lhs = 14.0 * rp * rp + bp;
      const double rhs = (1.0 - delta) * prob.coeffs.c.evaluate(t, x) + K1 * av;
      w.offer(rhs - lhs, t, x,
              "r' = " + num_text(rp) + ", b' = " + num_text(bp));
    } catch (const EvalError&) {
      ++skipped_samples;
    }
  });
  if (total > 0 && skipped_samples == total)
    return skipped(name, "derivative evaluation failed at every sample");
  std::string note;
  if (skipped_samples > 0)
    note = "skipped " + std::to_string(skipped_samples) +
           " sample(s) where the derivative is undefined";
  return finish(name, w, 1e-9, note);
}

CheckRecord check_nondegenerate_shortcut(const Problem& prob,
                                         const SampleSpec& spec) {
  const std::string name = "nondegenerate-shortcut";
  if (!prob.stencil.symmetric_set())
    return skipped(name, "requires Lambda_1 = -Lambda_1");
  const double kappa = prob.constants.kappa;
  if (!(kappa > 0.0))
    return skipped(name, "requires a nondegeneracy threshold kappa > 0");
  const std::size_t n = prob.stencil.size();
  const int d = prob.domain.dim();
  std::vector<std::vector<Expression>> dq(n);
  try {
    for (std::size_t li = 0; li < n; ++li)
      for (int i = 1; i <= d; ++i)
        dq[li].push_back(prob.coeffs.q[li].differentiate(i));
  } catch (const DifferentiationError& e) {
    return skipped(name, std::string("cannot differentiate q: ") + e.what());
  }
  Worst w;
  std::size_t skipped_samples = 0, total = 0;
  for_each_sample(prob, spec, [&](double t, std::span<const double> x) {
    ++total;
    for (std::size_t li = 0; li < n; ++li) {
      const double qv = prob.coeffs.q[li].evaluate(t, x);
      w.offer(qv - kappa, t, x,
              "q_" + vec_text(prob.stencil.vectors[li]) + " - kappa");
    }
    try {
      for (std::size_t li = 0; li < n; ++li) {
        const std::size_t ni = *prob.stencil.negation_index(li);
        for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
          const double diff = std::abs(dq[li][i].evaluate(t, x) -
                                       dq[ni][i].evaluate(t, x));
          w.offer(1e-10 - diff, t, x,
                  "D q_" + vec_text(prob.stencil.vectors[li]) + " - D q_" +
                      vec_text(prob.stencil.vectors[ni]));
        }
      }
    } catch (const EvalError&) {
      ++skipped_samples;
    }
  });
  std::string note;
  if (skipped_samples > 0)
    note = "skipped " + std::to_string(skipped_samples) +
           " sample(s) where the derivative is undefined";
  return finish(name, w, 1e-12, note);
}

std::vector<std::string> all_check_names() {
  return {"positivity",      "symmetry",
          "drift-constancy", "linearity-orthogonality",
          "quadratic-form",  "rough-condition",
          "explicit-1d",     "nondegenerate-shortcut"};
}

namespace {

CheckRecord run_one(const Problem& prob, const std::string& name,
                    const SampleSpec& spec,
                    const QuadraticFormBudgets& budgets) {
  if (name == "positivity") return check_positivity(prob, spec);
  if (name == "symmetry") return check_symmetry_S(prob, spec);
  if (name == "drift-constancy") return check_drift_constancy(prob, spec);
  if (name == "linearity-orthogonality")
    return check_linearity_orthogonality(prob, spec);
  if (name == "quadratic-form")
    return check_quadratic_form(prob, spec, budgets);
  if (name == "rough-condition") return check_rough_condition(prob, spec);
  if (name == "explicit-1d") return check_explicit_1d(prob, spec);
  if (name == "nondegenerate-shortcut")
    return check_nondegenerate_shortcut(prob, spec);
  throw ValidationError("unknown check name '" + name + "'");
}

} // namespace

AssumptionReport run_checks(const Problem& prob,
                            const std::vector<std::string>& names,
                            const SampleSpec& spec, bool h_sweep,
                            const QuadraticFormBudgets& budgets) {
  prob.validate();
  std::vector<std::string> expanded;
  for (const auto& n : names) {
    if (n == "all") {
      const auto all = all_check_names();
      expanded.insert(expanded.end(), all.begin(), all.end());
    } else {
      expanded.push_back(n);
    }
  }
  if (expanded.empty()) expanded = all_check_names();

  std::vector<double> hs{prob.domain.h()};
  if (h_sweep) {
    hs.push_back(prob.domain.h() / 2.0);
    hs.push_back(prob.domain.h() / 4.0);
  }
  AssumptionReport report;
  for (double h : hs) {
    const Problem at_h = (h == prob.domain.h()) ? prob : prob.with_h(h);
    for (const auto& n : expanded) {
      CheckRecord rec = run_one(at_h, n, spec, budgets);
      if (h_sweep) rec.name += " [h=" + num_text(h) + "]";
      report.records.push_back(std::move(rec));
    }
  }
  return report;
}

} // namespace stencil_lab
