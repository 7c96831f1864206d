#include "stencil_lab/richardson.hpp"

#include "stencil_lab/errors.hpp"
#include "stencil_lab/threads.hpp"

#include <cmath>
#include <limits>

namespace stencil_lab {

ExtrapolationWeights vandermonde_weights(int k) {
  if (k < 0 || k > 12)
    throw ValidationError("vandermonde_weights: k must lie in [0, 12]");
  const std::size_t n = static_cast<std::size_t>(k) + 1;
  // Solve V^T b = e_1 so that sum_i b_i V[i][j] = delta_{0j}.
  std::vector<double> A(n * n);
  std::vector<double> rhs(n, 0.0);
  rhs[0] = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      A[i * n + j] = std::pow(2.0, -static_cast<double>(i * j)); // V^T[j][i]
  // A equals V^T (V is symmetric in i*j); eliminate with partial pivoting
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(A[r * n + col]) > std::fabs(A[piv * n + col])) piv = r;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A[col * n + j], A[piv * n + j]);
      std::swap(rhs[col], rhs[piv]);
    }
    double d = A[col * n + col];
    if (d == 0.0) throw ValidationError("vandermonde_weights: singular system");
    for (std::size_t r = col + 1; r < n; ++r) {
      double w = A[r * n + col] / d;
      if (w == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) A[r * n + j] -= w * A[col * n + j];
      rhs[r] -= w * rhs[col];
    }
  }
  std::vector<double> b(n);
  for (std::size_t i = n; i-- > 0;) {
    double v = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j) v -= A[i * n + j] * b[j];
    b[i] = v / A[i * n + i];
  }
  // verify against the defining system
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      s += b[i] * std::pow(2.0, -static_cast<double>(i * j));
    double want = j == 0 ? 1.0 : 0.0;
    if (std::fabs(s - want) > 1e-10)
      throw ValidationError(
          "vandermonde_weights: verification residual exceeds 1e-10");
  }
  return {k, std::move(b)};
}

GridFunction extrapolate(const Problem& prob, int k, double tol) {
  ExtrapolationWeights w = vandermonde_weights(k);
  const double level_tol = tol * std::pow(4.0, -k);
  std::vector<GridFunction> levels;
  levels.reserve(w.b.size());
  for (int j = 0; j <= k; ++j)
    levels.emplace_back(prob.domain); // placeholders, overwritten below
  parallel_for_index(w.b.size(), [&](std::size_t j) {
    Problem pj = prob.with_h(prob.domain.h() / std::pow(2.0, static_cast<double>(j)));
    EllipticOptions opts;
    opts.tol = level_tol;
    levels[j] = solve_elliptic(pj, opts).u;
  });
  GridFunction out(prob.domain, 0.0);
  // coarse point i maps to fine index i * 2^j on the same box corner
  const Domain& coarse = prob.domain;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const Domain& fine = levels[j].domain();
    const long factor = 1L << j;
    std::vector<int> fidx(static_cast<std::size_t>(coarse.dim()));
    for_each_index(coarse, [&](std::span<const int> idx, std::size_t flat) {
      for (std::size_t a = 0; a < fidx.size(); ++a)
        fidx[a] = idx[a] * static_cast<int>(factor);
      out[flat] += w.b[j] * levels[j][fine.flat_index(fidx)];
    });
  }
  return out;
}

double observed_order(std::span<const std::pair<double, double>> levels) {
  if (levels.size() < 3)
    throw ValidationError("observed_order: need at least three levels");
  ConvergenceReport rep;
  for (const auto& [h, e] : levels) rep.rows.push_back({h, e});
  double maxerr = 0.0;
  for (const auto& r : rep.rows) maxerr = std::max(maxerr, r.error);
  if (maxerr <= 1e-14) return std::numeric_limits<double>::infinity();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (const auto& r : rep.rows) {
    if (r.h <= 0.0 || r.error < 0.0)
      throw ValidationError("observed_order: h must be > 0 and errors >= 0");
    double lx = std::log(r.h);
    double ly = std::log(std::max(r.error, 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    n += 1;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace stencil_lab
