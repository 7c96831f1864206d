#pragma once

#include "stencil_lab/elliptic.hpp"

#include <span>
#include <utility>

namespace stencil_lab {

/// Weights (b_0, .., b_k) of the mesh-halving extrapolant
/// v_h = sum_j b_j u_{h/2^j}: the first row of the inverse of the
/// (k+1)x(k+1) matrix V with V[i][j] = 2^{-ij} (0-based), solved by
/// Gaussian elimination with partial pivoting and verified against the
/// defining system to 1e-10. Always sums to 1. k in [0, 12].
struct ExtrapolationWeights {
  int k = 0;
  std::vector<double> b;
};

ExtrapolationWeights vandermonde_weights(int k);

/// Solves the elliptic problem at h, h/2, .., h/2^k (each level to
/// tolerance tol * 4^-k; levels run concurrently) and combines the
/// solutions with the weights above at the points of the h-lattice.
/// k = 0 reduces to solve_elliptic at h.
GridFunction extrapolate(const Problem& prob, int k, double tol);

/// Least-squares slope of log(error) against log(h). Needs >= 3 levels
/// (ValidationError otherwise); +infinity when every error is at roundoff
/// (exactness). Pairs are (h, error) with h strictly decreasing.
double observed_order(std::span<const std::pair<double, double>> levels);

} // namespace stencil_lab
