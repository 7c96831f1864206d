#pragma once

#include "stencil_lab/conditions.hpp"
#include "stencil_lab/report.hpp"

#include <span>

namespace stencil_lab {

enum class StudyMode { parabolic, elliptic };

struct GradientStudyOptions {
  StudyMode mode = StudyMode::parabolic;
  /// Residual target of the Gauss-Seidel solve in elliptic mode.
  double elliptic_tol = 1e-10;
  /// Sampling density for F1 when f depends on t.
  SampleSpec samples{};
};

/// Sampled sup over the grid (crossed with a t-grid when f uses t) of
/// |f| + |grad f|, the gradient taken symbolically. Samples where a
/// derivative of a nonsmooth f is undefined are skipped.
double compute_F1(const Problem& prob, const SampleSpec& spec = {});

/// Solves the problem at each spacing in h_list (parabolic: forward Euler to
/// T at the stable step, streaming; elliptic: Gauss-Seidel) and reports the
/// pieces of the mesh-uniform gradient bound: the interior sup of
/// |u| + tau0 |Du| + U (Du by central differences, U the weighted
/// difference-quotient functional) against F1 plus the boundary-data sup
/// (|g| on the Dirichlet layer; in parabolic mode also the functional of g
/// on the initial slice). R(h) staying bounded as h shrinks is the
/// falsifiable content of the estimate; R is 0 when both sides vanish.
/// Per-h solves run concurrently.
GradientStudy gradient_bound_study(const Problem& prob,
                                   std::span<const double> h_list,
                                   const GradientStudyOptions& opts = {});

} // namespace stencil_lab
