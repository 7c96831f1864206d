#pragma once

#include <string>
#include <vector>

namespace stencil_lab {

/// One (h, sup_error) row of a convergence study.
struct ConvergenceRow {
  double h;
  double error;
};

/// Error-vs-h table with a least-squares fitted order of log(error) against
/// log(h). fitted_order is +infinity when every error is at roundoff level
/// (exactness) and NaN when the sequence is not monotone decreasing in h
/// (diagnostic says why).
struct ConvergenceReport {
  int k = 0; // extrapolation level, 0 for plain consistency studies
  std::vector<ConvergenceRow> rows;
  double fitted_order = 0.0;
  std::string diagnostic;
};

/// Fits rows into fitted_order/diagnostic per the rules above.
void fit_order(ConvergenceReport& report);

enum class Verdict { pass, fail, not_applicable };

/// Result of one mesh-condition check. `margin` is the worst slack seen,
/// positive meaning satisfied; the verdict is pass iff margin >= -tolerance.
/// `witness` carries the violating direction when one exists (a stencil
/// vector or a xi eigenvector), formatted as text.
struct CheckRecord {
  std::string name;
  Verdict verdict = Verdict::not_applicable;
  double margin = 0.0;
  double tolerance = 0.0;
  double t = 0.0;
  std::vector<double> x;
  std::string witness;
  std::string note;
};

struct AssumptionReport {
  std::vector<CheckRecord> records;
  bool all_pass() const;
  /// True when some record failed (not_applicable does not count).
  bool any_fail() const;
};

const char* to_string(Verdict v);

/// One row of a gradient-bound study at a given spacing.
struct GradientStudyRow {
  double h = 0.0;
  double sup_u = 0.0;
  double sup_tau0_du = 0.0;
  double sup_U = 0.0;
  double F1 = 0.0;
  double boundary = 0.0;
  double R = 0.0;
};

struct GradientStudy {
  std::vector<GradientStudyRow> rows;
};

} // namespace stencil_lab
