#pragma once

#include "stencil_lab/lattice.hpp"
#include "stencil_lab/parabolic.hpp"
#include "stencil_lab/report.hpp"

#include <ostream>
#include <span>
#include <string>

namespace stencil_lab {

/// One float with 17 significant digits, so values round-trip exactly.
std::string csv_number(double v);
/// Quotes a text field when it contains a comma, quote, or newline.
std::string csv_text(const std::string& s);

/// Header i1..id,x1..xd,u; one row per lattice point.
void write_grid_csv(std::ostream& os, const GridFunction& u);
/// Same columns with t prepended; states 0, every, 2*every, .. plus the
/// final state (every <= 0 keeps only the final state).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, long every);
/// k,h,sup_error,fitted_order,diagnostic.
void write_convergence_csv(std::ostream& os, const ConvergenceReport& r);
/// check,verdict,margin,tolerance,t,x1..xd,witness,note.
void write_assumptions_csv(std::ostream& os, const AssumptionReport& r, int dim);
/// h,sup_u,sup_tau0_Du,sup_U,F1,boundary,R.
void write_gradient_csv(std::ostream& os, const GradientStudy& s);

struct OracleRow {
  double x = 0.0;
  double value = 0.0;
  double tail_bound = 0.0;
  int terms = 0;
};
/// x,value,tail_bound,terms.
void write_oracle_csv(std::ostream& os, std::span<const OracleRow> rows);

} // namespace stencil_lab
