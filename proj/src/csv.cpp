#include "stencil_lab/csv.hpp"

#include <cstdio>

namespace stencil_lab {

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += "\"";
  return out;
}

namespace {

void grid_header(std::ostream& os, int dim, bool with_time) {
  if (with_time) os << "t,";
  for (int i = 1; i <= dim; ++i) os << "i" << i << ",";
  for (int i = 1; i <= dim; ++i) os << "x" << i << ",";
  os << "u\n";
}

void grid_rows(std::ostream& os, const GridFunction& u, const double* t) {
  const Domain& dom = u.domain();
  std::vector<double> x(static_cast<std::size_t>(dom.dim()));
  for (std::size_t flat = 0; flat < dom.size(); ++flat) {
    const auto mi = dom.multi_index(flat);
    dom.point(flat, x);
    if (t) os << csv_number(*t) << ",";
    for (int v : mi) os << v << ",";
    for (double v : x) os << csv_number(v) << ",";
    os << csv_number(u[flat]) << "\n";
  }
}

} // namespace

void write_grid_csv(std::ostream& os, const GridFunction& u) {
  grid_header(os, u.domain().dim(), false);
  grid_rows(os, u, nullptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          long every) {
  if (traj.states.empty()) return;
  grid_header(os, traj.states.front().domain().dim(), true);
  const std::size_t last = traj.states.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const bool keep =
        i == last || (every > 0 && i % static_cast<std::size_t>(every) == 0);
    if (!keep) continue;
    grid_rows(os, traj.states[i], &traj.times[i]);
  }
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& r) {
  os << "k,h,sup_error,fitted_order,diagnostic\n";
  for (const auto& row : r.rows)
    os << r.k << "," << csv_number(row.h) << "," << csv_number(row.error)
       << "," << csv_number(r.fitted_order) << "," << csv_text(r.diagnostic)
       << "\n";
}

void write_assumptions_csv(std::ostream& os, const AssumptionReport& r,
                           int dim) {
  os << "check,verdict,margin,tolerance,t";
  for (int i = 1; i <= dim; ++i) os << ",x" << i;
  os << ",witness,note\n";
  for (const auto& rec : r.records) {
    os << csv_text(rec.name) << "," << to_string(rec.verdict) << ","
       << csv_number(rec.margin) << "," << csv_number(rec.tolerance) << ","
       << csv_number(rec.t);
    for (int i = 0; i < dim; ++i) {
      os << ",";
      if (static_cast<std::size_t>(i) < rec.x.size())
        os << csv_number(rec.x[static_cast<std::size_t>(i)]);
    }
    os << "," << csv_text(rec.witness) << "," << csv_text(rec.note) << "\n";
  }
}

void write_gradient_csv(std::ostream& os, const GradientStudy& s) {
  os << "h,sup_u,sup_tau0_Du,sup_U,F1,boundary,R\n";
  for (const auto& r : s.rows)
    os << csv_number(r.h) << "," << csv_number(r.sup_u) << ","
       << csv_number(r.sup_tau0_du) << "," << csv_number(r.sup_U) << ","
       << csv_number(r.F1) << "," << csv_number(r.boundary) << ","
       << csv_number(r.R) << "\n";
}

void write_oracle_csv(std::ostream& os, std::span<const OracleRow> rows) {
  os << "x,value,tail_bound,terms\n";
  for (const auto& r : rows)
    os << csv_number(r.x) << "," << csv_number(r.value) << ","
       << csv_number(r.tail_bound) << "," << r.terms << "\n";
}

} // namespace stencil_lab
