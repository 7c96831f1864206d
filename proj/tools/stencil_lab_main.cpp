#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "stencil_lab/conditions.hpp"
#include "stencil_lab/config.hpp"
#include "stencil_lab/csv.hpp"
#include "stencil_lab/elliptic.hpp"
#include "stencil_lab/errors.hpp"
#include "stencil_lab/estimates.hpp"
#include "stencil_lab/parabolic.hpp"
#include "stencil_lab/presets.hpp"
#include "stencil_lab/richardson.hpp"

namespace {

using namespace stencil_lab;

/// One-line machine-parsable diagnostic: "<subcommand>: error: <message>".
void diag(const std::string& sub, const std::string& msg) {
  std::string flat = msg;
  for (char& c : flat)
    if (c == '\n' || c == '\r') c = ' ';
  std::fprintf(stderr, "%s: error: %s\n", sub.c_str(), flat.c_str());
}

void warn(const std::string& sub, const std::string& msg) {
  std::fprintf(stderr, "%s: warning: %s\n", sub.c_str(), msg.c_str());
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open output file '" + path + "'");
  return f;
}

void kv(const char* key, const std::string& value) {
  std::printf("  %-14s %s\n", key, value.c_str());
}

void kv(const char* key, double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  kv(key, std::string(buf));
}

void kv(const char* key, long value) { kv(key, std::to_string(value)); }

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : csv) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

Expression parse_named(const std::string& src, const std::string& field) {
  try {
    return Expression::parse(src);
  } catch (const ParseError& e) {
    throw ParseError(field + ": " + e.what(), e.offset);
  }
}

// ---------------------------------------------------------------- commands

int cmd_solve_parabolic(const RunConfig& cfg, const std::string& out,
                        std::optional<double> dt) {
  Problem prob = build_problem(cfg);
  ParabolicOptions opts;
  if (dt) opts.dt = *dt;
  Trajectory traj = solve_parabolic(prob, opts);
  if (!out.empty()) {
    auto f = open_output(out);
    write_trajectory_csv(f, traj, cfg.dump_every);
  }
  std::printf("solve-parabolic summary\n");
  kv("grid points", static_cast<long>(prob.domain.size()));
  kv("dt", traj.dt);
  kv("steps", static_cast<long>(traj.times.size() - 1));
  kv("final time", traj.times.back());
  kv("sup |u(T)|", sup_norm(traj.states.back()));
  if (!out.empty()) kv("csv", out);
  return 0;
}

int cmd_solve_elliptic(const RunConfig& cfg, const std::string& out) {
  Problem prob = build_problem(cfg);
  EllipticOptions opts;
  opts.tol = cfg.tol;
  EllipticResult res = solve_elliptic(prob, opts);
  if (!out.empty()) {
    auto f = open_output(out);
    write_grid_csv(f, res.u);
  }
  std::printf("solve-elliptic summary\n");
  kv("grid points", static_cast<long>(prob.domain.size()));
  kv("iterations", static_cast<long>(res.iterations));
  kv("residual", res.residual);
  kv("sup |u|", sup_norm(res.u));
  if (!out.empty()) kv("csv", out);
  return 0;
}

int cmd_extrapolate(const RunConfig& cfg, const std::string& out) {
  Problem prob = build_problem(cfg);
  for (const auto& field : smoothness_warnings(prob))
    warn("extrapolate", "coefficient " + field +
                            " uses a nonsmooth primitive while m >= 1; "
                            "the acceleration order may degrade");
  if (cfg.exact.empty()) {
    GridFunction u = extrapolate(prob, cfg.k, cfg.tol);
    if (!out.empty()) {
      auto f = open_output(out);
      write_grid_csv(f, u);
    }
    std::printf("extrapolate summary\n");
    kv("k", static_cast<long>(cfg.k));
    kv("levels", static_cast<long>(cfg.k + 1));
    kv("coarse h", prob.domain.h());
    kv("sup |u|", sup_norm(u));
    if (!out.empty()) kv("csv", out);
    return 0;
  }
  const Expression exact = parse_named(cfg.exact, "run.exact");
  std::vector<double> hs = cfg.h_list;
  if (hs.empty()) hs.push_back(cfg.h);
  ConvergenceReport rep;
  rep.k = cfg.k;
  for (double h : hs) {
    Problem at_h = prob.with_h(h);
    GridFunction u = extrapolate(at_h, cfg.k, cfg.tol);
    GridFunction v = GridFunction::sample(exact, at_h.domain, 0.0);
    rep.rows.push_back({h, max_abs_diff(u, v)});
  }
  fit_order(rep);
  if (!out.empty()) {
    auto f = open_output(out);
    write_convergence_csv(f, rep);
  }
  std::printf("extrapolate summary (against run.exact)\n");
  kv("k", static_cast<long>(cfg.k));
  for (const auto& row : rep.rows) {
    char line[80];
    std::snprintf(line, sizeof line, "h=%-12.6g sup error %.10g", row.h,
                  row.error);
    kv("level", std::string(line));
  }
  kv("fitted order", rep.fitted_order);
  if (!rep.diagnostic.empty()) kv("diagnostic", rep.diagnostic);
  if (!out.empty()) kv("csv", out);
  return 0;
}

int cmd_check_assumptions(const RunConfig& cfg, const std::string& out,
                          bool h_sweep, bool strict) {
  Problem prob = build_problem(cfg);
  SampleSpec spec;
  spec.t_samples = cfg.t_samples;
  QuadraticFormBudgets budgets;
  if (cfg.r_budget >= 0.0) budgets.r_lambda_mu = cfg.r_budget;
  if (cfg.p_budget >= 0.0) budgets.p_lambda_mu = cfg.p_budget;
  AssumptionReport rep =
      run_checks(prob, split_names(cfg.checks), spec, h_sweep, budgets);
  if (!out.empty()) {
    auto f = open_output(out);
    write_assumptions_csv(f, rep, prob.domain.dim());
  }
  std::printf("check-assumptions summary\n");
  for (const auto& r : rep.records) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-40s %-15s margin %.6g", r.name.c_str(),
                  to_string(r.verdict), r.margin);
    std::printf("%s\n", line);
  }
  if (!out.empty()) kv("csv", out);
  if (rep.any_fail() && strict) {
    diag("check-assumptions", "assumption violated under --strict");
    return 3;
  }
  return 0;
}

int cmd_gradient_study(const RunConfig& cfg, const std::string& out) {
  Problem prob = build_problem(cfg);
  if (cfg.h_list.empty())
    throw ValidationError(
        "gradient-study needs a step list (run.h_list or --h-list)");
  GradientStudyOptions opts;
  if (cfg.mode == "parabolic") opts.mode = StudyMode::parabolic;
  else if (cfg.mode == "elliptic") opts.mode = StudyMode::elliptic;
  else
    throw ValidationError("run.mode must be \"parabolic\" or \"elliptic\", got \"" +
                          cfg.mode + "\"");
  opts.elliptic_tol = cfg.tol;
  opts.samples.t_samples = cfg.t_samples;
  GradientStudy study = gradient_bound_study(prob, cfg.h_list, opts);
  if (!out.empty()) {
    auto f = open_output(out);
    write_gradient_csv(f, study);
  }
  std::printf("gradient-study summary (%s mode)\n", cfg.mode.c_str());
  double rmin = 0.0, rmax = 0.0;
  bool first = true;
  for (const auto& row : study.rows) {
    char line[120];
    std::snprintf(line, sizeof line, "h=%-12.6g R=%.10g", row.h, row.R);
    kv("level", std::string(line));
    if (first || row.R < rmin) rmin = row.R;
    if (first || row.R > rmax) rmax = row.R;
    first = false;
  }
  if (rmin > 0.0) kv("max R / min R", rmax / rmin);
  if (!out.empty()) kv("csv", out);
  return 0;
}

int cmd_consistency(const RunConfig& cfg, const std::string& out) {
  Problem prob = build_problem(cfg);
  const Expression phi = parse_named(cfg.phi, "run.phi");
  std::vector<double> hs = cfg.h_list;
  if (hs.empty())
    for (int i = 0; i < 4; ++i) hs.push_back(cfg.h / double(1 << i));
  ConvergenceReport rep = consistency_error(prob, phi, hs);
  if (!out.empty()) {
    auto f = open_output(out);
    write_convergence_csv(f, rep);
  }
  std::printf("consistency summary (phi = %s)\n", cfg.phi.c_str());
  for (const auto& row : rep.rows) {
    char line[80];
    std::snprintf(line, sizeof line, "h=%-12.6g sup error %.10g", row.h,
                  row.error);
    kv("level", std::string(line));
  }
  kv("fitted order", rep.fitted_order);
  if (!rep.diagnostic.empty()) kv("diagnostic", rep.diagnostic);
  if (!out.empty()) kv("csv", out);
  return 0;
}

int cmd_oracle_1d(const RunConfig& cfg, const std::string& out, int n_max) {
  const Expression f = parse_named(cfg.f, "coefficients.f");
  if (cfg.x_list.empty())
    throw ValidationError(
        "oracle-1d needs evaluation points (run.x_list or --x)");
  std::vector<OracleRow> rows;
  rows.reserve(cfg.x_list.size());
  for (double x : cfg.x_list) {
    SeriesOracleResult r = series_oracle_1d(f, cfg.h, x, n_max, cfg.tol);
    rows.push_back({x, r.value, r.tail_bound, r.terms});
  }
  if (!out.empty()) {
    auto fo = open_output(out);
    write_oracle_csv(fo, rows);
  }
  std::printf("oracle-1d summary (h = %.10g)\n", cfg.h);
  for (const auto& r : rows) {
    char line[120];
    std::snprintf(line, sizeof line, "x=%-12.6g u=%.12g (tail %.3g, %d terms)",
                  r.x, r.value, r.tail_bound, r.terms);
    kv("point", std::string(line));
  }
  if (!out.empty()) kv("csv", out);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "stencil_lab: monotone finite-difference schemes on uniform lattices.\n"
      "Load a problem from --config FILE or --preset NAME, run a subcommand,\n"
      "get a summary table on stdout and (with an output path) a CSV file.\n"
      "Floats in CSV use 17 significant digits; identical configs give\n"
      "byte-identical CSV. STENCIL_LAB_THREADS caps internal parallelism."};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::optional<std::string> output_flag;
  app.add_option("--config", config_path, "Path to a run configuration file");
  std::string preset_help = "Built-in problem preset (";
  {
    bool first = true;
    for (const auto& n : preset_names()) {
      if (!first) preset_help += ", ";
      preset_help += n;
      first = false;
    }
    preset_help += ")";
  }
  app.add_option("--preset", preset, preset_help)->excludes("--config");
  app.add_option("--output", output_flag,
                 "CSV output path (overrides run.output; empty = summary only)");

  std::optional<double> dt_flag, tol_flag;
  std::optional<long> dump_every_flag;
  std::optional<int> k_flag, t_samples_flag;
  std::optional<std::string> checks_flag, mode_flag, phi_flag, f_flag,
      exact_flag;
  std::optional<double> h_flag, r_budget_flag, p_budget_flag;
  std::vector<double> h_list_flag, x_flag;
  bool h_sweep = false, strict = false;
  int n_max = 2000;

  auto* sp = app.add_subcommand(
      "solve-parabolic",
      "March the explicit scheme to t = T.\nCSV: t,i1..id,x1..xd,u (states "
      "thinned by --dump-every; final state always kept).");
  sp->add_option("--dt", dt_flag,
                 "Time step (default: 0.9 / sup(c + h^-2 sum chi))");
  sp->add_option("--dump-every", dump_every_flag,
                 "Keep every Nth state in the CSV (0 = final state only)");

  auto* se = app.add_subcommand(
      "solve-elliptic",
      "Solve the stationary equation by monotone point sweeps.\n"
      "CSV: i1..id,x1..xd,u.");
  se->add_option("--tol", tol_flag, "Sup-norm residual tolerance (default 1e-10)");

  auto* ex = app.add_subcommand(
      "extrapolate",
      "Eliminate the first k error orders by combining solutions at h, h/2, "
      "..., h/2^k.\nCSV without run.exact: i1..id,x1..xd,u of the combined "
      "solution.\nCSV with run.exact: k,h,sup_error,fitted_order,diagnostic "
      "over the h list.");
  ex->add_option("--k", k_flag, "Orders to eliminate (0..12, default 2)");
  ex->add_option("--tol", tol_flag,
                 "Base solve tolerance; level j solves at tol/4^k");
  ex->add_option("--exact", exact_flag,
                 "Reference solution expression for error reporting");

  auto* ca = app.add_subcommand(
      "check-assumptions",
      "Run the mesh-independence condition checkers.\nCSV: check,verdict,"
      "margin,tolerance,t,x1..xd,witness,note.");
  ca->add_option("--checks", checks_flag,
                 "Comma list of checks, or \"all\" (default)");
  ca->add_flag("--h-sweep", h_sweep, "Re-run the suite at h, h/2, h/4");
  ca->add_flag("--strict", strict, "Exit 3 when any check fails");
  ca->add_option("--t-samples", t_samples_flag,
                 "Time samples on [0,T] for t-dependent coefficients");
  ca->add_option("--r-budget", r_budget_flag,
                 "Uniform r_{lambda mu} budget for quadratic-form");
  ca->add_option("--p-budget", p_budget_flag,
                 "Uniform p_{lambda mu} budget for quadratic-form");

  auto* gs = app.add_subcommand(
      "gradient-study",
      "Ratio R(h) of the solution functional to the data functional across "
      "step sizes.\nCSV: h,sup_u,sup_tau0_Du,sup_U,F1,boundary,R.");
  gs->add_option("--h-list", h_list_flag, "Step sizes, strictly decreasing")
      ->expected(-1);
  gs->add_option("--mode", mode_flag, "parabolic (default) or elliptic");
  gs->add_option("--tol", tol_flag, "Elliptic solve tolerance");

  auto* co = app.add_subcommand(
      "consistency",
      "Sup of |scheme - limit operator| applied to a smooth phi, per h.\n"
      "CSV: k,h,sup_error,fitted_order,diagnostic.");
  co->add_option("--phi", phi_flag, "Test function (default sin(x1))");
  co->add_option("--h-list", h_list_flag,
                 "Step sizes (default h, h/2, h/4, h/8)")
      ->expected(-1);

  auto* od = app.add_subcommand(
      "oracle-1d",
      "Analytic series solution of the 1D unit-diffusion model scheme.\n"
      "CSV: x,value,tail_bound,terms.");
  od->add_option("--f", f_flag, "Source expression (default from config)");
  od->add_option("--x", x_flag, "Evaluation points")->expected(-1);
  od->add_option("--h-step", h_flag, "Step size (default from config)");
  od->add_option("--tol", tol_flag, "Series tail bound target");
  od->add_option("--n-max", n_max,
                 "Series term cap (cost grows as n^2; raise for small h)");

  for (auto* s : {sp, se, ex, ca, gs, co, od}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    diag("stencil_lab", e.what());
    return 1;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    else if (!preset.empty()) cfg = preset_config(preset);
    if (dt_flag && sub != "solve-parabolic") dt_flag.reset();
    if (tol_flag) cfg.tol = *tol_flag;
    if (dump_every_flag) cfg.dump_every = *dump_every_flag;
    if (k_flag) cfg.k = *k_flag;
    if (t_samples_flag) cfg.t_samples = *t_samples_flag;
    if (checks_flag) cfg.checks = *checks_flag;
    if (mode_flag) cfg.mode = *mode_flag;
    if (phi_flag) cfg.phi = *phi_flag;
    if (f_flag) cfg.f = *f_flag;
    if (exact_flag) cfg.exact = *exact_flag;
    if (h_flag) cfg.h = *h_flag;
    if (r_budget_flag) cfg.r_budget = *r_budget_flag;
    if (p_budget_flag) cfg.p_budget = *p_budget_flag;
    if (!h_list_flag.empty()) cfg.h_list = h_list_flag;
    if (!x_flag.empty()) cfg.x_list = x_flag;
    if (output_flag) cfg.output = *output_flag;
    const std::string out = cfg.output;

    if (sub == "solve-parabolic") return cmd_solve_parabolic(cfg, out, dt_flag);
    if (sub == "solve-elliptic") return cmd_solve_elliptic(cfg, out);
    if (sub == "extrapolate") return cmd_extrapolate(cfg, out);
    if (sub == "check-assumptions")
      return cmd_check_assumptions(cfg, out, h_sweep, strict);
    if (sub == "gradient-study") return cmd_gradient_study(cfg, out);
    if (sub == "consistency") return cmd_consistency(cfg, out);
    if (sub == "oracle-1d") return cmd_oracle_1d(cfg, out, n_max);
    diag(sub, "unhandled subcommand");
    return 1;
  } catch (const ParseError& e) {
    diag(sub, e.what());
    return 1;
  } catch (const ValidationError& e) {
    diag(sub, e.what());
    return 1;
  } catch (const PreconditionError& e) {
    diag(sub, e.what());
    return 1;
  } catch (const DifferentiationError& e) {
    diag(sub, e.what());
    return 1;
  } catch (const NotConvergedError& e) {
    diag(sub, e.what());
    return 2;
  } catch (const NumericalError& e) {
    diag(sub, e.what());
    return 2;
  } catch (const EvalError& e) {
    diag(sub, e.what());
    return 2;
  }
}
