#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "stencil_lab/config.hpp"
#include "stencil_lab/csv.hpp"
#include "stencil_lab/elliptic.hpp"
#include "stencil_lab/errors.hpp"
#include "stencil_lab/parabolic.hpp"
#include "stencil_lab/presets.hpp"
#include "test_helpers.hpp"

using namespace stencil_lab;

namespace {

RunConfig valid_cfg() {
  RunConfig c;
  c.lower = {0.0};
  c.upper = {1.0};
  c.h = 0.25;
  StencilEntry plus, minus;
  plus.lambda = {1};
  plus.q = "1";
  minus.lambda = {-1};
  minus.q = "1";
  c.stencil = {plus, minus};
  return c;
}

} // namespace

TEST_CASE("configs round-trip through render and parse") {
  for (const auto& name : preset_names()) {
    INFO("preset ", name);
    const RunConfig cfg = preset_config(name);
    CHECK(parse_config(render_config(cfg)) == cfg);
  }
  RunConfig cfg = valid_cfg();
  cfg.h_list = {0.5, 0.25, 0.125};
  cfg.x_list = {-1.0, 0.0, 2.5};
  cfg.exact = "cos(x1)";
  cfg.output = "out.csv";
  cfg.strict = true;
  cfg.r_budget = 3.5;
  cfg.tol = 1.0 / 3.0;
  CHECK(parse_config(render_config(cfg)) == cfg);
}

TEST_CASE("parse errors carry the line number") {
  try {
    parse_config("[problem]\ndimension = 1\nbogus = 2\n");
    FAIL_CHECK("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("config line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("unknown key 'bogus'") !=
          std::string::npos);
    CHECK(e.offset == 3);
  }
  expect_error<ParseError>([] { parse_config("[stencil]\nlambda = [1]\n"); },
                           "stencil entries use [[stencil]] tables");
  expect_error<ParseError>([] { parse_config("[weird]\n"); },
                           "unknown section 'weird'");
  expect_error<ParseError>([] { parse_config("h = 0.5\n"); },
                           "before any section");
  expect_error<ParseError>([] { parse_config("[problem]\nh = abc\n"); },
                           "expected a number");
  expect_error<ParseError>(
      [] { parse_config("[problem]\ndimension = 1.5\n"); },
      "expects an integer");
  expect_error<ParseError>(
      [] { parse_config("[problem]\nlower = [1,]\n"); },
      "trailing comma");
  expect_error<ParseError>(
      [] { parse_config("[problem]\nlower = [1, ,2]\n"); },
      "empty array element");
  expect_error<ParseError>(
      [] { parse_config("[coefficients]\nc = \"1\nf = \"0\"\n"); },
      "unterminated or malformed string");
  expect_error<ParseError>([] { parse_config("[problem]\nh =\n"); },
                           "missing value after '='");
  expect_error<ParseError>(
      [] { parse_config("[run]\nstrict = \"yes\"\n"); },
      "expects true or false");
  expect_error<ParseError>([] { load_config("/nonexistent/nope.toml"); },
                           "cannot open config file");
}

TEST_CASE("problem assembly reports the offending field") {
  {
    RunConfig c = valid_cfg();
    c.stencil[0].lambda = {0};
    expect_error<ValidationError>([&] { build_problem(c); },
                                  "not allowed in Lambda_1");
  }
  {
    RunConfig c = valid_cfg();
    c.tau0 = 1.5;
    expect_error<ValidationError>([&] { build_problem(c); }, "[0,1]");
  }
  {
    RunConfig c = valid_cfg();
    c.kind = "wedge";
    expect_error<ValidationError>([&] { build_problem(c); }, "periodic");
  }
  {
    RunConfig c = valid_cfg();
    c.lower = {0.0, 0.0};
    expect_error<ValidationError>([&] { build_problem(c); }, "entries");
  }
  {
    RunConfig c = valid_cfg();
    c.stencil.pop_back(); // single forward shift: no symmetric partner
    c.theta = 2.0;
    expect_error<ValidationError>([&] { build_problem(c); }, "symmetric");
  }
  {
    RunConfig c = valid_cfg();
    c.stencil[0].q = "1+*2";
    expect_error<ParseError>([&] { build_problem(c); }, "stencil[0].q");
  }
  {
    RunConfig c = valid_cfg();
    c.c = "foo(";
    expect_error<ParseError>([&] { build_problem(c); }, "coefficients.c");
  }
  {
    RunConfig c = valid_cfg();
    c.stencil.clear();
    expect_error<ValidationError>([&] { build_problem(c); }, "[[stencil]]");
  }
  {
    RunConfig c = valid_cfg();
    c.dimension = 0;
    expect_error<ValidationError>([&] { build_problem(c); }, ">= 1");
  }
}

TEST_CASE("minimal heat-flow configuration runs end to end") {
  const std::string text = R"cfg(# heat flow on the circle
[problem]
dimension = 1
kind = "periodic"
lower = [0]
upper = [6.2831853071795862]
h = 0.19634954084936207
T = 1

[coefficients]
c = "1"
f = "0"
g = "sin(x1)"

[[stencil]]
lambda = [1]
q = "1"

[[stencil]]
lambda = [-1]
q = "1"
)cfg";
  const RunConfig cfg = parse_config(text);
  CHECK(cfg.stencil.size() == 2);
  CHECK(cfg.stencil[0].p == "0"); // defaulted
  const Problem prob = build_problem(cfg);
  CHECK(prob.domain.size() == 32);
  const Trajectory traj = solve_parabolic(prob);
  CHECK(traj.times.back() == doctest::Approx(1.0).epsilon(1e-12));
  const double final_sup = sup_norm(traj.states.back());
  // the initial profile decays at roughly rate c + |second difference|
  CHECK(final_sup > 0.1);
  CHECK(final_sup < 0.2);
}

TEST_CASE("repeated solves render byte-identical CSV") {
  const Problem model = build_problem(preset_config("model-1d"));
  const EllipticResult r1 = solve_elliptic(model);
  const EllipticResult r2 = solve_elliptic(model);
  std::ostringstream a, b;
  write_grid_csv(a, r1.u);
  write_grid_csv(b, r2.u);
  CHECK(a.str() == b.str());
  const std::string s = a.str();
  CHECK(s.rfind("i1,x1,u\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 242); // header + 241 points
}

TEST_CASE("CSV shapes and quoting") {
  CHECK(csv_number(0.5) == "0.5");
  CHECK(csv_number(2.0) == "2");
  CHECK(csv_number(1.0 / 3.0) == "0.33333333333333331");
  CHECK(csv_text("plain") == "plain");
  CHECK(csv_text("ab\"c,d") == "\"ab\"\"c,d\"");
  {
    ConvergenceReport rep;
    rep.k = 2;
    rep.rows = {{0.5, 0.01}};
    rep.fitted_order = 2.0;
    std::ostringstream os;
    write_convergence_csv(os, rep);
    CHECK(os.str() == "k,h,sup_error,fitted_order,diagnostic\n2,0.5,0.01,2,\n");
  }
  {
    CheckRecord rec;
    rec.name = "positivity";
    rec.verdict = Verdict::pass;
    rec.x = {0.25};
    AssumptionReport rep;
    rep.records = {rec};
    std::ostringstream os;
    write_assumptions_csv(os, rep, 1);
    CHECK(os.str().rfind("check,verdict,margin,tolerance,t,x1,witness,note\n",
                         0) == 0);
    CHECK(os.str().find("positivity,pass,") != std::string::npos);
  }
  {
    GradientStudy study;
    study.rows = {{0.5, 1.0, 0.0, 2.0, 3.0, 0.0, 1.0}};
    std::ostringstream os;
    write_gradient_csv(os, study);
    CHECK(os.str() ==
          "h,sup_u,sup_tau0_Du,sup_U,F1,boundary,R\n0.5,1,0,2,3,0,1\n");
  }
  {
    std::vector<OracleRow> rows = {{0.0, 1.5, 1e-12, 251}};
    std::ostringstream os;
    write_oracle_csv(os, rows);
    CHECK(os.str() == "x,value,tail_bound,terms\n0,1.5,9.9999999999999998e-13,251\n");
  }
}

TEST_CASE("trajectory CSV keeps only the final state when every <= 0") {
  const RunConfig cfg = preset_config("model-1d");
  Problem prob = build_problem(cfg);
  prob = prob.with_h(10.0); // 13 grid points: keep it tiny
  ParabolicOptions opts;
  opts.dt = 0.5;
  const Trajectory traj = solve_parabolic(prob, opts);
  REQUIRE(traj.states.size() == 3);
  std::ostringstream os;
  write_trajectory_csv(os, traj, 0);
  const std::string s = os.str();
  CHECK(s.rfind("t,i1,x1,u\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') ==
        1 + static_cast<long>(prob.domain.size()));
  CHECK(s.find("\n1,") != std::string::npos);   // rows are at t = 1
  CHECK(s.find("\n0.5,") == std::string::npos); // intermediate states dropped
}
