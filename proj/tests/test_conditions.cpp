#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "stencil_lab/conditions.hpp"
#include "stencil_lab/config.hpp"
#include "stencil_lab/errors.hpp"
#include "stencil_lab/presets.hpp"
#include "test_helpers.hpp"
#include "test_problems.hpp"

using namespace stencil_lab;

namespace {
const double pi = std::numbers::pi;

/// Laplacian-like scheme with x-independent coefficients on a wide box.
Problem flat_scheme() {
  return prob1d(DomainKind::box, -60.0, 60.0, 0.5, "1", "1", "1/(1+x1^2)");
}

/// Four-shift scheme whose q strings sum against lambda to exactly zero.
Problem four_shift() {
  return multi1d(DomainKind::periodic, 0.0, 2.0 * pi, pi / 16.0,
                 {-3, -1, 1, 2},
                 {"1", "1.5-0.5*sin(x1)", "1.5+0.5*sin(x1)",
                  "1.5-0.5*sin(x1)"},
                 "1", "0");
}

/// Transport scheme with drift slope working against the estimate: pure
/// drift, small zero-order weight, small diffusion shift.
Problem adverse_transport() {
  Problem p = prob1d(DomainKind::box, -3.0, 3.0, 0.05, "0", "0.1",
                     "1/(1+x1^2)", "0",
                     "0.5*max(min(x1,1),-1)",
                     "(-0.5)*max(min(x1,1),-1)");
  p = p.add_theta(2.0);
  p.constants.c0 = 0.1;
  return p;
}

std::vector<double> parse_witness_vector(const std::string& w) {
  const auto open = w.find('(');
  const auto close = w.find(')', open);
  REQUIRE(open != std::string::npos);
  REQUIRE(close != std::string::npos);
  std::string body = w.substr(open + 1, close - open - 1);
  std::replace(body.begin(), body.end(), ',', ' ');
  std::istringstream ss(body);
  std::vector<double> out;
  double v = 0.0;
  while (ss >> v) out.push_back(v);
  return out;
}

} // namespace

TEST_CASE("additive-function basis on shift sets") {
  {
    Stencil st;
    st.vectors = {{1}, {-1}};
    st.tau = {1.0, 1.0};
    const auto basis = linear_function_basis(st);
    REQUIRE(basis.size() == 1);
    CHECK(basis[0][0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(basis[0][1] == doctest::Approx(-1.0).epsilon(1e-14));
  }
  {
    Stencil st;
    st.vectors = {{-3}, {-1}, {1}, {2}};
    st.tau = {1.0, 1.0, 1.0, 1.0};
    const auto basis = linear_function_basis(st);
    REQUIRE(basis.size() == 1);
    CHECK(basis[0][0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(basis[0][1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(basis[0][2] == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
    CHECK(basis[0][3] == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
  }
  {
    Stencil st;
    st.vectors = {{1}, {2}};
    st.tau = {1.0, 1.0};
    const auto basis = linear_function_basis(st);
    REQUIRE(basis.size() == 1);
    CHECK(basis[0][0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(basis[0][1] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("symmetric eigensolver on known matrices") {
  {
    const auto eig = symmetric_eigen({2.0, 1.0, 1.0, 2.0}, 2);
    REQUIRE(eig.values.size() == 2);
    CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eig.values[1] == doctest::Approx(3.0).epsilon(1e-12));
    // min-eigenvalue direction is (1,-1)/sqrt(2) up to sign
    CHECK(std::abs(eig.vectors[0 * 2 + 0]) ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(eig.vectors[0 * 2 + 0] * eig.vectors[1 * 2 + 0] < 0.0);
    CHECK(eig.vectors[0 * 2 + 1] * eig.vectors[1 * 2 + 1] > 0.0);
  }
  {
    const std::vector<double> a = {14.74, 17.0, 17.0, 14.74};
    const auto eig = symmetric_eigen(a, 2);
    CHECK(eig.values[0] == doctest::Approx(-2.26).epsilon(1e-12));
    CHECK(eig.values[1] == doctest::Approx(31.74).epsilon(1e-12));
    // brute-force minimum of the quadratic form over the unit circle
    double grid_min = 1e300;
    for (int i = 0; i < 3600; ++i) {
      const double th = pi * static_cast<double>(i) / 3600.0;
      const double c = std::cos(th), s = std::sin(th);
      grid_min = std::min(grid_min,
                          a[0] * c * c + 2.0 * a[1] * c * s + a[3] * s * s);
    }
    CHECK(eig.values[0] == doctest::Approx(grid_min).epsilon(1e-6));
  }
  {
    // circulant with a double eigenvalue
    const std::vector<double> a = {2.0, -1.0, -1.0, -1.0, 2.0,
                                   -1.0, -1.0, -1.0, 2.0};
    const auto eig = symmetric_eigen(a, 3);
    CHECK(std::abs(eig.values[0]) <= 1e-12);
    CHECK(eig.values[1] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(eig.values[2] == doctest::Approx(3.0).epsilon(1e-12));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        double dot = 0.0, residual = 0.0;
        for (std::size_t k = 0; k < 3; ++k)
          dot += eig.vectors[k * 3 + i] * eig.vectors[k * 3 + j];
        CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) <= 1e-12);
        for (std::size_t r = 0; r < 3; ++r) {
          double av = 0.0;
          for (std::size_t k = 0; k < 3; ++k)
            av += a[r * 3 + k] * eig.vectors[k * 3 + j];
          residual =
              std::max(residual,
                       std::abs(av - eig.values[j] * eig.vectors[r * 3 + j]));
        }
        CHECK(residual <= 1e-10);
      }
  }
  CHECK_THROWS_AS(symmetric_eigen({1.0, 2.0, 3.0}, 2), ValidationError);
}

TEST_CASE("positivity checker") {
  {
    const CheckRecord r = check_positivity(flat_scheme());
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.margin == 0.0);
  }
  {
    // chi = q + h p = -0.1 on the single forward shift
    const Problem p =
        upwind1d(DomainKind::box, 0.0, 1.0, 0.1, "0", "-1", "1", "0");
    const CheckRecord r = check_positivity(p);
    CHECK(r.verdict == Verdict::fail);
    CHECK(r.margin == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(r.witness.find("chi") != std::string::npos);
  }
  {
    const Problem p =
        prob1d(DomainKind::box, 0.0, 1.0, 0.25, "1", "0.5", "0");
    const CheckRecord r = check_positivity(p);
    CHECK(r.verdict == Verdict::fail);
    CHECK(r.margin == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(r.witness == "c - c0");
  }
}

TEST_CASE("symmetry checker") {
  {
    const CheckRecord r = check_symmetry_S(flat_scheme());
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.margin == 0.0);
  }
  {
    const Problem p =
        upwind1d(DomainKind::box, 0.0, 1.0, 0.25, "1", "0", "1", "0");
    const CheckRecord r = check_symmetry_S(p);
    CHECK(r.verdict == Verdict::fail);
    CHECK(r.margin == -1.0);
    CHECK(r.note.find("negation") != std::string::npos);
  }
  {
    Problem p = prob1d(DomainKind::box, 0.0, 1.0, 0.25, "1", "1", "0");
    p.coeffs.q[1] = Expression::parse("2");
    const CheckRecord r = check_symmetry_S(p);
    CHECK(r.verdict == Verdict::fail);
    CHECK(r.margin == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.witness.find("q_(") != std::string::npos);
  }
}

TEST_CASE("drift constancy and linearity orthogonality") {
  const Problem wide = four_shift();
  {
    const CheckRecord r = check_drift_constancy(wide);
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.margin > 0.0);
    CHECK(r.note.find("worst spread") != std::string::npos);
  }
  {
    const CheckRecord r = check_linearity_orthogonality(wide);
    CHECK(r.verdict == Verdict::pass);
    CHECK(std::abs(r.margin) <= 1e-12);
    CHECK(r.note.find("1 basis function(s) tested") != std::string::npos);
  }
  {
    // q_1 = x1^2 against q_{-1} = 1: the drift x1^2 - 1 sweeps [-1, 3]
    Problem p = prob1d(DomainKind::box, -2.0, 2.0, 0.2, "1", "1", "0");
    p.coeffs.q[0] = Expression::parse("x1^2");
    const CheckRecord r = check_drift_constancy(p);
    CHECK(r.verdict == Verdict::fail);
    CHECK(r.margin == doctest::Approx(-4.0).epsilon(1e-9));
  }
}

TEST_CASE("quadratic form: x-independent coefficients give 3 - 8 delta") {
  Problem p = flat_scheme();
  for (double delta : {0.05, 0.1, 0.2, 0.24}) {
    p.constants.delta = delta;
    const CheckRecord r = check_quadratic_form(p);
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.margin == doctest::Approx(3.0 - 8.0 * delta).epsilon(1e-12));
    CHECK(r.note.find("budget constraint violated") == std::string::npos);
  }
  p.constants.delta = 0.3;
  const CheckRecord na = check_quadratic_form(p);
  CHECK(na.verdict == Verdict::not_applicable);
  CHECK(na.note.find("delta") != std::string::npos);
}

TEST_CASE("quadratic form: applicability gates") {
  {
    const Problem p =
        upwind1d(DomainKind::box, 0.0, 1.0, 0.25, "1", "0", "1", "0");
    const CheckRecord r = check_quadratic_form(p);
    CHECK(r.verdict == Verdict::not_applicable);
    CHECK(r.note.find("-Lambda_1") != std::string::npos);
  }
  {
    const Problem p =
        prob1d(DomainKind::box, 0.0, 1.0, 0.25, "-1", "1", "0");
    const CheckRecord r = check_quadratic_form(p);
    CHECK(r.verdict == Verdict::not_applicable);
    CHECK(r.note.find("q >= 0") != std::string::npos);
  }
}

TEST_CASE("quadratic form separates favorable from adverse drift slope") {
  {
    const Problem good =
        build_problem(preset_config("transport-decreasing-b"));
    const CheckRecord r = check_quadratic_form(good);
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.margin == doctest::Approx(5.45).epsilon(1e-4));
  }
  {
    const CheckRecord r = check_quadratic_form(adverse_transport());
    CHECK(r.verdict == Verdict::fail);
    CHECK(r.margin == doctest::Approx(-2.26).epsilon(1e-3));
    const std::vector<double> xi = parse_witness_vector(r.witness);
    REQUIRE(xi.size() == 2);
    const double dot = (xi[0] - xi[1]) / std::sqrt(2.0);
    CHECK(std::abs(dot) >= 0.99);
  }
}

TEST_CASE("quadratic form margin shifts with the zero-order weight") {
  const Problem base = build_problem(preset_config("transport-decreasing-b"));
  Problem richer = base;
  richer.coeffs.c = Expression::parse("11");
  const double m0 = check_quadratic_form(base).margin;
  const double m1 = check_quadratic_form(richer).margin;
  // adding 10 to c adds (2 - 8 delta) * 10 to every eigenvalue
  CHECK(m1 - m0 == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("rough pointwise condition") {
  {
    Problem p = prob1d(DomainKind::box, -2.0, 2.0, 0.2, "1+0.1*sin(x1)",
                       "100", "0");
    p.constants.K1 = 10.0;
    const CheckRecord rough = check_rough_condition(p);
    CHECK(rough.verdict == Verdict::pass);
    CHECK(rough.margin > 50.0);
    // the rough condition is the stronger one: the form check passes too
    CHECK(check_quadratic_form(p).verdict == Verdict::pass);
  }
  {
    const Problem p = build_problem(preset_config("degenerate-q-x2"));
    const CheckRecord r = check_rough_condition(p);
    CHECK(r.verdict == Verdict::fail);
    CHECK(r.margin == doctest::Approx(-43.0).epsilon(1e-12));
    CHECK(r.witness.find("lambda = (") != std::string::npos);
    REQUIRE(r.x.size() == 1);
    CHECK(std::abs(r.x[0]) <= 1e-15);
  }
}

TEST_CASE("explicit one-dimensional condition") {
  Problem p = flat_scheme();
  {
    const CheckRecord r = check_explicit_1d(p);
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.margin == doctest::Approx(1.8).epsilon(1e-12));
  }
  p.constants.delta = 0.5;
  {
    const CheckRecord r = check_explicit_1d(p);
    CHECK(r.margin == doctest::Approx(1.5).epsilon(1e-12));
  }
  {
    // textually different but numerically equal q on the two shifts
    Problem s = prob1d(DomainKind::box, 0.0, 1.0, 0.25, "1", "1", "0");
    s.coeffs.q[1] = Expression::parse("2-1");
    const CheckRecord r = check_explicit_1d(s);
    CHECK(r.verdict == Verdict::pass);
  }
  {
    const CheckRecord r = check_explicit_1d(four_shift());
    CHECK(r.verdict == Verdict::not_applicable);
    CHECK(r.note.find("{+1, -1}") != std::string::npos);
  }
}

TEST_CASE("nondegenerate shortcut") {
  {
    Problem p = prob1d(DomainKind::box, 0.0, 1.0, 0.25, "1", "1", "0");
    p.constants.kappa = 0.5;
    const CheckRecord r = check_nondegenerate_shortcut(p);
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.margin > 0.0);
    CHECK(r.margin <= 0.5 + 1e-12);
  }
  {
    const Problem p = build_problem(preset_config("degenerate-q-x2"));
    const CheckRecord r = check_nondegenerate_shortcut(p);
    CHECK(r.verdict == Verdict::fail);
    CHECK(r.margin == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(r.witness.find("kappa") != std::string::npos);
  }
  {
    const Problem p = prob1d(DomainKind::box, 0.0, 1.0, 0.25, "1", "1", "0");
    const CheckRecord r = check_nondegenerate_shortcut(p);
    CHECK(r.verdict == Verdict::not_applicable);
    CHECK(r.note.find("kappa > 0") != std::string::npos);
  }
}

TEST_CASE("verdicts and form margins are invariant under space scaling") {
  // x -> x/2 with q scaled by 1/4: same problem in scaled variables.
  const RunConfig cfg = preset_config("degenerate-q-x2");
  RunConfig half = cfg;
  half.lower = {-1.0};
  half.upper = {1.0};
  half.h = 0.1;
  half.K1 = 4.0;    // K1 / kappa_scale^2
  half.kappa = 0.025; // kappa * kappa_scale^2
  // 0.25 * ((2 x)^2) = x^2: the q string is literally unchanged
  const Problem a = build_problem(cfg);
  const Problem b = build_problem(half);
  const AssumptionReport ra = run_checks(a, {"all"});
  const AssumptionReport rb = run_checks(b, {"all"});
  REQUIRE(ra.records.size() == 8);
  REQUIRE(rb.records.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    INFO("check ", ra.records[i].name);
    CHECK(ra.records[i].name == rb.records[i].name);
    CHECK(ra.records[i].verdict == rb.records[i].verdict);
    if (ra.records[i].name == "quadratic-form" ||
        ra.records[i].name == "rough-condition")
      CHECK(std::abs(ra.records[i].margin - rb.records[i].margin) <= 1e-10);
  }
}

TEST_CASE("check runner") {
  const Problem p = prob1d(DomainKind::box, -1.0, 1.0, 0.2, "1", "1", "1");
  CHECK(all_check_names().size() == 8);
  {
    const AssumptionReport r = run_checks(p, {"all"});
    REQUIRE(r.records.size() == 8);
    const auto names = all_check_names();
    for (std::size_t i = 0; i < 8; ++i) CHECK(r.records[i].name == names[i]);
    CHECK(r.all_pass() == !r.any_fail());
  }
  expect_error<ValidationError>(
      [&] { run_checks(p, {"bogus"}); }, "unknown check name");
  {
    const AssumptionReport r =
        run_checks(p, {"all"}, SampleSpec{}, /*h_sweep=*/true);
    REQUIRE(r.records.size() == 24);
    CHECK(r.records[0].name.find(" [h=0.2]") != std::string::npos);
    CHECK(r.records[8].name.find(" [h=0.1]") != std::string::npos);
    CHECK(r.records[16].name.find(" [h=0.05]") != std::string::npos);
  }
  {
    QuadraticFormBudgets budgets;
    budgets.r_lambda_mu = 10.0;
    const AssumptionReport r = run_checks(flat_scheme(), {"quadratic-form"},
                                          SampleSpec{}, false, budgets);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].verdict == Verdict::pass); // verdict is the form itself
    CHECK(r.records[0].note.find("budget constraint violated") !=
          std::string::npos);
  }
}
