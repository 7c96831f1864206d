#include "doctest.h"

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "stencil_lab/errors.hpp"
#include "stencil_lab/richardson.hpp"
#include "test_problems.hpp"

using namespace stencil_lab;

namespace {
const double pi = std::numbers::pi;

Problem manufactured() {
  Problem p =
      prob1d(DomainKind::periodic, 0.0, 2.0 * pi, pi / 16.0, "1", "2",
             "3*cos(x1)");
  return p;
}

} // namespace

TEST_CASE("mesh-halving weights for small k") {
  ExtrapolationWeights w0 = vandermonde_weights(0);
  REQUIRE(w0.b.size() == 1);
  CHECK(w0.b[0] == doctest::Approx(1.0).epsilon(1e-14));

  ExtrapolationWeights w1 = vandermonde_weights(1);
  REQUIRE(w1.b.size() == 2);
  CHECK(w1.b[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(w1.b[1] == doctest::Approx(2.0).epsilon(1e-12));

  ExtrapolationWeights w2 = vandermonde_weights(2);
  REQUIRE(w2.b.size() == 3);
  CHECK(w2.b[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(w2.b[1] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(w2.b[2] == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("weights sum to one and kill the eliminated orders") {
  for (int k = 0; k <= 8; ++k) {
    ExtrapolationWeights w = vandermonde_weights(k);
    double sum = 0.0;
    for (double b : w.b) sum += b;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    for (int order = 1; order <= k; ++order) {
      double moment = 0.0;
      for (int j = 0; j <= k; ++j)
        moment += w.b[static_cast<std::size_t>(j)] *
                  std::pow(2.0, -static_cast<double>(order * j));
      CHECK(std::fabs(moment) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(vandermonde_weights(-1), ValidationError);
  CHECK_THROWS_AS(vandermonde_weights(13), ValidationError);
}

TEST_CASE("k = 0 extrapolation is the plain solve") {
  Problem p = manufactured();
  GridFunction u0 = extrapolate(p, 0, 1e-10);
  EllipticResult direct = solve_elliptic(p);
  CHECK(max_abs_diff(u0, direct.u) <= 1e-11);
}

TEST_CASE("k = 2 beats k = 0 on the manufactured problem") {
  Problem p = manufactured();
  GridFunction exact =
      GridFunction::sample(Expression::parse("cos(x1)"), p.domain, 0.0);
  const double err0 = max_abs_diff(extrapolate(p, 0, 1e-10), exact);
  const double err2 = max_abs_diff(extrapolate(p, 2, 1e-10), exact);
  CHECK(err0 > 1e-4); // the plain scheme really is second order
  CHECK(err2 <= err0 / 4.0);
}

TEST_CASE("observed order on synthetic and degenerate data") {
  std::vector<std::pair<double, double>> rows = {
      {0.4, 0.37 * 0.16}, {0.2, 0.37 * 0.04}, {0.1, 0.37 * 0.01}};
  CHECK(observed_order(rows) == doctest::Approx(2.0).epsilon(1e-9));

  std::vector<std::pair<double, double>> two = {{0.4, 0.1}, {0.2, 0.05}};
  CHECK_THROWS_AS(observed_order(two), ValidationError);

  std::vector<std::pair<double, double>> flat = {
      {0.4, 0.0}, {0.2, 0.0}, {0.1, 0.0}};
  CHECK(std::isinf(observed_order(flat)));
}
