#include "stencil_lab/presets.hpp"

#include <numbers>

#include "stencil_lab/errors.hpp"

namespace stencil_lab {

namespace {

StencilEntry entry(std::vector<int> lambda, std::string q, std::string p,
                   double tau = 1.0) {
  StencilEntry e;
  e.lambda = std::move(lambda);
  e.q = std::move(q);
  e.p = std::move(p);
  e.tau = tau;
  return e;
}

/// Heat-type model problem on a wide box: pure second differences with
/// constant diffusion, Dirichlet zero data, a smooth bounded source.
RunConfig model_1d() {
  RunConfig c;
  c.dimension = 1;
  c.kind = "box";
  c.lower = {-60.0};
  c.upper = {60.0};
  c.h = 0.5;
  c.T = 1.0;
  c.c = "1";
  c.f = "1/(1+x1^2)";
  c.g = "0";
  c.stencil = {entry({1}, "1", "0"), entry({-1}, "1", "0")};
  return c;
}

/// First-order transport with a decreasing drift b(x1) = -max(min(x1,1),-1),
/// written as an antisymmetric pair p_{+1} = b/2, p_{-1} = -b/2 and then
/// shifted by theta = 100*sup|b'| + 1 to restore one-sided positivity.
/// The box is wide and the source varies on a scale larger than the
/// numerical-viscosity length sqrt(2*theta*h*T) of the coarsest mesh, so
/// solution functionals stabilize across mesh refinements.
RunConfig transport_decreasing_b() {
  RunConfig c;
  c.dimension = 1;
  c.kind = "box";
  c.lower = {-60.0};
  c.upper = {60.0};
  c.h = 0.05;
  c.T = 1.0;
  c.theta = 101.0;
  c.c = "1";
  c.f = "1/(1+(x1/12)^2)";
  c.g = "0";
  c.stencil = {entry({1}, "0", "(-0.5)*max(min(x1,1),-1)"),
               entry({-1}, "0", "0.5*max(min(x1,1),-1)")};
  return c;
}

/// Periodic problem whose elliptic solution is exactly cos(x1): the source
/// is chosen as -(L applied to cos) = 3*cos(x1) for q = 1, c = 2.
RunConfig manufactured_cos() {
  RunConfig c;
  const double pi = std::numbers::pi;
  c.dimension = 1;
  c.kind = "periodic";
  c.lower = {0.0};
  c.upper = {2.0 * pi};
  c.h = pi / 16.0;
  c.T = 1.0;
  c.c = "2";
  c.f = "3*cos(x1)";
  c.g = "0";
  c.exact = "cos(x1)";
  c.h_list = {pi / 8.0, pi / 16.0, pi / 32.0, pi / 64.0};
  c.stencil = {entry({1}, "1", "0"), entry({-1}, "1", "0")};
  return c;
}

/// Diffusion that degenerates at the origin: q = x1^2 vanishes where the
/// mesh-independence conditions are hardest, with a small kappa floor kept
/// in the constants for the resolvent route.
RunConfig degenerate_q_x2() {
  RunConfig c;
  c.dimension = 1;
  c.kind = "box";
  c.lower = {-2.0};
  c.upper = {2.0};
  c.h = 0.2;
  c.T = 1.0;
  c.kappa = 0.1;
  c.c = "1";
  c.f = "1";
  c.g = "0";
  c.stencil = {entry({1}, "x1^2", "0"), entry({-1}, "x1^2", "0")};
  return c;
}

/// One-sided first-order scheme: a single forward direction with p = 1 and
/// no second differences, on a periodic interval.
RunConfig upwind_1d() {
  RunConfig c;
  const double pi = std::numbers::pi;
  c.dimension = 1;
  c.kind = "periodic";
  c.lower = {0.0};
  c.upper = {2.0 * pi};
  c.h = pi / 16.0;
  c.T = 1.0;
  c.c = "1";
  c.f = "sin(x1)";
  c.g = "0";
  c.stencil = {entry({1}, "0", "1")};
  return c;
}

} // namespace

std::vector<std::string> preset_names() {
  return {"model-1d", "transport-decreasing-b", "manufactured-cos",
          "degenerate-q-x2", "upwind-1d"};
}

RunConfig preset_config(const std::string& name) {
  if (name == "model-1d") return model_1d();
  if (name == "transport-decreasing-b") return transport_decreasing_b();
  if (name == "manufactured-cos") return manufactured_cos();
  if (name == "degenerate-q-x2") return degenerate_q_x2();
  if (name == "upwind-1d") return upwind_1d();
  std::string names;
  for (const auto& n : preset_names()) {
    if (!names.empty()) names += ", ";
    names += n;
  }
  throw ValidationError("unknown preset '" + name + "' (available: " + names +
                        ")");
}

} // namespace stencil_lab
