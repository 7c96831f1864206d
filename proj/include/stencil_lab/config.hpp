#pragma once

#include "stencil_lab/operators.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace stencil_lab {

/// One [[stencil]] table: a shift vector with its coefficient expressions
/// and difference-quotient weight.
struct StencilEntry {
  std::vector<int> lambda;
  std::string q = "0";
  std::string p = "0";
  double tau = 1.0;

  bool operator==(const StencilEntry&) const = default;
};

/// Everything a run needs, as parsed: expressions stay source text so the
/// config round-trips byte-faithfully (parse -> render -> parse == parse).
struct RunConfig {
  // [problem]
  int dimension = 1;
  std::string kind = "box"; // box | periodic
  std::vector<double> lower, upper;
  double h = 0.1;
  double T = 1.0;
  // [constants]
  double c0 = 1.0;
  double delta = 0.2;
  double K1 = 1.0;
  double tau0 = 0.0;
  double theta = 0.0;
  double kappa = 0.0;
  int m = 1;
  // [coefficients]
  std::string c = "1";
  std::string f = "0";
  std::string g = "0";
  // [[stencil]]
  std::vector<StencilEntry> stencil;
  // [run]
  double tol = 1e-10;
  int t_samples = 17;
  int k = 2;
  long dump_every = 0;
  std::string output;
  std::string mode = "parabolic"; // parabolic | elliptic
  std::string phi = "sin(x1)";
  std::string checks = "all";
  std::string exact; // known limit solution, empty = none
  std::vector<double> h_list;
  std::vector<double> x_list;
  double r_budget = -1.0; // < 0 = not supplied
  double p_budget = -1.0;
  bool strict = false;

  bool operator==(const RunConfig&) const = default;
};

/// Sectioned key-value text: [section] headers, [[stencil]] tables, `key =
/// value` lines, `#` comments. Values: quoted strings, numbers, booleans,
/// and arrays of numbers. Unknown sections or keys are errors. Throws
/// ParseError whose message carries the 1-based line number.
RunConfig parse_config(std::string_view text);
/// Reads and parses a file; the open failure is a ParseError too.
RunConfig load_config(const std::string& path);
/// Canonical text form; parse(render(cfg)) == cfg.
std::string render_config(const RunConfig& cfg);

/// Builds and validates the Problem: parses the coefficient expressions,
/// assembles domain and stencil, and applies the artificial-diffusion shift
/// theta to every p when theta > 0. Throws ParseError / ValidationError
/// naming the offending field.
Problem build_problem(const RunConfig& cfg);

} // namespace stencil_lab
