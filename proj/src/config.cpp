#include "stencil_lab/config.hpp"

#include "stencil_lab/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace stencil_lab {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw ParseError("config line " + std::to_string(line) + ": " + what, line);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

/// Cuts an unquoted '#' comment off the line.
std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    else if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

struct Value {
  enum class Kind { text, number, boolean, array };
  Kind kind = Kind::number;
  std::string text;
  double number = 0.0;
  bool boolean = false;
  std::vector<double> array;
};

double parse_number(std::string_view s, std::size_t line) {
  const std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty())
    fail(line, "expected a number, got '" + buf + "'");
  return v;
}

Value parse_value(std::string_view s, std::size_t line) {
  Value v;
  if (s.empty()) fail(line, "missing value after '='");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"' ||
        s.substr(1, s.size() - 2).find('"') != std::string_view::npos)
      fail(line, "unterminated or malformed string");
    v.kind = Value::Kind::text;
    v.text = std::string(s.substr(1, s.size() - 2));
    return v;
  }
  if (s == "true" || s == "false") {
    v.kind = Value::Kind::boolean;
    v.boolean = (s == "true");
    return v;
  }
  if (s.front() == '[') {
    if (s.back() != ']') fail(line, "unterminated array");
    v.kind = Value::Kind::array;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    while (!body.empty()) {
      const std::size_t comma = body.find(',');
      std::string_view item = trim(body.substr(0, comma));
      if (item.empty()) fail(line, "empty array element");
      v.array.push_back(parse_number(item, line));
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
      if (body.empty()) fail(line, "trailing comma in array");
    }
    return v;
  }
  v.kind = Value::Kind::number;
  v.number = parse_number(s, line);
  return v;
}

double want_number(const Value& v, std::size_t line, const char* key) {
  if (v.kind != Value::Kind::number)
    fail(line, std::string("key '") + key + "' expects a number");
  return v.number;
}

long want_integer(const Value& v, std::size_t line, const char* key) {
  const double d = want_number(v, line, key);
  const double r = std::round(d);
  if (std::fabs(d - r) > 1e-9)
    fail(line, std::string("key '") + key + "' expects an integer");
  return static_cast<long>(r);
}

std::string want_text(const Value& v, std::size_t line, const char* key) {
  if (v.kind != Value::Kind::text)
    fail(line, std::string("key '") + key + "' expects a quoted string");
  return v.text;
}

bool want_boolean(const Value& v, std::size_t line, const char* key) {
  if (v.kind != Value::Kind::boolean)
    fail(line, std::string("key '") + key + "' expects true or false");
  return v.boolean;
}

std::vector<double> want_array(const Value& v, std::size_t line,
                               const char* key) {
  if (v.kind != Value::Kind::array)
    fail(line, std::string("key '") + key + "' expects an array");
  return v.array;
}

std::vector<int> want_int_array(const Value& v, std::size_t line,
                                const char* key) {
  const auto arr = want_array(v, line, key);
  std::vector<int> out;
  out.reserve(arr.size());
  for (double d : arr) {
    const double r = std::round(d);
    if (std::fabs(d - r) > 1e-9)
      fail(line, std::string("key '") + key + "' expects integer entries");
    out.push_back(static_cast<int>(r));
  }
  return out;
}

std::string num_17g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_array(std::span<const double> a) {
  std::string s = "[";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ", ";
    s += num_17g(a[i]);
  }
  return s + "]";
}

std::string render_int_array(std::span<const int> a) {
  std::string s = "[";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(a[i]);
  }
  return s + "]";
}

} // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  cfg.lower.clear();
  cfg.upper.clear();
  std::string section;
  StencilEntry* entry = nullptr;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                      : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view ln = trim(strip_comment(raw));
    if (ln.empty()) continue;

    if (ln.front() == '[') {
      if (ln.size() >= 4 && ln.substr(0, 2) == "[[" &&
          ln.substr(ln.size() - 2) == "]]") {
        const std::string name{trim(ln.substr(2, ln.size() - 4))};
        if (name != "stencil")
          fail(line_no, "unknown table array '" + name + "'");
        cfg.stencil.emplace_back();
        entry = &cfg.stencil.back();
        section = "stencil";
        continue;
      }
      if (ln.back() != ']') fail(line_no, "malformed section header");
      const std::string name{trim(ln.substr(1, ln.size() - 2))};
      if (name == "stencil")
        fail(line_no, "stencil entries use [[stencil]] tables");
      if (name != "problem" && name != "constants" && name != "coefficients" &&
          name != "run")
        fail(line_no, "unknown section '" + name + "'");
      section = name;
      entry = nullptr;
      continue;
    }

    const std::size_t eq = ln.find('=');
    if (eq == std::string_view::npos)
      fail(line_no, "expected 'key = value'");
    const std::string key{trim(ln.substr(0, eq))};
    if (key.empty()) fail(line_no, "missing key before '='");
    const Value v = parse_value(trim(ln.substr(eq + 1)), line_no);
    if (section.empty())
      fail(line_no, "key '" + key + "' appears before any section");

    if (section == "problem") {
      if (key == "dimension")
        cfg.dimension = static_cast<int>(want_integer(v, line_no, "dimension"));
      else if (key == "kind") cfg.kind = want_text(v, line_no, "kind");
      else if (key == "lower") cfg.lower = want_array(v, line_no, "lower");
      else if (key == "upper") cfg.upper = want_array(v, line_no, "upper");
      else if (key == "h") cfg.h = want_number(v, line_no, "h");
      else if (key == "T") cfg.T = want_number(v, line_no, "T");
      else fail(line_no, "unknown key '" + key + "' in [problem]");
    } else if (section == "constants") {
      if (key == "c0") cfg.c0 = want_number(v, line_no, "c0");
      else if (key == "delta") cfg.delta = want_number(v, line_no, "delta");
      else if (key == "K1") cfg.K1 = want_number(v, line_no, "K1");
      else if (key == "tau0") cfg.tau0 = want_number(v, line_no, "tau0");
      else if (key == "theta") cfg.theta = want_number(v, line_no, "theta");
      else if (key == "kappa") cfg.kappa = want_number(v, line_no, "kappa");
      else if (key == "m")
        cfg.m = static_cast<int>(want_integer(v, line_no, "m"));
      else fail(line_no, "unknown key '" + key + "' in [constants]");
    } else if (section == "coefficients") {
      if (key == "c") cfg.c = want_text(v, line_no, "c");
      else if (key == "f") cfg.f = want_text(v, line_no, "f");
      else if (key == "g") cfg.g = want_text(v, line_no, "g");
      else fail(line_no, "unknown key '" + key + "' in [coefficients]");
    } else if (section == "stencil") {
      if (!entry) fail(line_no, "stencil key outside a [[stencil]] table");
      if (key == "lambda") entry->lambda = want_int_array(v, line_no, "lambda");
      else if (key == "q") entry->q = want_text(v, line_no, "q");
      else if (key == "p") entry->p = want_text(v, line_no, "p");
      else if (key == "tau") entry->tau = want_number(v, line_no, "tau");
      else fail(line_no, "unknown key '" + key + "' in [[stencil]]");
    } else { // run
      if (key == "tol") cfg.tol = want_number(v, line_no, "tol");
      else if (key == "t_samples")
        cfg.t_samples = static_cast<int>(want_integer(v, line_no, "t_samples"));
      else if (key == "k")
        cfg.k = static_cast<int>(want_integer(v, line_no, "k"));
      else if (key == "dump_every")
        cfg.dump_every = want_integer(v, line_no, "dump_every");
      else if (key == "output") cfg.output = want_text(v, line_no, "output");
      else if (key == "mode") cfg.mode = want_text(v, line_no, "mode");
      else if (key == "phi") cfg.phi = want_text(v, line_no, "phi");
      else if (key == "checks") cfg.checks = want_text(v, line_no, "checks");
      else if (key == "exact") cfg.exact = want_text(v, line_no, "exact");
      else if (key == "h_list") cfg.h_list = want_array(v, line_no, "h_list");
      else if (key == "x_list") cfg.x_list = want_array(v, line_no, "x_list");
      else if (key == "r_budget")
        cfg.r_budget = want_number(v, line_no, "r_budget");
      else if (key == "p_budget")
        cfg.p_budget = want_number(v, line_no, "p_budget");
      else if (key == "strict") cfg.strict = want_boolean(v, line_no, "strict");
      else fail(line_no, "unknown key '" + key + "' in [run]");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open config file '" + path + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string render_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[problem]\n";
  os << "dimension = " << c.dimension << "\n";
  os << "kind = \"" << c.kind << "\"\n";
  os << "lower = " << render_array(c.lower) << "\n";
  os << "upper = " << render_array(c.upper) << "\n";
  os << "h = " << num_17g(c.h) << "\n";
  os << "T = " << num_17g(c.T) << "\n";
  os << "\n[constants]\n";
  os << "c0 = " << num_17g(c.c0) << "\n";
  os << "delta = " << num_17g(c.delta) << "\n";
  os << "K1 = " << num_17g(c.K1) << "\n";
  os << "tau0 = " << num_17g(c.tau0) << "\n";
  os << "theta = " << num_17g(c.theta) << "\n";
  os << "kappa = " << num_17g(c.kappa) << "\n";
  os << "m = " << c.m << "\n";
  os << "\n[coefficients]\n";
  os << "c = \"" << c.c << "\"\n";
  os << "f = \"" << c.f << "\"\n";
  os << "g = \"" << c.g << "\"\n";
  for (const auto& e : c.stencil) {
    os << "\n[[stencil]]\n";
    os << "lambda = " << render_int_array(e.lambda) << "\n";
    os << "q = \"" << e.q << "\"\n";
    os << "p = \"" << e.p << "\"\n";
    os << "tau = " << num_17g(e.tau) << "\n";
  }
  os << "\n[run]\n";
  os << "tol = " << num_17g(c.tol) << "\n";
  os << "t_samples = " << c.t_samples << "\n";
  os << "k = " << c.k << "\n";
  os << "dump_every = " << c.dump_every << "\n";
  os << "output = \"" << c.output << "\"\n";
  os << "mode = \"" << c.mode << "\"\n";
  os << "phi = \"" << c.phi << "\"\n";
  os << "checks = \"" << c.checks << "\"\n";
  os << "exact = \"" << c.exact << "\"\n";
  os << "h_list = " << render_array(c.h_list) << "\n";
  os << "x_list = " << render_array(c.x_list) << "\n";
  os << "r_budget = " << num_17g(c.r_budget) << "\n";
  os << "p_budget = " << num_17g(c.p_budget) << "\n";
  os << "strict = " << (c.strict ? "true" : "false") << "\n";
  return os.str();
}

namespace {

Expression parse_field_expr(const std::string& src, const std::string& field) {
  try {
    return Expression::parse(src);
  } catch (const ParseError& e) {
    throw ParseError(field + ": " + e.what(), e.offset);
  }
}

} // namespace

Problem build_problem(const RunConfig& cfg) {
  if (cfg.dimension < 1)
    throw ValidationError("problem.dimension must be >= 1");
  DomainKind kind;
  if (cfg.kind == "box") kind = DomainKind::box;
  else if (cfg.kind == "periodic") kind = DomainKind::periodic;
  else
    throw ValidationError("problem.kind must be \"box\" or \"periodic\", got \"" +
                          cfg.kind + "\"");
  const auto d = static_cast<std::size_t>(cfg.dimension);
  if (cfg.lower.size() != d || cfg.upper.size() != d)
    throw ValidationError(
        "problem.lower/upper must each have 'dimension' entries");
  Domain dom(kind, cfg.lower, cfg.upper, cfg.h);

  if (cfg.stencil.empty())
    throw ValidationError("at least one [[stencil]] entry is required");
  Stencil st;
  CoefficientSet co;
  for (std::size_t i = 0; i < cfg.stencil.size(); ++i) {
    const auto& e = cfg.stencil[i];
    const std::string tag = "stencil[" + std::to_string(i) + "]";
    st.vectors.push_back(e.lambda);
    st.tau.push_back(e.tau);
    co.q.push_back(parse_field_expr(e.q, tag + ".q"));
    co.p.push_back(parse_field_expr(e.p, tag + ".p"));
  }
  st.tau0 = cfg.tau0;
  co.c = parse_field_expr(cfg.c, "coefficients.c");
  co.f = parse_field_expr(cfg.f, "coefficients.f");
  co.g = parse_field_expr(cfg.g, "coefficients.g");

  ProblemConstants pc;
  pc.c0 = cfg.c0;
  pc.delta = cfg.delta;
  pc.K1 = cfg.K1;
  pc.m = cfg.m;
  pc.T = cfg.T;
  pc.theta = 0.0;
  pc.kappa = cfg.kappa;

  Problem prob{std::move(dom), std::move(st), std::move(co), pc};
  if (cfg.theta > 0.0) prob = prob.add_theta(cfg.theta);
  prob.validate();
  return prob;
}

} // namespace stencil_lab
