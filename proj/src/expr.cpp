#include "stencil_lab/expr.hpp"

#include "stencil_lab/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>

namespace stencil_lab {

struct Expression::Node {
  enum class Kind { number, variable, add, sub, mul, div, pow, neg, call };
  Kind kind;
  double value = 0.0;            // number
  int var = 0;                   // variable: 0 = t, i >= 1 = x_i
  FuncKind func = FuncKind::sin; // call
  std::vector<NodePtr> kids;
};

namespace {

using Node = Expression::Node;
using NodePtr = Expression::NodePtr;
using Kind = Node::Kind;

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::number;
  n->value = v;
  return n;
}

NodePtr make_variable(int index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::variable;
  n->var = index;
  return n;
}

NodePtr make_node(Kind k, std::vector<NodePtr> kids) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->kids = std::move(kids);
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == Kind::number && n->value == v;
}

// Smart constructors fold the trivial algebraic identities so symbolic
// derivatives stay readable (d/dt sin(x1) must come out as 0, not
// cos(x1)*0). Folding a*0 -> 0 assumes the dropped factor is defined at the
// evaluation point, the usual symbolic convention.
NodePtr make_add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a->kind == Kind::number && b->kind == Kind::number)
    return make_number(a->value + b->value);
  return make_node(Kind::add, {std::move(a), std::move(b)});
}

NodePtr make_neg(NodePtr a);

NodePtr make_sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return make_neg(std::move(b));
  if (a->kind == Kind::number && b->kind == Kind::number)
    return make_number(a->value - b->value);
  return make_node(Kind::sub, {std::move(a), std::move(b)});
}

NodePtr make_mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_number(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a->kind == Kind::number && b->kind == Kind::number)
    return make_number(a->value * b->value);
  return make_node(Kind::mul, {std::move(a), std::move(b)});
}

NodePtr make_div(NodePtr a, NodePtr b) {
  if (is_const(b, 1.0)) return a;
  // 0/b is not folded: it must still raise a domain error when b == 0.
  return make_node(Kind::div, {std::move(a), std::move(b)});
}

NodePtr make_neg(NodePtr a) {
  if (a->kind == Kind::number) return make_number(-a->value);
  if (a->kind == Kind::neg) return a->kids[0];
  return make_node(Kind::neg, {std::move(a)});
}

NodePtr make_pow(NodePtr a, NodePtr b) {
  if (is_const(b, 1.0)) return a;
  return make_node(Kind::pow, {std::move(a), std::move(b)});
}

NodePtr make_call(FuncKind f, std::vector<NodePtr> kids) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::call;
  n->func = f;
  n->kids = std::move(kids);
  return n;
}

struct FuncInfo {
  const char* name;
  FuncKind kind;
  int arity;
};

constexpr FuncInfo k_funcs[] = {
    {"sin", FuncKind::sin, 1}, {"cos", FuncKind::cos, 1},
    {"exp", FuncKind::exp, 1}, {"sqrt", FuncKind::sqrt, 1},
    {"abs", FuncKind::abs, 1}, {"min", FuncKind::min, 2},
    {"max", FuncKind::max, 2}, {"pos", FuncKind::pos, 1},
    {"neg", FuncKind::neg, 1}, {"sel", FuncKind::sel, 3},
};

const FuncInfo* func_info(FuncKind k) {
  for (const auto& f : k_funcs)
    if (f.kind == k) return &f;
  return nullptr;
}

const FuncInfo* func_by_name(std::string_view name) {
  for (const auto& f : k_funcs)
    if (name == f.name) return &f;
  return nullptr;
}

// --- parser -----------------------------------------------------------

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr run() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size())
      fail("expected end of input, operator, or ')'");
    return e;
  }

private:
  std::string_view src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& expected) {
    throw ParseError("syntax error at byte " + std::to_string(pos_) + ": " +
                         expected,
                     pos_);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    for (;;) {
      if (eat('+'))
        e = make_node(Kind::add, {e, parse_term()});
      else if (eat('-'))
        e = make_node(Kind::sub, {e, parse_term()});
      else
        return e;
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_factor();
    for (;;) {
      if (eat('*'))
        e = make_node(Kind::mul, {e, parse_factor()});
      else if (eat('/'))
        e = make_node(Kind::div, {e, parse_factor()});
      else
        return e;
    }
  }

  // Unary minus binds looser than '^': -x1^2 is -(x1^2), while the exponent
  // itself may be signed: 2^-3 parses.
  NodePtr parse_factor() {
    if (eat('-')) return make_node(Kind::neg, {parse_factor()});
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (eat('^')) return make_node(Kind::pow, {base, parse_factor()});
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("expected number, variable, function, or '('");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    fail("expected number, variable, function, or '('");
  }

  NodePtr parse_number() {
    const char* begin = src_.data() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("expected number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make_number(v);
  }

  NodePtr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string_view name = src_.substr(start, pos_ - start);
    if (name == "t") return make_variable(0);
    if (name.size() >= 2 && name[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
      if (digits) {
        int idx = std::atoi(std::string(name.substr(1)).c_str());
        if (idx >= 1) return make_variable(idx);
      }
    }
    if (const FuncInfo* f = func_by_name(name)) {
      if (!eat('(')) fail("expected '(' after function name");
      std::vector<NodePtr> args;
      args.push_back(parse_expr());
      while (eat(',')) args.push_back(parse_expr());
      if (!eat(')')) fail("expected ')' or ','");
      if (static_cast<int>(args.size()) != f->arity)
        throw ParseError("function '" + std::string(name) + "' expects " +
                             std::to_string(f->arity) + " argument(s), got " +
                             std::to_string(args.size()) + " (at byte " +
                             std::to_string(start) + ")",
                         start);
      return make_call(f->kind, std::move(args));
    }
    throw ParseError("unknown identifier '" + std::string(name) +
                         "' at byte " + std::to_string(start),
                     start);
  }
};

// --- rendering --------------------------------------------------------

int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::add:
    case Kind::sub: return 1;
    case Kind::mul:
    case Kind::div: return 2;
    case Kind::neg: return 3;
    case Kind::pow: return 4;
    default: return 5;
  }
}

void render_node(const Node& n, std::string& out);

void render_child(const Node& child, int min_prec, std::string& out) {
  bool parens = precedence(child) < min_prec;
  if (parens) out += '(';
  render_node(child, out);
  if (parens) out += ')';
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void render_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::number: {
      if (n.value < 0) {
        // keep negative literals one token when re-parsed: render via neg
        out += '-';
        out += format_double(-n.value);
      } else {
        out += format_double(n.value);
      }
      return;
    }
    case Kind::variable:
      out += n.var == 0 ? std::string("t") : "x" + std::to_string(n.var);
      return;
    case Kind::add:
      render_child(*n.kids[0], 1, out);
      out += " + ";
      render_child(*n.kids[1], 2, out);
      return;
    case Kind::sub:
      render_child(*n.kids[0], 1, out);
      out += " - ";
      render_child(*n.kids[1], 2, out);
      return;
    case Kind::mul:
      render_child(*n.kids[0], 2, out);
      out += "*";
      render_child(*n.kids[1], 3, out);
      return;
    case Kind::div:
      render_child(*n.kids[0], 2, out);
      out += "/";
      render_child(*n.kids[1], 3, out);
      return;
    case Kind::neg:
      out += '-';
      render_child(*n.kids[0], 3, out);
      return;
    case Kind::pow:
      render_child(*n.kids[0], 5, out);
      out += "^";
      render_child(*n.kids[1], 4, out);
      return;
    case Kind::call: {
      out += func_info(n.func)->name;
      out += '(';
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (i) out += ", ";
        render_node(*n.kids[i], out);
      }
      out += ')';
      return;
    }
  }
}

// --- evaluation -------------------------------------------------------

struct EvalCtx {
  double t;
  std::span<const double> x;
};

[[noreturn]] void eval_fail(const Node& n, const EvalCtx& ctx, const char* what) {
  std::string expr;
  render_node(n, expr);
  std::string msg = std::string(what) + " in '" + expr + "' at (t=" +
                    format_double(ctx.t) + ", x=(";
  for (std::size_t i = 0; i < ctx.x.size(); ++i) {
    if (i) msg += ", ";
    msg += format_double(ctx.x[i]);
  }
  msg += "))";
  throw EvalError(msg);
}

double eval_node(const Node& n, const EvalCtx& ctx) {
  switch (n.kind) {
    case Kind::number: return n.value;
    case Kind::variable: {
      if (n.var == 0) return ctx.t;
      if (static_cast<std::size_t>(n.var) > ctx.x.size())
        eval_fail(n, ctx, "variable index exceeds point dimension");
      return ctx.x[static_cast<std::size_t>(n.var - 1)];
    }
    case Kind::add: return eval_node(*n.kids[0], ctx) + eval_node(*n.kids[1], ctx);
    case Kind::sub: return eval_node(*n.kids[0], ctx) - eval_node(*n.kids[1], ctx);
    case Kind::mul: return eval_node(*n.kids[0], ctx) * eval_node(*n.kids[1], ctx);
    case Kind::div: {
      double b = eval_node(*n.kids[1], ctx);
      if (b == 0.0) eval_fail(n, ctx, "division by zero");
      return eval_node(*n.kids[0], ctx) / b;
    }
    case Kind::neg: return -eval_node(*n.kids[0], ctx);
    case Kind::pow: {
      double a = eval_node(*n.kids[0], ctx);
      double b = eval_node(*n.kids[1], ctx);
      double r = std::pow(a, b);
      if (!std::isfinite(r)) eval_fail(n, ctx, "power out of domain");
      return r;
    }
    case Kind::call: {
      double a = eval_node(*n.kids[0], ctx);
      switch (n.func) {
        case FuncKind::sin: return std::sin(a);
        case FuncKind::cos: return std::cos(a);
        case FuncKind::exp: {
          double r = std::exp(a);
          if (!std::isfinite(r)) eval_fail(n, ctx, "exp overflow");
          return r;
        }
        case FuncKind::sqrt:
          if (a < 0.0) eval_fail(n, ctx, "sqrt of negative argument");
          return std::sqrt(a);
        case FuncKind::abs: return std::fabs(a);
        case FuncKind::pos: return a > 0.0 ? a : 0.0;
        case FuncKind::neg: return a < 0.0 ? -a : 0.0;
        case FuncKind::min: return std::fmin(a, eval_node(*n.kids[1], ctx));
        case FuncKind::max: return std::fmax(a, eval_node(*n.kids[1], ctx));
        case FuncKind::sel:
          return a > 0.0 ? eval_node(*n.kids[1], ctx) : eval_node(*n.kids[2], ctx);
      }
      eval_fail(n, ctx, "unreachable");
    }
  }
  eval_fail(n, ctx, "unreachable");
}

// --- differentiation --------------------------------------------------

NodePtr diff(const NodePtr& n, int var);

NodePtr sel3(NodePtr c, NodePtr a, NodePtr b) {
  return make_call(FuncKind::sel, {std::move(c), std::move(a), std::move(b)});
}

NodePtr diff_call(const NodePtr& n, int var) {
  const NodePtr& u = n->kids[0];
  NodePtr du = diff(u, var);
  switch (n->func) {
    case FuncKind::sin:
      return make_mul(make_call(FuncKind::cos, {u}), du);
    case FuncKind::cos:
      return make_neg(make_mul(make_call(FuncKind::sin, {u}), du));
    case FuncKind::exp:
      return make_mul(make_call(FuncKind::exp, {u}), du);
    case FuncKind::sqrt:
      return make_div(du, make_mul(make_number(2.0),
                                   make_call(FuncKind::sqrt, {u})));
    case FuncKind::abs:
      // case split: u' for u > 0, -u' for u < 0; 0 on the tie u = 0
      return sel3(u, du, sel3(make_neg(u), make_neg(du), make_number(0.0)));
    case FuncKind::pos:
      return sel3(u, du, make_number(0.0));
    case FuncKind::neg:
      return sel3(make_neg(u), make_neg(du), make_number(0.0));
    case FuncKind::min: {
      const NodePtr& v = n->kids[1];
      NodePtr dv = diff(v, var);
      // u < v -> u', else v' (tie takes the second argument's branch)
      return sel3(make_sub(v, u), du, dv);
    }
    case FuncKind::max: {
      const NodePtr& v = n->kids[1];
      NodePtr dv = diff(v, var);
      return sel3(make_sub(u, v), du, dv);
    }
    case FuncKind::sel: {
      // the switching set {c = 0} has measure zero; c is treated as frozen
      NodePtr da = diff(n->kids[1], var);
      NodePtr db = diff(n->kids[2], var);
      return sel3(n->kids[0], std::move(da), std::move(db));
    }
  }
  throw DifferentiationError("unreachable function kind");
}

NodePtr diff(const NodePtr& n, int var) {
  switch (n->kind) {
    case Kind::number: return make_number(0.0);
    case Kind::variable: return make_number(n->var == var ? 1.0 : 0.0);
    case Kind::add: return make_add(diff(n->kids[0], var), diff(n->kids[1], var));
    case Kind::sub: return make_sub(diff(n->kids[0], var), diff(n->kids[1], var));
    case Kind::neg: return make_neg(diff(n->kids[0], var));
    case Kind::mul: {
      const NodePtr& a = n->kids[0];
      const NodePtr& b = n->kids[1];
      return make_add(make_mul(diff(a, var), b), make_mul(a, diff(b, var)));
    }
    case Kind::div: {
      const NodePtr& a = n->kids[0];
      const NodePtr& b = n->kids[1];
      NodePtr num = make_sub(make_mul(diff(a, var), b), make_mul(a, diff(b, var)));
      return make_div(num, make_pow(b, make_number(2.0)));
    }
    case Kind::pow: {
      const NodePtr& a = n->kids[0];
      const NodePtr& b = n->kids[1];
      if (b->kind == Kind::number) {
        // d a^k = k a^(k-1) a'
        double k = b->value;
        NodePtr body = make_mul(make_number(k), make_pow(a, make_number(k - 1.0)));
        return make_mul(body, diff(a, var));
      }
      if (a->kind == Kind::number) {
        // d c^b = c^b ln(c) b', with ln(c) folded to a literal
        if (a->value <= 0.0)
          throw DifferentiationError(
              "cannot differentiate power with non-positive constant base");
        NodePtr body = make_mul(make_pow(a, b), make_number(std::log(a->value)));
        return make_mul(body, diff(b, var));
      }
      throw DifferentiationError(
          "cannot differentiate a^b with non-constant base and exponent "
          "(no logarithm in the function set)");
    }
    case Kind::call: return diff_call(n, var);
  }
  throw DifferentiationError("unreachable node kind");
}

// --- misc tree walks ----------------------------------------------------

NodePtr scale_node(const NodePtr& n, double factor) {
  switch (n->kind) {
    case Kind::number: return n;
    case Kind::variable:
      if (n->var == 0) return n;
      return make_mul(make_number(factor), make_variable(n->var));
    default: {
      auto copy = std::make_shared<Node>(*n);
      for (auto& kid : copy->kids) kid = scale_node(kid, factor);
      return copy;
    }
  }
}

bool equal_nodes(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::number: return a.value == b.value;
    case Kind::variable: return a.var == b.var;
    case Kind::call:
      if (a.func != b.func) return false;
      break;
    default: break;
  }
  if (a.kids.size() != b.kids.size()) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!equal_nodes(*a.kids[i], *b.kids[i])) return false;
  return true;
}

} // namespace

Expression::Expression() : node_(make_number(0.0)) {}

Expression Expression::parse(std::string_view source) {
  return Expression(Parser(source).run());
}

Expression Expression::number(double value) { return Expression(make_number(value)); }

Expression Expression::variable(int index) {
  if (index < 0) throw ValidationError("variable index must be >= 0");
  return Expression(make_variable(index));
}

Expression Expression::call(FuncKind f, std::vector<Expression> args) {
  const FuncInfo* info = func_info(f);
  if (static_cast<int>(args.size()) != info->arity)
    throw ValidationError(std::string("function '") + info->name +
                          "' expects " + std::to_string(info->arity) +
                          " argument(s)");
  std::vector<NodePtr> kids;
  kids.reserve(args.size());
  for (auto& a : args) kids.push_back(a.node_);
  return Expression(make_call(f, std::move(kids)));
}

double Expression::evaluate(double t, std::span<const double> x) const {
  return eval_node(*node_, EvalCtx{t, x});
}

Expression Expression::differentiate(int var_index) const {
  if (var_index < 0) throw ValidationError("variable index must be >= 0");
  return Expression(diff(node_, var_index));
}

Expression Expression::scale_space(double factor) const {
  return Expression(scale_node(node_, factor));
}

std::string Expression::render() const {
  std::string out;
  render_node(*node_, out);
  return out;
}

bool Expression::structurally_equal(const Expression& other) const {
  return equal_nodes(*node_, *other.node_);
}

namespace {

void walk_info(const Node& n, int& max_x, bool& uses_t, bool& nonsmooth) {
  if (n.kind == Kind::variable) {
    if (n.var == 0)
      uses_t = true;
    else if (n.var > max_x)
      max_x = n.var;
  }
  if (n.kind == Kind::call) {
    switch (n.func) {
      case FuncKind::abs:
      case FuncKind::min:
      case FuncKind::max:
      case FuncKind::pos:
      case FuncKind::neg:
      case FuncKind::sel: nonsmooth = true; break;
      default: break;
    }
  }
  for (const auto& kid : n.kids) walk_info(*kid, max_x, uses_t, nonsmooth);
}

} // namespace

int Expression::max_space_index() const {
  int mx = 0;
  bool t = false, ns = false;
  walk_info(*node_, mx, t, ns);
  return mx;
}

bool Expression::uses_time() const {
  int mx = 0;
  bool t = false, ns = false;
  walk_info(*node_, mx, t, ns);
  return t;
}

bool Expression::has_nonsmooth() const {
  int mx = 0;
  bool t = false, ns = false;
  walk_info(*node_, mx, t, ns);
  return ns;
}

bool Expression::is_zero_literal() const {
  return node_->kind == Kind::number && node_->value == 0.0;
}

Expression operator+(const Expression& a, const Expression& b) {
  return Expression(make_add(a.node_, b.node_));
}
Expression operator-(const Expression& a, const Expression& b) {
  return Expression(make_sub(a.node_, b.node_));
}
Expression operator*(const Expression& a, const Expression& b) {
  return Expression(make_mul(a.node_, b.node_));
}
Expression operator/(const Expression& a, const Expression& b) {
  return Expression(make_div(a.node_, b.node_));
}
Expression operator-(const Expression& a) { return Expression(make_neg(a.node_)); }

Expression Expression::pow(const Expression& exponent) const {
  return Expression(make_pow(node_, exponent.node_));
}

} // namespace stencil_lab
