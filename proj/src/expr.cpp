#include "smms/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "smms/error.hpp"

namespace smms {

namespace {

enum class Kind { number, variable, neg, add, sub, mul, div, pow, call };
enum class Func { sin, cos, tan, exp, log, sqrt, sinh, cosh, abs };

constexpr std::array<std::string_view, 9> kFuncNames = {"sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "abs"};
constexpr std::array<std::string_view, kVarCount> kVarNames = {"r", "rho", "x1", "x2", "x3"};

std::optional<Func> parse_func(std::string_view name) {
  for (std::size_t i = 0; i < kFuncNames.size(); ++i)
    if (kFuncNames[i] == name) return static_cast<Func>(i);
  return std::nullopt;
}

}  // namespace

struct Expr::Node {
  Kind kind = Kind::number;
  double number = 0.0;
  Var var = Var::r;
  Func func = Func::sin;
  std::shared_ptr<const Node> a, b;
};

std::string_view var_name(Var v) { return kVarNames[static_cast<int>(v)]; }

std::optional<Var> parse_var(std::string_view name) {
  for (int i = 0; i < kVarCount; ++i)
    if (kVarNames[i] == name) return static_cast<Var>(i);
  return std::nullopt;
}

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_number(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Kind::number;
  n->number = v;
  return n;
}

NodePtr make_node(Kind k, NodePtr a, NodePtr b = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  Parser(std::string_view src, const std::map<std::string, double>& constants) : src_(src), constants_(constants) {}

  NodePtr run() {
    skip();
    if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = expr();
    skip();
    if (pos_ != src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (eat('+'))
        lhs = make_node(Kind::add, lhs, term());
      else if (eat('-'))
        lhs = make_node(Kind::sub, lhs, term());
      else
        return lhs;
    }
  }
  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (eat('*'))
        lhs = make_node(Kind::mul, lhs, unary());
      else if (eat('/'))
        lhs = make_node(Kind::div, lhs, unary());
      else
        return lhs;
    }
  }
  NodePtr unary() {
    if (eat('-')) return make_node(Kind::neg, unary());
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) return make_node(Kind::pow, base, unary());
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ == src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }
  NodePtr number() {
    const std::size_t start = pos_;
    double v = 0.0;
    const auto res = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
    if (res.ec != std::errc()) throw ParseError("malformed number", start);
    pos_ = static_cast<std::size_t>(res.ptr - src_.data());
    return make_number(v);
  }
  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string id(src_.substr(start, pos_ - start));
    if (const auto f = parse_func(id)) {
      if (!eat('(')) throw ParseError("expected '(' after function '" + id + "'", pos_);
      NodePtr arg = expr();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      auto n = std::make_shared<Expr::Node>();
      n->kind = Kind::call;
      n->func = *f;
      n->a = std::move(arg);
      return n;
    }
    if (const auto v = parse_var(id)) {
      auto n = std::make_shared<Expr::Node>();
      n->kind = Kind::variable;
      n->var = *v;
      return n;
    }
    if (const auto it = constants_.find(id); it != constants_.end()) return make_number(it->second);
    if (id == "pi") return make_number(std::numbers::pi);
    throw ParseError("unknown identifier '" + id + "'", start);
  }

  std::string_view src_;
  const std::map<std::string, double>& constants_;
  std::size_t pos_ = 0;
};

int precedence(const Expr::Node& n) {
  switch (n.kind) {
    case Kind::add:
    case Kind::sub: return 1;
    case Kind::mul:
    case Kind::div: return 2;
    case Kind::neg: return 3;
    case Kind::pow: return 4;
    case Kind::number: return n.number < 0.0 || std::signbit(n.number) ? 3 : 5;
    default: return 5;
  }
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void print(const Expr::Node& n, std::string& out);

void print_child(const Expr::Node& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print(child, out);
  if (parens) out += ')';
}

void print(const Expr::Node& n, std::string& out) {
  const int p = precedence(n);
  switch (n.kind) {
    case Kind::number: out += format_number(n.number); return;
    case Kind::variable: out += var_name(n.var); return;
    case Kind::call:
      out += kFuncNames[static_cast<int>(n.func)];
      out += '(';
      print(*n.a, out);
      out += ')';
      return;
    case Kind::neg:
      out += '-';
      print_child(*n.a, precedence(*n.a) < 3, out);
      return;
    case Kind::pow:
      print_child(*n.a, precedence(*n.a) <= 4, out);
      out += '^';
      print_child(*n.b, precedence(*n.b) < 3, out);
      return;
    default: break;
  }
  const char* op = n.kind == Kind::add ? " + " : n.kind == Kind::sub ? " - " : n.kind == Kind::mul ? "*" : "/";
  print_child(*n.a, precedence(*n.a) < p, out);
  out += op;
  print_child(*n.b, precedence(*n.b) <= p, out);
}

std::string text(const Expr::Node& n) {
  std::string s;
  print(n, s);
  return s;
}

bool has_gradient(const Jet& j) {
  for (int i = 0; i < j.dim(); ++i)
    if (j.d(i) != 0.0) return true;
  return false;
}

[[noreturn]] void domain_fail(const std::string& what, const Expr::Node& n) {
  throw DomainError(what + " in '" + text(n) + "'");
}

Jet eval_node(const Expr::Node& n, const Env& env);

Jet eval_pow(const Expr::Node& n, const Env& env) {
  const Jet a = eval_node(*n.a, env);
  const Jet b = eval_node(*n.b, env);
  const double x = a.value();
  if (!has_gradient(b)) {
    const double p = b.value();
    const bool integer = p == std::round(p);
    if (x < 0.0 && !integer) domain_fail("negative base with non-integer exponent", n);
    if (x == 0.0) {
      if (p < 0.0) domain_fail("zero raised to a negative power", n);
      if (has_gradient(a) && p != 0.0 && p != 1.0 && p < 2.0 && !integer) domain_fail("derivative of power at zero does not exist", n);
    }
    return pow(a, p);
  }
  if (!(x > 0.0)) domain_fail("variable exponent needs a positive base", n);
  return pow(a, b);
}

Jet eval_call(const Expr::Node& n, const Env& env) {
  const Jet a = eval_node(*n.a, env);
  const double x = a.value();
  switch (n.func) {
    case Func::sin: return sin(a);
    case Func::cos: return cos(a);
    case Func::tan:
      if (std::cos(x) == 0.0) domain_fail("tan at a pole", n);
      return tan(a);
    case Func::exp: return exp(a);
    case Func::log:
      if (!(x > 0.0)) domain_fail("log of nonpositive value", n);
      return log(a);
    case Func::sqrt:
      if (x < 0.0) domain_fail("sqrt of negative value", n);
      if (x == 0.0) {
        if (has_gradient(a)) domain_fail("derivative of sqrt at 0 does not exist", n);
        return Jet(0.0);
      }
      return sqrt(a);
    case Func::sinh: return sinh(a);
    case Func::cosh: return cosh(a);
    case Func::abs:
      if (x == 0.0 && has_gradient(a)) domain_fail("derivative of abs at 0 does not exist", n);
      return abs(a);
  }
  return a;
}

Jet eval_node(const Expr::Node& n, const Env& env) {
  Jet out;
  switch (n.kind) {
    case Kind::number: return Jet(n.number);
    case Kind::variable: {
      const Jet* v = env.vars[static_cast<int>(n.var)];
      if (v == nullptr) throw DomainError("unbound variable '" + std::string(var_name(n.var)) + "'");
      return *v;
    }
    case Kind::neg: out = -eval_node(*n.a, env); break;
    case Kind::add: out = eval_node(*n.a, env) + eval_node(*n.b, env); break;
    case Kind::sub: out = eval_node(*n.a, env) - eval_node(*n.b, env); break;
    case Kind::mul: out = eval_node(*n.a, env) * eval_node(*n.b, env); break;
    case Kind::div: {
      const Jet num = eval_node(*n.a, env);
      const Jet den = eval_node(*n.b, env);
      if (den.value() == 0.0) domain_fail("division by zero", n);
      out = num / den;
      break;
    }
    case Kind::pow: out = eval_pow(n, env); break;
    case Kind::call: out = eval_call(n, env); break;
  }
  if (!std::isfinite(out.value())) domain_fail("non-finite value", n);
  return out;
}

void collect(const Expr::Node& n, std::set<Var>& out) {
  if (n.kind == Kind::variable) out.insert(n.var);
  if (n.a) collect(*n.a, out);
  if (n.b) collect(*n.b, out);
}

}  // namespace

Expr Expr::parse(std::string_view source, const std::map<std::string, double>& constants) {
  return Expr(Parser(source, constants).run());
}

Expr Expr::constant(double value) { return Expr(make_number(value)); }

std::string Expr::to_string() const { return text(*root_); }

std::set<Var> Expr::variables() const {
  std::set<Var> vars;
  collect(*root_, vars);
  return vars;
}

Jet Expr::eval(const Env& env) const { return eval_node(*root_, env); }

double Expr::eval(const std::map<std::string, double>& bindings) const {
  std::array<Jet, kVarCount> values{};
  Env env;
  for (const auto& [name, value] : bindings) {
    const auto v = parse_var(name);
    if (!v) throw DomainError("unknown variable '" + name + "'");
    values[static_cast<int>(*v)] = Jet(value);
    env.bind(*v, values[static_cast<int>(*v)]);
  }
  return eval(env).value();
}

ExprValue eval_expr(const Expr& expr, const std::map<std::string, double>& bindings, int order,
                    const std::string& wrt) {
  if (order < 0 || order > 2) throw DomainError("eval_expr: order must be 0, 1 or 2");
  const auto target = parse_var(wrt);
  if (order > 0 && !target) throw DomainError("eval_expr: unknown variable '" + wrt + "'");
  std::array<Jet, kVarCount> values{};
  Env env;
  bool bound_target = false;
  for (const auto& [name, value] : bindings) {
    const auto v = parse_var(name);
    if (!v) throw DomainError("eval_expr: unknown variable '" + name + "'");
    const int i = static_cast<int>(*v);
    if (order > 0 && *v == *target) {
      values[i] = Jet::variable(1, 0, value);
      bound_target = true;
    } else {
      values[i] = Jet(value);
    }
    env.bind(*v, values[i]);
  }
  if (order > 0 && !bound_target) throw DomainError("eval_expr: variable '" + wrt + "' is not bound");
  const Jet j = expr.eval(env);
  ExprValue out;
  out.value = j.value();
  if (order >= 1 && j.dim() > 0) out.d1 = j.d(0);
  if (order >= 2 && j.dim() > 0) out.d2 = j.dd(0, 0);
  return out;
}

}  // namespace smms
