#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "smms/jet.hpp"

namespace smms {

// Free variables available to user expressions.
enum class Var { r, rho, x1, x2, x3 };
inline constexpr int kVarCount = 5;
std::string_view var_name(Var v);
std::optional<Var> parse_var(std::string_view name);

// Values for the free variables; unbound entries are null.
struct Env {
  std::array<const Jet*, kVarCount> vars{};
  Env& bind(Var v, const Jet& value) {
    vars[static_cast<int>(v)] = &value;
    return *this;
  }
};

// Immutable expression tree over {r, rho, x1, x2, x3}, numbers, pi,
// + - * / ^ and sin cos tan exp log sqrt sinh cosh abs.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | func '(' expr ')' | '(' expr ')'
class Expr {
 public:
  struct Node;

  // Names in `constants` are replaced by their values at parse time. Throws
  // ParseError with the byte offset of the problem.
  static Expr parse(std::string_view source, const std::map<std::string, double>& constants = {});
  static Expr constant(double value);

  // Minimal parentheses; parse(to_string()) rebuilds the same tree.
  std::string to_string() const;
  std::set<Var> variables() const;
  bool depends_on(Var v) const { return variables().count(v) != 0; }

  // Throws DomainError naming the offending subexpression on log of a
  // nonpositive number, division by zero, and derivatives that do not exist.
  Jet eval(const Env& env) const;
  double eval(const std::map<std::string, double>& bindings) const;

 private:
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

struct ExprValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

// Value and (up to order 2) derivatives with respect to `wrt`, which must be
// one of the bound variables.
ExprValue eval_expr(const Expr& expr, const std::map<std::string, double>& bindings, int order,
                    const std::string& wrt);

}  // namespace smms
