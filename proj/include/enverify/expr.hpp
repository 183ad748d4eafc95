#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>

#include "enverify/rational.hpp"

namespace enverify {

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind {
  Constant,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  Power,   // power(base, exponent)
  Log,     // log(base, argument)
  Sum,     // sum(index, lower, upper, body)
  Prod,    // prod(index, lower, upper, body)
  ArrayMin,  // min(arrayId)
  ArrayMax,  // max(arrayId)
  PosInf,
  NegInf,
};

// Immutable expression node. Shared subtrees are fine; nothing mutates
// after construction. Build through the factories, which enforce the
// structural invariants (no syntactically-zero constant denominator,
// summation indices must not escape into their own bounds).
class Expr {
 public:
  ExprKind kind;
  Rat value;         // Constant
  std::string name;  // Var name, array identifier, or Sum/Prod index
  ExprPtr a;         // left operand; Sum/Prod lower bound
  ExprPtr b;         // right operand; Sum/Prod upper bound
  ExprPtr body;      // Sum/Prod body

  static ExprPtr constant(Rat v);
  static ExprPtr constant(long v) { return constant(Rat(v)); }
  static ExprPtr variable(std::string name);
  static ExprPtr add(ExprPtr l, ExprPtr r);
  static ExprPtr sub(ExprPtr l, ExprPtr r);
  static ExprPtr mul(ExprPtr l, ExprPtr r);
  static ExprPtr div(ExprPtr l, ExprPtr r);
  static ExprPtr power(ExprPtr base, ExprPtr exponent);
  static ExprPtr log(ExprPtr base, ExprPtr argument);
  static ExprPtr sum(std::string index, ExprPtr lo, ExprPtr hi, ExprPtr body);
  static ExprPtr prod(std::string index, ExprPtr lo, ExprPtr hi, ExprPtr body);
  static ExprPtr arrayMin(std::string arrayId);
  static ExprPtr arrayMax(std::string arrayId);
  static ExprPtr posInf();
  static ExprPtr negInf();

  Expr() = default;
};

bool structurallyEqual(const Expr& a, const Expr& b);
inline bool structurallyEqual(const ExprPtr& a, const ExprPtr& b) {
  return structurallyEqual(*a, *b);
}

// Free size variables (bound summation indices excluded).
std::set<std::string> freeVars(const Expr& e);

// Array identifiers referenced through min()/max().
std::set<std::string> arrayRefs(const Expr& e);

// Capture-avoiding substitution of free variables.
ExprPtr substitute(const ExprPtr& e,
                   const std::map<std::string, ExprPtr>& bindings);

// Canonical text form, parseable by parseExprText. Operators are spelled
// + - * /, functions power/log/sum/prod/min/max; precedence keeps the
// output minimal in parentheses.
std::string render(const Expr& e);
inline std::string render(const ExprPtr& e) { return render(*e); }

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Token cursor over assertion/expression text. Multi-character operators
// ("==>", ":-", "<=", "&&") lex as single tokens; a '.' is part of a number
// only when a digit follows, so clause-terminating dots stay separate.
// parseExpr consumes one additive expression and stops at the first token
// the expression grammar cannot extend (e.g. "<=", "&&", ")").
class ExprLexer {
 public:
  explicit ExprLexer(std::string text);
  ~ExprLexer();
  ExprLexer(ExprLexer&&) noexcept;

  bool atEnd() const;
  std::string peek() const;
  // Start offset of the current token in the constructed text.
  size_t offset() const;
  bool tryToken(const std::string& token);
  void expectToken(const std::string& token);
  bool peekIsIdent() const;
  std::string takeIdent();
  [[noreturn]] void fail(const std::string& message) const;

  ExprPtr parseExpr();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Parses a complete string of the bound-expression language. Unary minus
// and division of two numeric literals fold into constants; parentheses
// disappear into the tree. "inf" is accepted for the infinities (internal
// assertion surface; pragma bodies never contain it).
ExprPtr parseExprText(const std::string& text);

}  // namespace enverify
