#include "enverify/expr.hpp"

#include <cctype>
#include <sstream>
#include <vector>

namespace enverify {

ExprPtr makeNode(Expr&& e) {
  return std::make_shared<const Expr>(std::move(e));
}

ExprPtr Expr::constant(Rat v) {
  Expr e;
  e.kind = ExprKind::Constant;
  e.value = std::move(v);
  return makeNode(std::move(e));
}

ExprPtr Expr::variable(std::string name) {
  if (name.empty()) throw std::invalid_argument("empty variable name");
  Expr e;
  e.kind = ExprKind::Var;
  e.name = std::move(name);
  return makeNode(std::move(e));
}

namespace {

ExprPtr binary(ExprKind k, ExprPtr l, ExprPtr r) {
  if (!l || !r) throw std::invalid_argument("null operand");
  Expr e;
  e.kind = k;
  e.a = std::move(l);
  e.b = std::move(r);
  return makeNode(std::move(e));
}

}  // namespace

ExprPtr Expr::add(ExprPtr l, ExprPtr r) {
  return binary(ExprKind::Add, std::move(l), std::move(r));
}

ExprPtr Expr::sub(ExprPtr l, ExprPtr r) {
  return binary(ExprKind::Sub, std::move(l), std::move(r));
}

ExprPtr Expr::mul(ExprPtr l, ExprPtr r) {
  return binary(ExprKind::Mul, std::move(l), std::move(r));
}

ExprPtr Expr::div(ExprPtr l, ExprPtr r) {
  if (r && r->kind == ExprKind::Constant && sgn(r->value) == 0)
    throw std::invalid_argument("syntactically zero denominator");
  return binary(ExprKind::Div, std::move(l), std::move(r));
}

ExprPtr Expr::power(ExprPtr base, ExprPtr exponent) {
  return binary(ExprKind::Power, std::move(base), std::move(exponent));
}

ExprPtr Expr::log(ExprPtr base, ExprPtr argument) {
  return binary(ExprKind::Log, std::move(base), std::move(argument));
}

namespace {

ExprPtr iterated(ExprKind k, std::string index, ExprPtr lo, ExprPtr hi,
                 ExprPtr body) {
  if (!lo || !hi || !body) throw std::invalid_argument("null operand");
  if (index.empty()) throw std::invalid_argument("empty index name");
  if (freeVars(*lo).count(index) || freeVars(*hi).count(index))
    throw std::invalid_argument("summation index escapes into its bounds");
  Expr e;
  e.kind = k;
  e.name = std::move(index);
  e.a = std::move(lo);
  e.b = std::move(hi);
  e.body = std::move(body);
  return makeNode(std::move(e));
}

}  // namespace

ExprPtr Expr::sum(std::string index, ExprPtr lo, ExprPtr hi, ExprPtr body) {
  return iterated(ExprKind::Sum, std::move(index), std::move(lo),
                  std::move(hi), std::move(body));
}

ExprPtr Expr::prod(std::string index, ExprPtr lo, ExprPtr hi, ExprPtr body) {
  return iterated(ExprKind::Prod, std::move(index), std::move(lo),
                  std::move(hi), std::move(body));
}

ExprPtr Expr::arrayMin(std::string arrayId) {
  if (arrayId.empty()) throw std::invalid_argument("empty array id");
  Expr e;
  e.kind = ExprKind::ArrayMin;
  e.name = std::move(arrayId);
  return makeNode(std::move(e));
}

ExprPtr Expr::arrayMax(std::string arrayId) {
  if (arrayId.empty()) throw std::invalid_argument("empty array id");
  Expr e;
  e.kind = ExprKind::ArrayMax;
  e.name = std::move(arrayId);
  return makeNode(std::move(e));
}

ExprPtr Expr::posInf() {
  Expr e;
  e.kind = ExprKind::PosInf;
  return makeNode(std::move(e));
}

ExprPtr Expr::negInf() {
  Expr e;
  e.kind = ExprKind::NegInf;
  return makeNode(std::move(e));
}

bool structurallyEqual(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::Constant:
      return a.value == b.value;
    case ExprKind::Var:
    case ExprKind::ArrayMin:
    case ExprKind::ArrayMax:
      return a.name == b.name;
    case ExprKind::PosInf:
    case ExprKind::NegInf:
      return true;
    case ExprKind::Sum:
    case ExprKind::Prod:
      return a.name == b.name && structurallyEqual(*a.a, *b.a) &&
             structurallyEqual(*a.b, *b.b) &&
             structurallyEqual(*a.body, *b.body);
    default:
      return structurallyEqual(*a.a, *b.a) && structurallyEqual(*a.b, *b.b);
  }
}

namespace {

void collectFree(const Expr& e, std::set<std::string>& bound,
                 std::set<std::string>& out) {
  switch (e.kind) {
    case ExprKind::Var:
      if (!bound.count(e.name)) out.insert(e.name);
      break;
    case ExprKind::Sum:
    case ExprKind::Prod: {
      collectFree(*e.a, bound, out);
      collectFree(*e.b, bound, out);
      bool fresh = bound.insert(e.name).second;
      collectFree(*e.body, bound, out);
      if (fresh) bound.erase(e.name);
      break;
    }
    case ExprKind::Constant:
    case ExprKind::ArrayMin:
    case ExprKind::ArrayMax:
    case ExprKind::PosInf:
    case ExprKind::NegInf:
      break;
    default:
      collectFree(*e.a, bound, out);
      collectFree(*e.b, bound, out);
  }
}

}  // namespace

std::set<std::string> freeVars(const Expr& e) {
  std::set<std::string> bound, out;
  collectFree(e, bound, out);
  return out;
}

std::set<std::string> arrayRefs(const Expr& e) {
  std::set<std::string> out;
  switch (e.kind) {
    case ExprKind::ArrayMin:
    case ExprKind::ArrayMax:
      out.insert(e.name);
      break;
    case ExprKind::Sum:
    case ExprKind::Prod: {
      for (const auto* part : {e.a.get(), e.b.get(), e.body.get()})
        for (const auto& id : arrayRefs(*part)) out.insert(id);
      break;
    }
    case ExprKind::Constant:
    case ExprKind::Var:
    case ExprKind::PosInf:
    case ExprKind::NegInf:
      break;
    default:
      for (const auto* part : {e.a.get(), e.b.get()})
        for (const auto& id : arrayRefs(*part)) out.insert(id);
  }
  return out;
}

ExprPtr substitute(const ExprPtr& e,
                   const std::map<std::string, ExprPtr>& bindings) {
  switch (e->kind) {
    case ExprKind::Var: {
      auto it = bindings.find(e->name);
      return it == bindings.end() ? e : it->second;
    }
    case ExprKind::Constant:
    case ExprKind::ArrayMin:
    case ExprKind::ArrayMax:
    case ExprKind::PosInf:
    case ExprKind::NegInf:
      return e;
    case ExprKind::Sum:
    case ExprKind::Prod: {
      auto inner = bindings;
      inner.erase(e->name);
      for (const auto& [from, to] : inner)
        if (freeVars(*to).count(e->name))
          throw std::invalid_argument("substitution would capture index " +
                                      e->name);
      ExprPtr lo = substitute(e->a, bindings);
      ExprPtr hi = substitute(e->b, bindings);
      ExprPtr body = substitute(e->body, inner);
      if (lo == e->a && hi == e->b && body == e->body) return e;
      Expr n;
      n.kind = e->kind;
      n.name = e->name;
      n.a = std::move(lo);
      n.b = std::move(hi);
      n.body = std::move(body);
      return makeNode(std::move(n));
    }
    default: {
      ExprPtr l = substitute(e->a, bindings);
      ExprPtr r = substitute(e->b, bindings);
      if (l == e->a && r == e->b) return e;
      Expr n;
      n.kind = e->kind;
      n.a = std::move(l);
      n.b = std::move(r);
      return makeNode(std::move(n));
    }
  }
}

namespace {

// Precedence levels: additive 0, multiplicative 1, unary/atomic 2.
int precedenceOf(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 0;
    case ExprKind::Mul:
    case ExprKind::Div:
      return 1;
    default:
      return 2;
  }
}

void renderInto(const Expr& e, std::ostream& os, int context) {
  int own = precedenceOf(e.kind);
  if (e.kind == ExprKind::Constant) {
    // Negative constants need parens almost everywhere; fractions print as
    // p/q and reassociate like a division if left bare in a mul/div chain.
    if (sgn(e.value) < 0)
      own = -1;
    else if (e.value.get_den() != 1)
      own = 1;
  }
  bool paren = own < context;
  if (paren) os << '(';
  switch (e.kind) {
    case ExprKind::Constant:
      os << ratToString(e.value);
      break;
    case ExprKind::Var:
      os << e.name;
      break;
    case ExprKind::Add:
      renderInto(*e.a, os, 0);
      os << " + ";
      renderInto(*e.b, os, 1);
      break;
    case ExprKind::Sub:
      renderInto(*e.a, os, 0);
      os << " - ";
      renderInto(*e.b, os, 1);
      break;
    case ExprKind::Mul:
      renderInto(*e.a, os, 1);
      os << '*';
      renderInto(*e.b, os, 2);
      break;
    case ExprKind::Div:
      renderInto(*e.a, os, 1);
      os << '/';
      renderInto(*e.b, os, 2);
      break;
    case ExprKind::Power:
      os << "power(";
      renderInto(*e.a, os, 0);
      os << ", ";
      renderInto(*e.b, os, 0);
      os << ')';
      break;
    case ExprKind::Log:
      os << "log(";
      renderInto(*e.a, os, 0);
      os << ", ";
      renderInto(*e.b, os, 0);
      os << ')';
      break;
    case ExprKind::Sum:
    case ExprKind::Prod:
      os << (e.kind == ExprKind::Sum ? "sum(" : "prod(") << e.name << ", ";
      renderInto(*e.a, os, 0);
      os << ", ";
      renderInto(*e.b, os, 0);
      os << ", ";
      renderInto(*e.body, os, 0);
      os << ')';
      break;
    case ExprKind::ArrayMin:
      os << "min(" << e.name << ')';
      break;
    case ExprKind::ArrayMax:
      os << "max(" << e.name << ')';
      break;
    case ExprKind::PosInf:
      os << "inf";
      break;
    case ExprKind::NegInf:
      os << "-inf";
      break;
  }
  if (paren) os << ')';
}

}  // namespace

std::string render(const Expr& e) {
  std::ostringstream os;
  renderInto(e, os, 0);
  return os.str();
}

namespace {

struct Token {
  enum class Kind { Number, Ident, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  size_t pos = 0;
};

bool isReserved(const std::string& name) {
  return name == "power" || name == "log" || name == "sum" ||
         name == "prod" || name == "min" || name == "max" || name == "inf";
}

}  // namespace

struct ExprLexer::Impl {
  std::string text;
  size_t pos = 0;
  Token current;

  explicit Impl(std::string t) : text(std::move(t)) { advance(); }

  void advance() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
    current.pos = pos;
    if (pos >= text.size()) {
      current.kind = Token::Kind::End;
      current.text.clear();
      return;
    }
    char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos;
      while (pos < text.size()) {
        char d = text[pos];
        if (std::isdigit(static_cast<unsigned char>(d))) {
          ++pos;
        } else if (d == '.' && pos + 1 < text.size() &&
                   std::isdigit(static_cast<unsigned char>(text[pos + 1]))) {
          ++pos;
        } else {
          break;
        }
      }
      current = {Token::Kind::Number, text.substr(start, pos - start), start};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) ||
              text[pos] == '_'))
        ++pos;
      current = {Token::Kind::Ident, text.substr(start, pos - start), start};
      return;
    }
    for (const char* op : {"==>", ":-", "<=", "&&"}) {
      size_t len = std::string(op).size();
      if (text.compare(pos, len, op) == 0) {
        current = {Token::Kind::Punct, op, pos};
        pos += len;
        return;
      }
    }
    current = {Token::Kind::Punct, std::string(1, c), pos};
    ++pos;
  }

  Token take() {
    Token t = current;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& message) const {
    std::ostringstream os;
    os << message << " at offset " << current.pos;
    if (current.kind != Token::Kind::End)
      os << " near '" << current.text << "'";
    throw ParseError(os.str());
  }

  bool punct(const char* p) const {
    return current.kind == Token::Kind::Punct && current.text == p;
  }

  void expectPunct(const char* p) {
    if (!punct(p)) fail(std::string("expected '") + p + "'");
    advance();
  }

  std::string takeIdent() {
    if (current.kind != Token::Kind::Ident || isReserved(current.text))
      fail("expected identifier");
    return take().text;
  }

  ExprPtr parseAdditive() {
    ExprPtr e = parseMultiplicative();
    for (;;) {
      if (punct("+")) {
        advance();
        e = Expr::add(e, parseMultiplicative());
      } else if (punct("-")) {
        advance();
        e = Expr::sub(e, parseMultiplicative());
      } else {
        return e;
      }
    }
  }

  ExprPtr parseMultiplicative() {
    ExprPtr e = parseUnary();
    for (;;) {
      if (punct("*")) {
        advance();
        e = Expr::mul(e, parseUnary());
      } else if (punct("/")) {
        advance();
        ExprPtr rhs = parseUnary();
        // Fold literal/literal so rational constants round-trip.
        if (e->kind == ExprKind::Constant && rhs->kind == ExprKind::Constant) {
          if (sgn(rhs->value) == 0) fail("division by zero literal");
          e = Expr::constant(Rat(e->value / rhs->value));
        } else {
          e = Expr::div(e, rhs);
        }
      } else {
        return e;
      }
    }
  }

  ExprPtr parseUnary() {
    if (punct("-")) {
      advance();
      ExprPtr inner = parseUnary();
      if (inner->kind == ExprKind::Constant)
        return Expr::constant(Rat(-inner->value));
      if (inner->kind == ExprKind::PosInf) return Expr::negInf();
      if (inner->kind == ExprKind::NegInf) return Expr::posInf();
      return Expr::sub(Expr::constant(0), inner);
    }
    return parseAtom();
  }

  ExprPtr parseAtom() {
    if (current.kind == Token::Kind::Number)
      return Expr::constant(ratFromString(take().text));
    if (punct("(")) {
      advance();
      ExprPtr e = parseAdditive();
      expectPunct(")");
      return e;
    }
    if (current.kind == Token::Kind::Ident) {
      if (current.text == "inf") {
        advance();
        return Expr::posInf();
      }
      if (isReserved(current.text)) return parseFunction();
      return Expr::variable(take().text);
    }
    fail("expected expression");
  }

  ExprPtr parseFunction() {
    std::string fn = take().text;
    expectPunct("(");
    if (fn == "min" || fn == "max") {
      std::string id = takeIdent();
      expectPunct(")");
      return fn == "min" ? Expr::arrayMin(id) : Expr::arrayMax(id);
    }
    if (fn == "power" || fn == "log") {
      ExprPtr first = parseAdditive();
      expectPunct(",");
      ExprPtr second = parseAdditive();
      expectPunct(")");
      return fn == "power" ? Expr::power(first, second)
                           : Expr::log(first, second);
    }
    std::string index = takeIdent();
    expectPunct(",");
    ExprPtr lo = parseAdditive();
    expectPunct(",");
    ExprPtr hi = parseAdditive();
    expectPunct(",");
    ExprPtr body = parseAdditive();
    expectPunct(")");
    try {
      return fn == "sum" ? Expr::sum(index, lo, hi, body)
                         : Expr::prod(index, lo, hi, body);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
  }
};

ExprLexer::ExprLexer(std::string text)
    : impl_(std::make_unique<Impl>(std::move(text))) {}

ExprLexer::~ExprLexer() = default;
ExprLexer::ExprLexer(ExprLexer&&) noexcept = default;

bool ExprLexer::atEnd() const {
  return impl_->current.kind == Token::Kind::End;
}

std::string ExprLexer::peek() const {
  return impl_->current.text;
}

size_t ExprLexer::offset() const { return impl_->current.pos; }

bool ExprLexer::tryToken(const std::string& token) {
  if (impl_->current.kind == Token::Kind::End || impl_->current.text != token)
    return false;
  impl_->advance();
  return true;
}

void ExprLexer::expectToken(const std::string& token) {
  if (!tryToken(token)) impl_->fail("expected '" + token + "'");
}

bool ExprLexer::peekIsIdent() const {
  return impl_->current.kind == Token::Kind::Ident;
}

std::string ExprLexer::takeIdent() {
  return impl_->takeIdent();
}

void ExprLexer::fail(const std::string& message) const {
  impl_->fail(message);
}

ExprPtr ExprLexer::parseExpr() {
  return impl_->parseAdditive();
}

ExprPtr parseExprText(const std::string& text) {
  ExprLexer lex(text);
  ExprPtr e = lex.parseExpr();
  if (!lex.atEnd()) lex.fail("trailing input after expression");
  return e;
}

}  // namespace enverify
