#include "enverify/assertlang.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace enverify {

std::string statusName(Status s) {
  switch (s) {
    case Status::Check:
      return "check";
    case Status::Trust:
      return "trust";
    case Status::True:
      return "true";
    case Status::Checked:
      return "checked";
    case Status::False:
      return "false";
  }
  return "?";
}

std::optional<Status> statusFromName(const std::string& name) {
  if (name == "check") return Status::Check;
  if (name == "trust") return Status::Trust;
  if (name == "true") return Status::True;
  if (name == "checked") return Status::Checked;
  if (name == "false") return Status::False;
  return std::nullopt;
}

namespace {

bool exprPtrEqual(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return structurallyEqual(a, b);
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Offset one past the parenthesis matching s[open], or npos.
size_t matchParen(const std::string& s, size_t open) {
  int depth = 0;
  for (size_t i = open; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')' && --depth == 0) return i + 1;
  }
  return std::string::npos;
}

// Strips parentheses that wrap the entire string, repeatedly.
std::string stripGroup(std::string s) {
  s = trim(s);
  while (!s.empty() && s[0] == '(' && matchParen(s, 0) == s.size())
    s = trim(s.substr(1, s.size() - 2));
  return s;
}

// Splits at every occurrence of `sep` outside parentheses.
std::vector<std::string> splitTopLevel(const std::string& s,
                                       const std::string& sep) {
  std::vector<std::string> parts;
  int depth = 0;
  size_t start = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (depth == 0 && s.compare(i, sep.size(), sep) == 0) {
      parts.push_back(s.substr(start, i - start));
      i += sep.size() - 1;
      start = i + 1;
    }
  }
  parts.push_back(s.substr(start));
  return parts;
}

bool isScopeVar(const ExprPtr& e, const std::set<std::string>& scope) {
  return e->kind == ExprKind::Var && scope.count(e->name) != 0;
}

void checkGroundExpr(const ExprPtr& e, const std::set<std::string>& scope) {
  for (const std::string& v : freeVars(*e)) {
    if (v == "energy")
      throw ParseError("'energy' cannot appear in a precondition");
    if (scope.count(v))
      throw ParseError("precondition ground expression references scope "
                       "identifier '" +
                       v + "'");
  }
  if (!arrayRefs(*e).empty())
    throw ParseError("min()/max() cannot appear in a precondition");
}

void checkBoundExpr(const ExprPtr& e, const std::set<std::string>& scope) {
  for (const std::string& v : freeVars(*e)) {
    if (v == "energy")
      throw ParseError("'energy' cannot appear inside a bound expression");
    if (!scope.count(v))
      throw ParseError("bound expression references unknown identifier '" +
                       v + "'");
  }
  for (const std::string& a : arrayRefs(*e))
    if (!scope.count(a))
      throw ParseError("min()/max() argument '" + a +
                       "' is not a scope identifier");
}

struct CondSides {
  ExprPtr lhs;
  ExprPtr rhs;
};

CondSides parseCond(const std::string& text) {
  ExprLexer lex(text);
  CondSides c;
  c.lhs = lex.parseExpr();
  lex.expectToken("<=");
  c.rhs = lex.parseExpr();
  if (!lex.atEnd()) lex.fail("trailing input after condition");
  return c;
}

void applyPrecondCond(XCAssertion::Precond& p, const CondSides& c,
                      const std::set<std::string>& scope) {
  bool lhsId = isScopeVar(c.lhs, scope);
  bool rhsId = isScopeVar(c.rhs, scope);
  if (lhsId && rhsId)
    throw ParseError("precondition compares two scope identifiers");
  if (!lhsId && !rhsId)
    throw ParseError("precondition must bound a scope argument");
  const std::string& id = lhsId ? c.lhs->name : c.rhs->name;
  if (!p.id.empty() && p.id != id)
    throw ParseError("precondition must constrain a single identifier");
  p.id = id;
  if (rhsId) {
    checkGroundExpr(c.lhs, scope);
    if (p.lower) throw ParseError("duplicate lower precondition");
    p.lower = c.lhs;
  } else {
    checkGroundExpr(c.rhs, scope);
    if (p.upper) throw ParseError("duplicate upper precondition");
    p.upper = c.rhs;
  }
}

bool isEnergyMarker(const ExprPtr& e) {
  return e->kind == ExprKind::Var && e->name == "energy";
}

void applyCostCond(XCAssertion& a, const CondSides& c,
                   const std::set<std::string>& scope) {
  bool lhsEnergy = isEnergyMarker(c.lhs);
  bool rhsEnergy = isEnergyMarker(c.rhs);
  if (lhsEnergy && rhsEnergy)
    throw ParseError("'energy <= energy' is not a bound");
  if (!lhsEnergy && !rhsEnergy)
    throw ParseError("malformed bound (missing 'energy')");
  if (rhsEnergy) {
    checkBoundExpr(c.lhs, scope);
    if (a.costLower) throw ParseError("duplicate lower bound");
    a.costLower = c.lhs;
  } else {
    checkBoundExpr(c.rhs, scope);
    if (a.costUpper) throw ParseError("duplicate upper bound");
    a.costUpper = c.rhs;
  }
}

std::vector<std::string> splitConds(const std::string& group,
                                    const char* what) {
  std::vector<std::string> conds = splitTopLevel(stripGroup(group), "&&");
  if (conds.size() > 2)
    throw ParseError(std::string(what) + " conjoins more than two conditions");
  return conds;
}

}  // namespace

XCAssertion parsePragma(const std::string& text) {
  size_t at = text.find_first_not_of(" \t\r\n");
  if (at == std::string::npos || text.compare(at, 7, "#pragma") != 0)
    throw ParseError("assertion must start with #pragma");
  std::string rest = text.substr(at + 7);

  XCAssertion a;
  ExprLexer lex(rest);
  if (!lex.peekIsIdent()) lex.fail("expected a status or function name");
  std::string word = lex.takeIdent();
  std::optional<Status> st = statusFromName(word);
  if (st && lex.peekIsIdent()) {
    a.status = *st;
    a.funcName = lex.takeIdent();
  } else {
    a.status = Status::Check;
    a.funcName = word;
  }
  lex.expectToken("(");
  if (!lex.tryToken(")")) {
    do {
      if (!lex.peekIsIdent()) lex.fail("expected an argument identifier");
      a.scopeArgs.push_back(lex.takeIdent());
    } while (lex.tryToken(","));
    lex.expectToken(")");
  }
  lex.expectToken(":");

  std::string body = rest.substr(lex.offset());
  std::set<std::string> scope(a.scopeArgs.begin(), a.scopeArgs.end());

  std::vector<std::string> halves = splitTopLevel(body, "==>");
  if (halves.size() > 2)
    throw ParseError("more than one '==>' in assertion body");
  if (halves.size() == 2) {
    XCAssertion::Precond p;
    for (const std::string& condText : splitConds(halves[0], "precondition"))
      applyPrecondCond(p, parseCond(condText), scope);
    a.precond = std::move(p);
  }
  for (const std::string& condText :
       splitConds(halves.back(), "cost bounds"))
    applyCostCond(a, parseCond(condText), scope);
  if (!a.costLower && !a.costUpper)
    throw ParseError("assertion has no cost bounds");
  return a;
}

std::string printPragma(const XCAssertion& a) {
  if (!a.costLower && !a.costUpper)
    throw std::invalid_argument("assertion has no cost bounds to print");
  std::ostringstream os;
  os << "#pragma " << statusName(a.status) << ' ' << a.funcName << '(';
  for (size_t i = 0; i < a.scopeArgs.size(); ++i) {
    if (i) os << ',';
    os << a.scopeArgs[i];
  }
  os << ") : ";
  if (a.precond) {
    os << '(';
    if (a.precond->lower) os << render(a.precond->lower) << " <= "
                             << a.precond->id;
    if (a.precond->lower && a.precond->upper) os << " && ";
    if (a.precond->upper) os << a.precond->id << " <= "
                             << render(a.precond->upper);
    os << ") ==> ";
  }
  os << '(';
  if (a.costLower) os << render(a.costLower) << " <= energy";
  if (a.costLower && a.costUpper) os << " && ";
  if (a.costUpper) os << "energy <= " << render(a.costUpper);
  os << ')';
  return os.str();
}

bool xcEqual(const XCAssertion& a, const XCAssertion& b) {
  if (a.status != b.status || a.funcName != b.funcName ||
      a.scopeArgs != b.scopeArgs)
    return false;
  if (a.precond.has_value() != b.precond.has_value()) return false;
  if (a.precond) {
    if (a.precond->id != b.precond->id) return false;
    if (!exprPtrEqual(a.precond->lower, b.precond->lower)) return false;
    if (!exprPtrEqual(a.precond->upper, b.precond->upper)) return false;
  }
  return exprPtrEqual(a.costLower, b.costLower) &&
         exprPtrEqual(a.costUpper, b.costUpper);
}

std::vector<std::string> InternalAssertion::inputVars() const {
  std::vector<std::string> out;
  for (const PatArg& arg : callPattern)
    if (arg.mode == ArgMode::In) out.push_back(arg.name);
  return out;
}

namespace {

Rat evalGroundToRat(const ExprPtr& e, const char* what) {
  Enclosure enc;
  try {
    enc = eval(*e, EvalEnv{});
  } catch (const EvalError& err) {
    throw AssertionError(std::string(what) + ": " + err.what());
  }
  if (!enc.exact())
    throw AssertionError(std::string(what) +
                         " does not evaluate to an exact rational");
  return enc.lo.value();
}

void restrictLower(DomainSet& d, const std::string& var, const Rat& bound) {
  DomainSet::Range r = d.rangeOf(var);
  Int lo = ceilRat(bound);
  if (lo > r.lo) r.lo = lo;
  if (r.lo < 0) r.lo = 0;
  d.restrict(var, r);
}

void restrictUpper(DomainSet& d, const std::string& var, const Rat& bound) {
  DomainSet::Range r = d.rangeOf(var);
  Int hi = floorRat(bound);
  if (!r.hi || hi < *r.hi) r.hi = hi;
  d.restrict(var, r);
}

std::string freshOutputName(const std::string& preferred,
                            const std::set<std::string>& taken) {
  std::string name = preferred.empty() ? "Out" : preferred;
  while (taken.count(name)) name += "_";
  return name;
}

}  // namespace

InternalAssertion toInternal(const XCAssertion& a,
                             const PredicateSignature& sig) {
  if (sig.predName != a.funcName)
    throw AssertionError("assertion scope '" + a.funcName +
                         "' does not match signature '" + sig.predName + "'");
  if (sig.arity() != a.scopeArgs.size() + 1)
    throw AssertionError(
        "scope/signature arity mismatch for " + a.funcName + ": scope has " +
        std::to_string(a.scopeArgs.size()) + " arguments, signature has " +
        std::to_string(sig.arity()) + " (one of them the output)");
  std::optional<size_t> outPos = sig.outputPosition();
  if (!outPos)
    throw AssertionError("signature for " + a.funcName +
                         " must declare exactly one output argument");

  InternalAssertion r;
  r.pred = {a.funcName, sig.arity()};
  r.status = a.status;
  std::set<std::string> scope(a.scopeArgs.begin(), a.scopeArgs.end());
  size_t nextScope = 0;
  for (size_t i = 0; i < sig.args.size(); ++i) {
    InternalAssertion::PatArg pat;
    pat.typeName = sig.args[i].typeName;
    pat.mode = sig.args[i].mode;
    pat.metric = sig.args[i].metric;
    pat.name = i == *outPos ? freshOutputName(sig.args[i].name, scope)
                            : a.scopeArgs[nextScope++];
    r.callPattern.push_back(std::move(pat));
  }

  if (a.precond) {
    if (!scope.count(a.precond->id))
      throw AssertionError("precondition names '" + a.precond->id +
                           "', which is not a scope argument");
    if (a.precond->lower)
      restrictLower(r.sizePrecond, a.precond->id,
                    evalGroundToRat(a.precond->lower, "precondition bound"));
    if (a.precond->upper)
      restrictUpper(r.sizePrecond, a.precond->id,
                    evalGroundToRat(a.precond->upper, "precondition bound"));
  }

  r.resourceName = "energy";
  r.lower = a.costLower ? a.costLower : Expr::constant(0);
  r.upper = a.costUpper ? a.costUpper : Expr::posInf();
  return r;
}

namespace {

bool isConstantZero(const ExprPtr& e) {
  return e && e->kind == ExprKind::Constant && sgn(e->value) == 0;
}

bool isPosInf(const ExprPtr& e) {
  return e && e->kind == ExprKind::PosInf;
}

}  // namespace

XCAssertion fromInternal(const InternalAssertion& a,
                         const PredicateSignature& sig) {
  if (a.resourceName != "energy")
    throw AssertionError("resource '" + a.resourceName +
                         "' has no pragma form");
  if (sig.arity() != a.callPattern.size())
    throw AssertionError("signature arity does not match the call pattern");

  XCAssertion x;
  x.status = a.status;
  x.funcName = a.pred.name;
  std::set<std::string> inputs;
  for (const InternalAssertion::PatArg& arg : a.callPattern)
    if (arg.mode == ArgMode::In) {
      x.scopeArgs.push_back(arg.name);
      inputs.insert(arg.name);
    }

  std::vector<std::string> constrained;
  for (const auto& [var, range] : a.sizePrecond.ranges)
    if (range.lo > 0 || range.hi) constrained.push_back(var);
  if (constrained.size() > 1)
    throw AssertionError(
        "multi-variable precondition is not expressible as a pragma");
  if (constrained.size() == 1) {
    const std::string& var = constrained[0];
    if (!inputs.count(var))
      throw AssertionError("precondition variable '" + var +
                           "' is not an input argument");
    DomainSet::Range range = a.sizePrecond.rangeOf(var);
    XCAssertion::Precond p;
    p.id = var;
    if (range.lo > 0) p.lower = Expr::constant(Rat(range.lo));
    if (range.hi) p.upper = Expr::constant(Rat(*range.hi));
    x.precond = std::move(p);
  }

  if (a.lower && !isConstantZero(a.lower)) x.costLower = a.lower;
  if (a.upper && !isPosInf(a.upper)) x.costUpper = a.upper;
  for (const ExprPtr& bound : {x.costLower, x.costUpper}) {
    if (!bound) continue;
    for (const std::string& v : freeVars(*bound))
      if (!inputs.count(v))
        throw AssertionError("bound references '" + v +
                             "', which is not an input argument");
  }
  if (!x.costLower && !x.costUpper)
    throw AssertionError("assertion with default bounds [0, inf) has no "
                         "pragma form");
  return x;
}

InternalAssertion parseInternalLine(const std::string& text) {
  ExprLexer lex(text);
  lex.expectToken(":-");
  if (!lex.peekIsIdent()) lex.fail("expected an assertion status");
  std::optional<Status> st = statusFromName(lex.takeIdent());
  if (!st) lex.fail("unknown assertion status");
  if (lex.takeIdent() != "pred") lex.fail("expected 'pred'");

  InternalAssertion a;
  a.status = *st;
  a.pred.name = lex.takeIdent();
  lex.expectToken("(");
  std::set<std::string> names;
  if (!lex.tryToken(")")) {
    do {
      InternalAssertion::PatArg arg;
      arg.name = lex.takeIdent();
      if (!names.insert(arg.name).second)
        lex.fail("repeated argument name '" + arg.name + "'");
      a.callPattern.push_back(std::move(arg));
    } while (lex.tryToken(","));
    lex.expectToken(")");
  }
  a.pred.arity = a.callPattern.size();

  if (lex.tryToken(":")) {
    lex.expectToken("(");
    do {
      ExprPtr lhs = lex.parseExpr();
      lex.expectToken("<=");
      ExprPtr rhs = lex.parseExpr();
      bool lhsVar = lhs->kind == ExprKind::Var && names.count(lhs->name);
      bool rhsVar = rhs->kind == ExprKind::Var && names.count(rhs->name);
      if (lhsVar == rhsVar)
        lex.fail("precondition must bound exactly one argument per "
                 "condition");
      if (rhsVar)
        restrictLower(a.sizePrecond, rhs->name,
                      evalGroundToRat(lhs, "precondition bound"));
      else
        restrictUpper(a.sizePrecond, lhs->name,
                      evalGroundToRat(rhs, "precondition bound"));
    } while (lex.tryToken("&&"));
    lex.expectToken(")");
  }

  lex.expectToken("+");
  if (lex.takeIdent() != "resource") lex.fail("expected 'resource'");
  lex.expectToken("(");
  a.resourceName = lex.takeIdent();
  lex.expectToken(",");
  a.lower = lex.parseExpr();
  lex.expectToken(",");
  a.upper = lex.parseExpr();
  lex.expectToken(")");
  lex.expectToken(".");
  if (!lex.atEnd()) lex.fail("trailing input after assertion");
  return a;
}

std::string printInternalLine(const InternalAssertion& a) {
  std::ostringstream os;
  os << ":- " << statusName(a.status) << " pred " << a.pred.name << '(';
  for (size_t i = 0; i < a.callPattern.size(); ++i) {
    if (i) os << ',';
    os << a.callPattern[i].name;
  }
  os << ')';
  std::vector<std::string> pieces;
  for (const InternalAssertion::PatArg& arg : a.callPattern) {
    auto it = a.sizePrecond.ranges.find(arg.name);
    if (it == a.sizePrecond.ranges.end()) continue;
    if (it->second.lo > 0)
      pieces.push_back(it->second.lo.get_str() + " <= " + arg.name);
    if (it->second.hi)
      pieces.push_back(arg.name + " <= " + it->second.hi->get_str());
  }
  if (!pieces.empty()) {
    os << " : (";
    for (size_t i = 0; i < pieces.size(); ++i) {
      if (i) os << " && ";
      os << pieces[i];
    }
    os << ')';
  }
  os << " + resource(" << a.resourceName << ", "
     << (a.lower ? render(a.lower) : "0") << ", "
     << (a.upper ? render(a.upper) : "inf") << ").";
  return os.str();
}

void resolveAgainstSignature(InternalAssertion& a,
                             const PredicateSignature& sig) {
  if (sig.arity() != a.callPattern.size())
    throw AssertionError("signature for " + predIdToString(a.pred) +
                         " declares " + std::to_string(sig.arity()) +
                         " arguments");
  if (!sig.outputPosition())
    throw AssertionError("signature for " + predIdToString(a.pred) +
                         " must declare exactly one output argument");
  for (size_t i = 0; i < sig.args.size(); ++i) {
    a.callPattern[i].typeName = sig.args[i].typeName;
    a.callPattern[i].mode = sig.args[i].mode;
    a.callPattern[i].metric = sig.args[i].metric;
  }
  std::set<std::string> inputs;
  for (const InternalAssertion::PatArg& arg : a.callPattern)
    if (arg.mode == ArgMode::In) inputs.insert(arg.name);
  for (const auto& [var, range] : a.sizePrecond.ranges)
    if (!inputs.count(var))
      throw AssertionError("precondition variable '" + var +
                           "' is not an input argument of " +
                           predIdToString(a.pred));
  for (const ExprPtr& bound : {a.lower, a.upper}) {
    if (!bound) continue;
    for (const std::string& v : freeVars(*bound))
      if (!inputs.count(v))
        throw AssertionError("bound references '" + v +
                             "', which is not an input size variable of " +
                             predIdToString(a.pred));
    for (const std::string& arr : arrayRefs(*bound))
      if (!inputs.count(arr))
        throw AssertionError("min()/max() argument '" + arr +
                             "' is not an input argument of " +
                             predIdToString(a.pred));
  }
}

}  // namespace enverify
