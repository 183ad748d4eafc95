#include "enverify/costfn.hpp"

#include <algorithm>
#include <sstream>

#include "enverify/poly.hpp"

namespace enverify {

DomainSet::Range DomainSet::rangeOf(const std::string& var) const {
  auto it = ranges.find(var);
  if (it != ranges.end()) return it->second;
  return Range{};
}

void DomainSet::restrict(const std::string& var, const Range& r) {
  Range cur = rangeOf(var);
  if (r.lo > cur.lo) cur.lo = r.lo;
  if (r.hi && (!cur.hi || *r.hi < *cur.hi)) cur.hi = r.hi;
  ranges[var] = cur;
}

bool DomainSet::contains(const std::map<std::string, Int>& point) const {
  for (const auto& [var, range] : ranges) {
    auto it = point.find(var);
    if (it == point.end()) continue;
    if (!range.contains(it->second)) return false;
  }
  for (const auto& [var, v] : point)
    if (v < 0) return false;
  return true;
}

bool DomainSet::empty() const {
  for (const auto& [var, range] : ranges)
    if (range.empty()) return true;
  return false;
}

DomainSet intersect(const DomainSet& a, const DomainSet& b) {
  DomainSet r = a;
  for (const auto& [var, range] : b.ranges) r.restrict(var, range);
  return r;
}

std::string domainToString(const DomainSet& d) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [var, range] : d.ranges) {
    if (!first) os << ", ";
    first = false;
    os << range.lo.get_str() << " <= " << var;
    if (range.hi) os << " <= " << range.hi->get_str();
  }
  if (first) os << "true";
  return os.str();
}

BoundFn makeBoundFn(ExprPtr expr, std::vector<std::string> vars,
                    DomainSet domain) {
  for (const auto& v : freeVars(*expr))
    if (std::find(vars.begin(), vars.end(), v) == vars.end())
      throw std::invalid_argument("bound function references unknown size " +
                                  v);
  return BoundFn{std::move(expr), std::move(vars), std::move(domain)};
}

namespace {

Enclosure evalSumProd(const Expr& e, const EvalEnv& env) {
  Enclosure lo = eval(*e.a, env);
  Enclosure hi = eval(*e.b, env);
  if (!lo.exact() || !hi.exact() || !lo.finite() || !hi.finite())
    throw EvalError("summation bounds must evaluate to exact finite values");
  const Rat& lv = lo.lo.value();
  const Rat& hv = hi.lo.value();
  if (lv.get_den() != 1 || hv.get_den() != 1)
    throw EvalError("summation bounds must be integers");
  Int i = lv.get_num();
  Int end = hv.get_num();
  bool isSum = e.kind == ExprKind::Sum;
  Enclosure acc = Enclosure::point(ExtRat(Rat(isSum ? 0 : 1)));
  Int count = end - i + 1;
  if (count > 2000000) throw EvalError("summation range too large");
  EvalEnv inner = env;
  for (; i <= end; ++i) {
    inner.vars[e.name] = ExtRat(Rat(i));
    Enclosure item = eval(*e.body, inner);
    acc = isSum ? acc + item : acc * item;
  }
  return acc;
}

Enclosure evalPower(const Expr& e, const EvalEnv& env) {
  Enclosure base = eval(*e.a, env);
  Enclosure exp = eval(*e.b, env);
  if (!exp.exact() || !exp.finite())
    throw EvalError("exponent must evaluate to an exact finite rational");
  const Rat& k = exp.lo.value();
  if (base.exact() && base.finite()) {
    const Rat& b = base.lo.value();
    if (k.get_den() == 1) {
      if (!k.get_num().fits_slong_p()) throw EvalError("exponent too large");
      long ki = k.get_num().get_si();
      if (sgn(b) == 0 && ki < 0) throw EvalError("negative power of zero");
      if (sgn(b) == 0) return Enclosure::point(ExtRat(Rat(ki == 0 ? 1 : 0)));
      return Enclosure::point(ExtRat(powRat(b, ki)));
    }
    if (sgn(b) < 0) throw EvalError("fractional power of a negative value");
    if (sgn(b) == 0) {
      if (sgn(k) < 0) throw EvalError("negative power of zero");
      return Enclosure::point(ExtRat(Rat(0)));
    }
    return enclosePow(b, k);
  }
  // Interval base with integer exponent: monotone cases only.
  if (!base.finite()) throw EvalError("power of an infinite value");
  if (k.get_den() != 1) {
    if (base.lo.sign() < 0) throw EvalError("fractional power of a negative value");
    Enclosure lo = enclosePow(base.lo.value(), k);
    Enclosure hi = enclosePow(base.hi.value(), k);
    if (sgn(k) < 0) std::swap(lo, hi);
    return Enclosure(lo.lo, hi.hi);
  }
  if (!k.get_num().fits_slong_p()) throw EvalError("exponent too large");
  long ki = k.get_num().get_si();
  if (ki >= 0 && ki % 2 == 0 && base.lo.sign() < 0 && base.hi.sign() > 0) {
    Rat l = powRat(base.lo.value(), ki);
    Rat h = powRat(base.hi.value(), ki);
    return Enclosure(ExtRat(Rat(0)), ExtRat(std::max(l, h)));
  }
  if (ki < 0 && base.lo.sign() <= 0 && base.hi.sign() >= 0)
    throw EvalError("negative power over an interval containing zero");
  Rat l = powRat(base.lo.value(), ki);
  Rat h = powRat(base.hi.value(), ki);
  if (l > h) std::swap(l, h);
  return Enclosure(ExtRat(l), ExtRat(h));
}

Enclosure evalLog(const Expr& e, const EvalEnv& env) {
  Enclosure base = eval(*e.a, env);
  Enclosure arg = eval(*e.b, env);
  if (!base.exact() || !base.finite())
    throw EvalError("log base must evaluate to an exact finite rational");
  const Rat& b = base.lo.value();
  if (b <= 1) throw EvalError("log base must exceed 1");
  if (arg.lo.sign() <= 0)
    throw EvalError("logarithm of a non-positive value");
  if (!arg.finite()) throw EvalError("logarithm of an infinite value");
  auto logAt = [&](const Rat& x) -> Enclosure {
    if (b == 2) return encloseLog2(x);
    Enclosure num = encloseLn(x);
    Enclosure den = encloseLn(b);
    return num / den;
  };
  if (arg.exact()) return logAt(arg.lo.value());
  Enclosure lo = logAt(arg.lo.value());
  Enclosure hi = logAt(arg.hi.value());
  return Enclosure(lo.lo, hi.hi);
}

}  // namespace

Enclosure eval(const Expr& e, const EvalEnv& env) {
  switch (e.kind) {
    case ExprKind::Constant:
      return Enclosure::point(ExtRat(e.value));
    case ExprKind::Var: {
      auto it = env.vars.find(e.name);
      if (it == env.vars.end()) throw EvalError("unbound size variable " + e.name);
      return Enclosure::point(it->second);
    }
    case ExprKind::Add:
      return eval(*e.a, env) + eval(*e.b, env);
    case ExprKind::Sub:
      return eval(*e.a, env) - eval(*e.b, env);
    case ExprKind::Mul:
      return eval(*e.a, env) * eval(*e.b, env);
    case ExprKind::Div:
      return eval(*e.a, env) / eval(*e.b, env);
    case ExprKind::Power:
      return evalPower(e, env);
    case ExprKind::Log:
      return evalLog(e, env);
    case ExprKind::Sum:
    case ExprKind::Prod:
      return evalSumProd(e, env);
    case ExprKind::ArrayMin: {
      auto it = env.arrayMin.find(e.name);
      if (it == env.arrayMin.end())
        throw EvalError("no element bounds for array " + e.name);
      return Enclosure::point(it->second);
    }
    case ExprKind::ArrayMax: {
      auto it = env.arrayMax.find(e.name);
      if (it == env.arrayMax.end())
        throw EvalError("no element bounds for array " + e.name);
      return Enclosure::point(it->second);
    }
    case ExprKind::PosInf:
      return Enclosure::point(ExtRat::posInf());
    case ExprKind::NegInf:
      return Enclosure::point(ExtRat::negInf());
  }
  throw EvalError("unreachable expression kind");
}

Enclosure evalAtPoint(const BoundFn& f, const std::map<std::string, Int>& pt) {
  EvalEnv env;
  for (const auto& [var, v] : pt) env.vars[var] = ExtRat(Rat(v));
  return eval(*f.expr, env);
}

namespace {

bool containsInf(const Expr& e) {
  switch (e.kind) {
    case ExprKind::PosInf:
    case ExprKind::NegInf:
      return true;
    case ExprKind::Constant:
    case ExprKind::Var:
    case ExprKind::ArrayMin:
    case ExprKind::ArrayMax:
      return false;
    case ExprKind::Sum:
    case ExprKind::Prod:
      return containsInf(*e.a) || containsInf(*e.b) || containsInf(*e.body);
    default:
      return containsInf(*e.a) || containsInf(*e.b);
  }
}

}  // namespace

ExprPtr normalize(const ExprPtr& e) {
  if (containsInf(*e)) return e;
  return polyFromExpr(e).toExpr();
}

BoundFn subtract(const BoundFn& a, const BoundFn& b) {
  std::vector<std::string> vars = a.vars;
  for (const auto& v : b.vars)
    if (std::find(vars.begin(), vars.end(), v) == vars.end())
      vars.push_back(v);
  DomainSet dom = intersect(a.domain, b.domain);
  if (dom.empty())
    throw std::invalid_argument("disjoint domains in subtraction");
  return makeBoundFn(normalize(Expr::sub(a.expr, b.expr)), std::move(vars),
                     std::move(dom));
}

std::string functionClassName(FunctionClass c) {
  switch (c) {
    case FunctionClass::Constant:
      return "constant";
    case FunctionClass::Polynomial:
      return "polynomial";
    case FunctionClass::Exponential:
      return "exponential";
    case FunctionClass::Logarithmic:
      return "logarithmic";
    case FunctionClass::Mixed:
      return "mixed";
    case FunctionClass::Unsupported:
      return "unsupported";
  }
  return "unsupported";
}

namespace {

// Is this atom an exponential in some size variable: power(c, e) with
// constant c > 1 and non-constant exponent (possibly nested)?
bool exponentialAtom(const Expr& e) {
  if (e.kind == ExprKind::Power) {
    if (e.a->kind == ExprKind::Constant && e.a->value > 1 &&
        !freeVars(*e.b).empty())
      return true;
    return exponentialAtom(*e.a);
  }
  return false;
}

bool logarithmicAtom(const Expr& e) {
  return e.kind == ExprKind::Log && !freeVars(*e.b).empty();
}

}  // namespace

Classification classify(const ExprPtr& normalized) {
  Poly p = polyFromExpr(normalized);
  bool hasExp = false;
  bool hasLog = false;
  for (const auto& [key, atom] : p.atoms()) {
    if (exponentialAtom(*atom)) {
      hasExp = true;
    } else if (logarithmicAtom(*atom)) {
      hasLog = true;
    } else {
      return {FunctionClass::Unsupported, 0};
    }
  }
  unsigned polyDeg = 0;
  bool hasPolyPart = false;
  bool mixedMonomial = false;
  for (const auto& [m, c] : p.terms()) {
    unsigned varDeg = 0;
    bool hasAtomFactor = false;
    for (const auto& [gen, exp] : m.factors) {
      if (p.atoms().count(gen))
        hasAtomFactor = true;
      else
        varDeg += exp;
    }
    if (hasAtomFactor && varDeg > 0) mixedMonomial = true;
    if (!hasAtomFactor && varDeg > 0) {
      hasPolyPart = true;
      polyDeg = std::max(polyDeg, varDeg);
    }
  }
  if (hasExp && hasLog) return {FunctionClass::Mixed, polyDeg};
  if (hasExp || hasLog) {
    if (mixedMonomial || hasPolyPart) return {FunctionClass::Mixed, polyDeg};
    return {hasExp ? FunctionClass::Exponential : FunctionClass::Logarithmic,
            polyDeg};
  }
  if (polyDeg == 0) return {FunctionClass::Constant, 0};
  return {FunctionClass::Polynomial, polyDeg};
}

const Int& factorial(unsigned n) {
  constexpr unsigned kMax = 64;
  static const std::vector<Int> table = [] {
    std::vector<Int> t(kMax + 1);
    t[0] = 1;
    for (unsigned i = 1; i <= kMax; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  if (n >= table.size()) throw std::invalid_argument("factorial out of range");
  return table[n];
}

namespace {

// Midpoint-rational series sum_{k<=order} (u * lnA)^k / k!.
ExprPtr seriesFor(const ExprPtr& u, const Rat& lnA, unsigned order) {
  ExprPtr acc = Expr::constant(1);
  for (unsigned k = 1; k <= order; ++k) {
    Rat coeff = powRat(lnA, static_cast<long>(k)) /
                Rat(factorial(k));
    ExprPtr term = Expr::mul(Expr::constant(coeff),
                             Expr::power(u, Expr::constant(static_cast<long>(k))));
    acc = Expr::add(acc, term);
  }
  return normalize(acc);
}

ExprPtr taylorWalk(const ExprPtr& e, unsigned order) {
  switch (e->kind) {
    case ExprKind::Power: {
      if (e->a->kind == ExprKind::Constant && e->a->value > 1 &&
          !freeVars(*e->b).empty()) {
        Rat lnA = encloseLn(e->a->value).midpoint();
        return seriesFor(e->b, lnA, order);
      }
      return Expr::power(taylorWalk(e->a, order), taylorWalk(e->b, order));
    }
    case ExprKind::Constant:
    case ExprKind::Var:
    case ExprKind::ArrayMin:
    case ExprKind::ArrayMax:
    case ExprKind::PosInf:
    case ExprKind::NegInf:
      return e;
    case ExprKind::Sum:
    case ExprKind::Prod:
      try {
        auto make = e->kind == ExprKind::Sum ? Expr::sum : Expr::prod;
        return make(e->name, taylorWalk(e->a, order), taylorWalk(e->b, order),
                    taylorWalk(e->body, order));
      } catch (const std::invalid_argument&) {
        return e;
      }
    default: {
      ExprPtr l = taylorWalk(e->a, order);
      ExprPtr r = taylorWalk(e->b, order);
      try {
        switch (e->kind) {
          case ExprKind::Add:
            return Expr::add(l, r);
          case ExprKind::Sub:
            return Expr::sub(l, r);
          case ExprKind::Mul:
            return Expr::mul(l, r);
          case ExprKind::Div:
            return Expr::div(l, r);
          case ExprKind::Log:
            return Expr::log(l, r);
          default:
            return e;
        }
      } catch (const std::invalid_argument&) {
        return e;
      }
    }
  }
}

}  // namespace

ExprPtr taylorExpand(const ExprPtr& e, unsigned order) {
  if (order == 0 || order > 32)
    throw std::invalid_argument("series order out of range");
  return normalize(taylorWalk(e, order));
}

ExprPtr taylorExpandNaturalExp(const ExprPtr& exponent, unsigned order) {
  if (order == 0 || order > 32)
    throw std::invalid_argument("series order out of range");
  return seriesFor(exponent, Rat(1), order);
}

}  // namespace enverify
