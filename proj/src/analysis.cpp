#include "enverify/analysis.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "enverify/compare.hpp"

namespace enverify {

namespace {

bool containsSumProd(const Expr& e) {
  if (e.kind == ExprKind::Sum || e.kind == ExprKind::Prod) return true;
  if (e.a && containsSumProd(*e.a)) return true;
  if (e.b && containsSumProd(*e.b)) return true;
  if (e.body && containsSumProd(*e.body)) return true;
  return false;
}

std::optional<Rat> constValue(const ExprPtr& e) {
  if (e->kind == ExprKind::Constant) return e->value;
  return std::nullopt;
}

bool isIntegral(const Rat& r) { return r.get_den() == 1; }

ExprPtr atInt(const ExprPtr& e, const std::string& var, const Int& n) {
  return normalize(
      substitute(e, {{var, Expr::constant(Rat(n))}}));
}

std::string pickIndexName(const std::set<std::string>& taken) {
  if (!taken.count("k")) return "k";
  for (int i = 2;; ++i) {
    std::string c = "k" + std::to_string(i);
    if (!taken.count(c)) return c;
  }
}

// Exact Gaussian elimination with partial pivoting; nullopt on a singular
// system.
std::optional<std::vector<Rat>> solveLinear(std::vector<std::vector<Rat>> a,
                                            std::vector<Rat> b) {
  size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (size_t row = 0; row < n; ++row) {
      if (row == col || a[row][col] == 0) continue;
      Rat f = a[row][col] / a[col][col];
      for (size_t k = col; k < n; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  std::vector<Rat> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// Monomial coefficients of a univariate polynomial expression, by exact
// evaluation at 0..deg and solving the Vandermonde system.
std::optional<std::vector<Rat>> univariateCoeffs(const ExprPtr& e,
                                                 const std::string& var,
                                                 unsigned deg) {
  std::vector<std::vector<Rat>> m(deg + 1, std::vector<Rat>(deg + 1));
  std::vector<Rat> rhs(deg + 1);
  for (unsigned i = 0; i <= deg; ++i) {
    Rat p(1);
    for (unsigned j = 0; j <= deg; ++j) {
      m[i][j] = p;
      p *= Rat(static_cast<long>(i));
    }
    EvalEnv env;
    env.vars[var] = ExtRat(Rat(static_cast<long>(i)));
    try {
      Enclosure v = eval(*e, env);
      if (!v.exact() || !v.lo.finite()) return std::nullopt;
      rhs[i] = v.lo.value();
    } catch (const EvalError&) {
      return std::nullopt;
    }
  }
  return solveLinear(std::move(m), std::move(rhs));
}

Int binomial(unsigned n, unsigned k) {
  Int r = 1;
  for (unsigned i = 0; i < k; ++i) {
    r *= Int(n - i);
    r /= Int(i + 1);
  }
  return r;
}

const Recurrence::Case* uniqueCaseAt(const Recurrence& r, const Int& n) {
  const Recurrence::Case* found = nullptr;
  for (const auto& c : r.cases) {
    if (!c.guard.rangeOf(r.var).contains(n)) continue;
    if (found) return nullptr;
    found = &c;
  }
  return found;
}

std::optional<ExprPtr> unrollAt(const Recurrence& r, const Int& n,
                                std::map<Int, std::optional<ExprPtr>>& memo) {
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  std::optional<ExprPtr> result;
  const Recurrence::Case* c = uniqueCaseAt(r, n);
  if (c && c->additive) {
    ExprPtr add = atInt(c->additive, r.var, n);
    if (c->selfCalls == 0) {
      result = add;
    } else if (n - c->descent >= 0) {
      auto sub = unrollAt(r, n - c->descent, memo);
      if (sub) {
        ExprPtr acc = add;
        for (unsigned i = 0; i < c->selfCalls; ++i)
          acc = Expr::add(acc, *sub);
        result = normalize(acc);
      }
    }
  }
  memo[n] = result;
  return result;
}

}  // namespace

std::optional<ExprPtr> unrollRecurrence(const Recurrence& r, const Int& n) {
  std::map<Int, std::optional<ExprPtr>> memo;
  return unrollAt(r, n, memo);
}

std::optional<ClosedForm> solveRecurrence(const Recurrence& r,
                                          std::string* note) {
  auto reject = [&](const std::string& why) -> std::optional<ClosedForm> {
    if (note) *note = why;
    return std::nullopt;
  };

  const Recurrence::Case* rec = nullptr;
  for (const auto& c : r.cases) {
    if (c.selfCalls == 0) continue;
    if (rec) return reject("more than one recursive case");
    rec = &c;
  }
  if (!rec) return reject("no recursive case");
  if (rec->descent != 1) return reject("descent step is not 1");
  if (!rec->additive) return reject("recursive case cost is unknown");

  DomainSet::Range rg = rec->guard.rangeOf(r.var);
  if (rg.hi) return reject("recursive case guard is bounded above");
  if (rg.lo < 1) return reject("recursion does not bottom out at a base case");
  Int n0 = rg.lo - 1;

  const Recurrence::Case* base = nullptr;
  for (const auto& c : r.cases) {
    if (c.selfCalls != 0 || !c.guard.rangeOf(r.var).contains(n0)) continue;
    if (base) return reject("base case at the boundary is ambiguous");
    base = &c;
  }
  if (!base) return reject("no base case at the recursion boundary");
  if (!base->additive) return reject("base case cost is unknown");

  ExprPtr b0 = atInt(base->additive, r.var, n0);
  ExprPtr p = normalize(rec->additive);
  Classification pc = classify(p);
  if (pc.cls != FunctionClass::Constant && pc.cls != FunctionClass::Polynomial)
    return reject("additive part is not polynomial");

  ExprPtr closed;
  if (rec->selfCalls == 1) {
    std::set<std::string> taken = freeVars(*p);
    taken.insert(r.var);
    std::string idx = pickIndexName(taken);
    ExprPtr body = substitute(p, {{r.var, Expr::variable(idx)}});
    // sum(n0+1 .. n) as the closable sum(1 .. n) minus its constant prefix;
    // the split is valid on n >= n0, which validFrom records.
    ExprPtr sumFull = Expr::sum(idx, Expr::constant(Rat(1)),
                                Expr::variable(r.var), body);
    ExprPtr prefix = Expr::sum(idx, Expr::constant(Rat(1)),
                               Expr::constant(Rat(n0)), body);
    closed = normalize(Expr::add(b0, Expr::sub(sumFull, prefix)));
    if (containsSumProd(*closed))
      return reject("summation over the additive part did not close");
  } else {
    std::set<std::string> fv = freeVars(*p);
    fv.erase(r.var);
    if (!fv.empty())
      return reject("exponential recurrence with a non-constant-coefficient "
                    "additive part");
    if (pc.degree > 3) return reject("additive degree exceeds 3");
    unsigned m = pc.degree;
    auto pcoeffs = univariateCoeffs(p, r.var, m);
    if (!pcoeffs) return reject("could not extract additive coefficients");
    Rat a(static_cast<long>(rec->selfCalls));
    // q(n) - a q(n-1) = p(n); the matrix is triangular with 1 - a on the
    // diagonal, so it is invertible for a >= 2.
    std::vector<std::vector<Rat>> sys(m + 1, std::vector<Rat>(m + 1, Rat(0)));
    for (unsigned i = 0; i <= m; ++i) {
      for (unsigned j = 0; j <= i; ++j) {
        Rat c = Rat(binomial(i, j));
        if ((i - j) % 2 == 1) c = -c;
        sys[j][i] = (i == j ? Rat(1) : Rat(0)) - a * c;
      }
    }
    auto q = solveLinear(sys, *pcoeffs);
    if (!q) return reject("no particular polynomial solution");
    ExprPtr qExpr = Expr::constant((*q)[0]);
    for (unsigned i = 1; i <= m; ++i) {
      ExprPtr t = Expr::mul(Expr::constant((*q)[i]),
                            Expr::power(Expr::variable(r.var),
                                        Expr::constant(Rat(i))));
      qExpr = Expr::add(qExpr, t);
    }
    ExprPtr qAtN0 = atInt(qExpr, r.var, n0);
    ExprPtr c0 = normalize(Expr::sub(b0, qAtN0));
    ExprPtr expo = normalize(Expr::sub(Expr::variable(r.var),
                                       Expr::constant(Rat(n0))));
    ExprPtr pw = Expr::power(Expr::constant(a), expo);
    closed = normalize(Expr::add(Expr::mul(c0, pw), qExpr));
  }

  for (Int k = 0; k <= 25; k += 1) {
    Int n = n0 + k;
    auto un = unrollRecurrence(r, n);
    if (!un) return reject("unrolling is not defined at " + n.get_str());
    if (!structurallyEqual(atInt(closed, r.var, n), *un))
      return reject("closed form disagrees with unrolling at " + n.get_str());
  }

  Int validFrom = n0;
  while (validFrom > 0) {
    Int m = validFrom - 1;
    auto un = unrollRecurrence(r, m);
    if (!un || !structurallyEqual(atInt(closed, r.var, m), *un)) break;
    validFrom = m;
  }
  return ClosedForm{closed, validFrom};
}

namespace {

const std::array<std::string, 2> kResources = {"energy", "steps"};
constexpr size_t kLower = 0;
constexpr size_t kUpper = 1;

// Size of a runtime value under one metric, as propagation sees it: a
// closed expression over the input size variables, the output size of a
// self call plus an integer shift, or unknown.
struct SizeVal {
  enum class Kind { Expr, SelfOut, Unknown };
  Kind kind = Kind::Unknown;
  SizeMetric metric = SizeMetric::IntValue;
  ExprPtr expr;
  Rat shift;

  static SizeVal unknown() { return {}; }
  static SizeVal of(SizeMetric m, ExprPtr e) {
    SizeVal v;
    v.kind = Kind::Expr;
    v.metric = m;
    v.expr = std::move(e);
    return v;
  }
  static SizeVal selfOut(SizeMetric m, Rat s) {
    SizeVal v;
    v.kind = Kind::SelfOut;
    v.metric = m;
    v.shift = std::move(s);
    return v;
  }
};

struct Binding {
  enum class Kind { Size, Alias };
  Kind kind = Kind::Size;
  SizeVal size;
  TermPtr term;
};

using Env = std::map<std::string, Binding>;

SizeVal resolveSize(const TermPtr& t, SizeMetric metric, const Env& env,
                    int depth = 0);

SizeVal resolveArith(const std::string& op, const TermPtr& lhs,
                     const TermPtr& rhs, const Env& env, int depth) {
  SizeVal l = resolveSize(lhs, SizeMetric::IntValue, env, depth);
  SizeVal r = resolveSize(rhs, SizeMetric::IntValue, env, depth);
  auto both = [](const SizeVal& a, const SizeVal& b) {
    return a.kind == SizeVal::Kind::Expr && b.kind == SizeVal::Kind::Expr;
  };
  if (op == "+") {
    if (both(l, r))
      return SizeVal::of(SizeMetric::IntValue,
                         normalize(Expr::add(l.expr, r.expr)));
    if (l.kind == SizeVal::Kind::SelfOut && r.kind == SizeVal::Kind::Expr) {
      if (auto c = constValue(r.expr))
        return SizeVal::selfOut(SizeMetric::IntValue, l.shift + *c);
    }
    if (r.kind == SizeVal::Kind::SelfOut && l.kind == SizeVal::Kind::Expr) {
      if (auto c = constValue(l.expr))
        return SizeVal::selfOut(SizeMetric::IntValue, r.shift + *c);
    }
    return SizeVal::unknown();
  }
  if (op == "-") {
    if (both(l, r))
      return SizeVal::of(SizeMetric::IntValue,
                         normalize(Expr::sub(l.expr, r.expr)));
    if (l.kind == SizeVal::Kind::SelfOut && r.kind == SizeVal::Kind::Expr) {
      if (auto c = constValue(r.expr))
        return SizeVal::selfOut(SizeMetric::IntValue, l.shift - *c);
    }
    return SizeVal::unknown();
  }
  if (op == "*" && both(l, r))
    return SizeVal::of(SizeMetric::IntValue,
                       normalize(Expr::mul(l.expr, r.expr)));
  return SizeVal::unknown();
}

SizeVal resolveSize(const TermPtr& t, SizeMetric metric, const Env& env,
                    int depth) {
  if (depth > 64) return SizeVal::unknown();
  switch (t->kind) {
    case TermKind::Var: {
      auto it = env.find(t->name);
      if (it == env.end()) return SizeVal::unknown();
      if (it->second.kind == Binding::Kind::Alias)
        return resolveSize(it->second.term, metric, env, depth + 1);
      const SizeVal& v = it->second.size;
      if (v.kind != SizeVal::Kind::Unknown && v.metric != metric)
        return SizeVal::unknown();
      return v;
    }
    case TermKind::IntConst:
      if (metric == SizeMetric::IntValue)
        return SizeVal::of(metric, Expr::constant(Rat(t->value)));
      if (metric == SizeMetric::TermDepth)
        return SizeVal::of(metric, Expr::constant(1));
      return SizeVal::unknown();
    case TermKind::Compound:
      break;
  }
  if (isNil(*t)) {
    if (metric == SizeMetric::ListLength)
      return SizeVal::of(metric, Expr::constant(0));
    if (metric == SizeMetric::TermDepth)
      return SizeVal::of(metric, Expr::constant(1));
    return SizeVal::unknown();
  }
  if (isCons(*t)) {
    if (metric != SizeMetric::ListLength) return SizeVal::unknown();
    SizeVal tail = resolveSize(t->args[1], metric, env, depth + 1);
    if (tail.kind == SizeVal::Kind::Expr)
      return SizeVal::of(metric,
                         normalize(Expr::add(tail.expr, Expr::constant(1))));
    if (tail.kind == SizeVal::Kind::SelfOut)
      return SizeVal::selfOut(metric, tail.shift + 1);
    return SizeVal::unknown();
  }
  if (metric == SizeMetric::IntValue && t->args.size() == 2 &&
      (t->name == "+" || t->name == "-" || t->name == "*"))
    return resolveArith(t->name, t->args[0], t->args[1], env, depth + 1);
  if (metric == SizeMetric::IntValue && t->args.size() == 1 && t->name == "-") {
    SizeVal v = resolveSize(t->args[0], metric, env, depth + 1);
    if (v.kind == SizeVal::Kind::Expr)
      return SizeVal::of(metric,
                         normalize(Expr::sub(Expr::constant(0), v.expr)));
    return SizeVal::unknown();
  }
  return SizeVal::unknown();
}

struct SelfCall {
  std::vector<SizeVal> inputSizes;  // aligned with the input position list
};

struct ClauseInfo {
  DomainSet domain;
  bool domainEmpty = false;
  bool opaqueGuard = false;
  std::vector<SelfCall> selfCalls;
  std::map<std::string, std::array<ExprPtr, 2>> additive;
  SizeVal outSize;
  bool supported = true;
  std::vector<std::string> notes;
};

struct PredContext {
  const PredId& id;
  const PredicateSignature& sig;
  const SignatureTable& sigs;
  const EnergyModel& model;
  const AnalysisResult& done;
  const TrustTable& trusts;
};

void dropSide(ClauseInfo& ci, const std::string& res, size_t side) {
  ci.additive[res][side] = nullptr;
}

void addInto(ClauseInfo& ci, const std::string& res, size_t side,
             const ExprPtr& amount) {
  ExprPtr& acc = ci.additive[res][side];
  if (!acc) return;
  if (!amount) {
    acc = nullptr;
    return;
  }
  acc = Expr::add(acc, amount);
}

// Guards contribute domain restrictions when one side is exactly an input
// size variable and the other a constant; anything else is opaque for the
// mutual-exclusion check but costs nothing in precision here.
void applyGuard(ClauseInfo& ci, const std::string& op, const SizeVal& l,
                const SizeVal& r) {
  auto isVar = [](const SizeVal& v) {
    return v.kind == SizeVal::Kind::Expr && v.expr->kind == ExprKind::Var;
  };
  auto isConst = [](const SizeVal& v) {
    return v.kind == SizeVal::Kind::Expr &&
           v.expr->kind == ExprKind::Constant;
  };
  std::string var;
  Rat c;
  std::string effOp = op;
  if (isVar(l) && isConst(r)) {
    var = l.expr->name;
    c = r.expr->value;
  } else if (isConst(l) && isVar(r)) {
    var = r.expr->name;
    c = l.expr->value;
    if (op == "=<") effOp = ">=";
    else if (op == "<") effOp = ">";
    else if (op == ">") effOp = "<";
    else if (op == ">=") effOp = "=<";
  } else {
    ci.opaqueGuard = true;
    return;
  }
  DomainSet::Range range;
  if (effOp == "=<") {
    range.hi = floorRat(c);
  } else if (effOp == "<") {
    range.hi = ceilRat(c) - 1;
  } else if (effOp == ">=") {
    range.lo = ceilRat(c);
  } else if (effOp == ">") {
    range.lo = floorRat(c) + 1;
  } else {  // ==
    if (!isIntegral(c)) {
      ci.domainEmpty = true;
      return;
    }
    range.lo = c.get_num();
    range.hi = c.get_num();
  }
  ci.domain.restrict(var, range);
  if (ci.domain.empty()) ci.domainEmpty = true;
}

// Cost and output-size contribution of one non-self call, resolved through
// the analysis results so far, the trust table, or the model, in that
// order of preference per resource.
void applyCallee(ClauseInfo& ci, const PredContext& cx, const Literal& lit,
                 Env& env) {
  PredId qid{lit.name, lit.args.size()};
  const PredicateSignature* qsig = cx.sigs.find(qid);
  const PredAnalysis* qa = cx.done.find(qid);
  auto trustIt = cx.trusts.find(qid);
  const std::map<std::string, IntervalFn>* trust =
      trustIt == cx.trusts.end() ? nullptr : &trustIt->second;
  bool leaf = cx.model.hasEntry(lit.name, lit.args.size());

  // Resolved call-site sizes per callee input, when a signature exists.
  std::vector<ExprPtr> argSizes;
  std::map<std::string, ExprPtr> subst;
  bool sizesOk = false;
  if (qsig) {
    sizesOk = true;
    for (size_t pos : qsig->inputPositions()) {
      SizeVal v = resolveSize(lit.args[pos], qsig->args[pos].metric, env);
      if (v.kind != SizeVal::Kind::Expr) {
        sizesOk = false;
        break;
      }
      argSizes.push_back(v.expr);
      subst[qsig->args[pos].name] = v.expr;
    }
  }

  auto substituteBound = [&](const BoundFn& f) -> ExprPtr {
    if (!sizesOk) return nullptr;
    if (f.expr->kind == ExprKind::PosInf) return nullptr;
    // A callee bound restricted below its full domain would need a
    // call-site range proof; keep only full-domain bounds. Ranges that
    // merely restate the nonnegative default do not restrict.
    for (const auto& [v, r] : f.domain.ranges)
      if (r.lo > 0 || r.hi) return nullptr;
    return normalize(substitute(f.expr, subst));
  };

  for (const auto& res : kResources) {
    for (size_t side : {kLower, kUpper}) {
      if (!ci.additive.at(res)[side]) continue;
      ExprPtr c;
      if (trust && trust->count(res)) {
        const IntervalFn& f = trust->at(res);
        c = substituteBound(side == kLower ? f.lower : f.upper);
        if (c) ci.notes.push_back("uses trusted bound for " +
                                  predIdToString(qid));
      }
      bool fromAnalysis = false;
      if (!c && qa && qa->cost.count(res)) {
        const IntervalFn& f = qa->cost.at(res);
        c = substituteBound(side == kLower ? f.lower : f.upper);
        fromAnalysis = c != nullptr;
      }
      if (!c && leaf && res == "energy") {
        std::optional<Rat> v =
            tryLookup(cx.model, lit.name, lit.args.size(),
                      side == kLower ? BoundSide::Lower : BoundSide::Upper);
        if (v) c = Expr::constant(*v);
      }
      if (!c && leaf && res == "steps") c = Expr::constant(0);
      if (!c && side == kLower && !fromAnalysis) c = Expr::constant(0);
      if (!c) {
        dropSide(ci, res, side);
        ci.notes.push_back("no " + res + " bound for call to " +
                           predIdToString(qid));
      } else {
        addInto(ci, res, side, c);
      }
    }
  }

  // Output size: only an exact interval over a full domain binds.
  if (qa && qa->outputSize && qsig) {
    auto opos = qsig->outputPosition();
    const IntervalFn& os = *qa->outputSize;
    if (opos && lit.args[*opos]->kind == TermKind::Var &&
        !env.count(lit.args[*opos]->name) &&
        structurallyEqual(os.lower.expr, os.upper.expr)) {
      if (ExprPtr sz = substituteBound(os.lower)) {
        env[lit.args[*opos]->name] =
            Binding{Binding::Kind::Size,
                    SizeVal::of(qsig->args[*opos].metric, sz), nullptr};
      }
    }
  }
}

ClauseInfo processClause(const Clause& clause, const PredContext& cx) {
  ClauseInfo ci;
  ci.additive["steps"] = {Expr::constant(1), Expr::constant(1)};
  ci.additive["energy"] = {Expr::constant(0), Expr::constant(0)};

  auto unsupported = [&](const std::string& why) {
    ci.supported = false;
    ci.notes.push_back(why);
  };

  Env env;
  auto opos = cx.sig.outputPosition();
  TermPtr outTerm;
  for (size_t i = 0; i < clause.headArgs.size(); ++i) {
    const TermPtr& t = clause.headArgs[i];
    if (opos && *opos == i) {
      outTerm = t;
      continue;
    }
    const SigArg& arg = cx.sig.args[i];
    if (t->kind == TermKind::Var) {
      if (env.count(t->name)) {
        unsupported("repeated variable " + t->name + " across head inputs");
        return ci;
      }
      env[t->name] = Binding{Binding::Kind::Size,
                             SizeVal::of(arg.metric, Expr::variable(arg.name)),
                             nullptr};
      continue;
    }
    if (arg.metric == SizeMetric::IntValue && t->kind == TermKind::IntConst) {
      if (t->value < 0) {
        ci.domainEmpty = true;
        continue;
      }
      ci.domain.restrict(arg.name, {t->value, t->value});
      continue;
    }
    if (arg.metric == SizeMetric::ListLength && isNil(*t)) {
      ci.domain.restrict(arg.name, {Int(0), Int(0)});
      continue;
    }
    if (arg.metric == SizeMetric::ListLength && isCons(*t)) {
      Int k = 0;
      TermPtr cur = t;
      while (isCons(*cur)) {
        k += 1;
        cur = cur->args[1];
      }
      if (cur->kind == TermKind::Var && !env.count(cur->name)) {
        env[cur->name] = Binding{
            Binding::Kind::Size,
            SizeVal::of(SizeMetric::ListLength,
                        normalize(Expr::sub(Expr::variable(arg.name),
                                            Expr::constant(Rat(k))))),
            nullptr};
        ci.domain.restrict(arg.name, {k, std::nullopt});
      } else if (isNil(*cur)) {
        ci.domain.restrict(arg.name, {k, k});
      } else {
        unsupported("unsupported list pattern in head argument " + arg.name);
        return ci;
      }
      continue;
    }
    unsupported("unsupported head pattern for argument " + arg.name);
    return ci;
  }
  if (ci.domainEmpty) return ci;

  for (const Literal& lit : clause.body) {
    if (lit.kind == LiteralKind::Builtin) {
      for (size_t side : {kLower, kUpper}) {
        Rat c = lookup(cx.model, lit,
                       side == kLower ? BoundSide::Lower : BoundSide::Upper);
        if (c != 0)
          for (const auto& res : kResources)
            if (res == "energy") addInto(ci, res, side, Expr::constant(c));
      }
      if (lit.name == "is") {
        if (lit.args[0]->kind != TermKind::Var || env.count(lit.args[0]->name)) {
          unsupported("is/2 does not bind a fresh variable");
          return ci;
        }
        env[lit.args[0]->name] =
            Binding{Binding::Kind::Size,
                    resolveSize(lit.args[1], SizeMetric::IntValue, env),
                    nullptr};
      } else if (lit.name == "=") {
        if (lit.args[0]->kind == TermKind::Var &&
            !env.count(lit.args[0]->name)) {
          env[lit.args[0]->name] =
              Binding{Binding::Kind::Alias, SizeVal::unknown(), lit.args[1]};
        } else if (lit.args[1]->kind == TermKind::Var &&
                   !env.count(lit.args[1]->name)) {
          env[lit.args[1]->name] =
              Binding{Binding::Kind::Alias, SizeVal::unknown(), lit.args[0]};
        }
      } else {
        applyGuard(ci, lit.name,
                   resolveSize(lit.args[0], SizeMetric::IntValue, env),
                   resolveSize(lit.args[1], SizeMetric::IntValue, env));
        if (ci.domainEmpty) return ci;
      }
      continue;
    }

    PredId qid{lit.name, lit.args.size()};
    if (qid == cx.id) {
      SelfCall sc;
      for (size_t pos : cx.sig.inputPositions())
        sc.inputSizes.push_back(
            resolveSize(lit.args[pos], cx.sig.args[pos].metric, env));
      ci.selfCalls.push_back(std::move(sc));
      if (opos && lit.args[*opos]->kind == TermKind::Var &&
          !env.count(lit.args[*opos]->name)) {
        env[lit.args[*opos]->name] =
            Binding{Binding::Kind::Size,
                    SizeVal::selfOut(cx.sig.args[*opos].metric, Rat(0)),
                    nullptr};
      }
      continue;
    }
    applyCallee(ci, cx, lit, env);
  }

  if (opos && outTerm)
    ci.outSize = resolveSize(outTerm, cx.sig.args[*opos].metric, env);
  for (const auto& res : kResources)
    for (size_t side : {kLower, kUpper})
      if (ci.additive.at(res)[side])
        ci.additive[res][side] = normalize(ci.additive.at(res)[side]);
  return ci;
}

BoundFn zeroBound(const std::vector<std::string>& vars) {
  return makeBoundFn(Expr::constant(0), vars);
}

BoundFn infBound(const std::vector<std::string>& vars) {
  return makeBoundFn(Expr::posInf(), vars);
}

IntervalFn wideInterval(const std::vector<std::string>& vars) {
  return {zeroBound(vars), infBound(vars)};
}

// Whether candidate relates to every other expression as allowed by `want`
// at every integer point (full domain), so it is a one-sided envelope.
bool dominates(const ExprPtr& cand, const std::vector<ExprPtr>& all,
               const std::vector<std::string>& vars, Rel want) {
  for (const auto& other : all) {
    if (structurallyEqual(cand, other)) continue;
    SignPartition sp;
    try {
      sp = compareFns(makeBoundFn(cand, vars), makeBoundFn(other, vars));
    } catch (const EvalError&) {
      return false;
    }
    for (const auto& reg : sp.regions)
      if (reg.rel != want && reg.rel != Rel::Eq) return false;
  }
  return true;
}

struct PredBuilder {
  const PredContext& cx;
  PredAnalysis out;
  std::vector<ClauseInfo> clauses;
  bool recursive = false;

  explicit PredBuilder(const PredContext& c) : cx(c) {}

  void note(const std::string& s) { out.notes.push_back(s); }

  void degrade(const std::string& res, size_t side, const std::string& why) {
    note(why);
    out.supported = false;
    IntervalFn& f = out.cost[res];
    if (side == kLower)
      f.lower = zeroBound(out.inputVars);
    else
      f.upper = infBound(out.inputVars);
  }

  void degradeAll(const std::string& why) {
    note(why);
    out.supported = false;
    for (const auto& res : kResources) out.cost[res] = wideInterval(out.inputVars);
    out.outputSize.reset();
  }

  bool checkOverlap() {
    bool overlap = false;
    for (size_t i = 0; i < clauses.size() && !overlap; ++i) {
      if (clauses[i].opaqueGuard) overlap = true;
      for (size_t j = i + 1; j < clauses.size() && !overlap; ++j)
        if (!intersect(clauses[i].domain, clauses[j].domain).empty())
          overlap = true;
    }
    if (overlap) out.deterministic = false;
    return overlap;
  }

  void buildNonRecursive() {
    for (const auto& res : kResources) {
      for (size_t side : {kLower, kUpper}) {
        std::vector<ExprPtr> cands;
        bool missing = false;
        for (const auto& ci : clauses) {
          if (!ci.additive.at(res)[side]) missing = true;
          else cands.push_back(ci.additive.at(res)[side]);
        }
        if (missing) {
          degrade(res, side, "a clause has no " + res + " bound");
          continue;
        }
        bool allEqual = true;
        for (const auto& c : cands)
          allEqual = allEqual && structurallyEqual(c, cands.front());
        ExprPtr pick;
        if (allEqual) {
          pick = cands.front();
        } else {
          Rel want = side == kLower ? Rel::Lt : Rel::Gt;
          for (const auto& c : cands) {
            if (dominates(c, cands, out.inputVars, want)) {
              pick = c;
              break;
            }
          }
          if (pick) note("widened " + res + " over clause alternatives");
        }
        if (!pick) {
          degrade(res, side, "no clause " + res + " bound dominates");
          continue;
        }
        DomainSet dom;
        if (clauses.size() == 1) dom = clauses.front().domain;
        IntervalFn& f = out.cost[res];
        (side == kLower ? f.lower : f.upper) =
            makeBoundFn(pick, out.inputVars, dom);
      }
    }
    std::vector<ExprPtr> sizes;
    bool sizesOk = out.outPos.has_value();
    for (const auto& ci : clauses)
      if (ci.outSize.kind == SizeVal::Kind::Expr) sizes.push_back(ci.outSize.expr);
      else sizesOk = false;
    if (sizesOk && !sizes.empty()) {
      bool allEqual = true;
      for (const auto& s : sizes)
        allEqual = allEqual && structurallyEqual(s, sizes.front());
      if (allEqual) {
        DomainSet dom;
        if (clauses.size() == 1) dom = clauses.front().domain;
        BoundFn b = makeBoundFn(sizes.front(), out.inputVars, dom);
        out.outputSize = IntervalFn{b, b};
      }
    }
  }

  // The recursion variable is the unique input whose size strictly
  // decreases by 1 in every self call; inputs that feed any cost, size, or
  // guard must be passed unchanged, while unused inputs may vary freely.
  std::optional<std::string> findRecursionVar() {
    std::optional<std::string> rv;
    const auto& vars = out.inputVars;
    for (size_t j = 0; j < vars.size(); ++j) {
      bool decreasing = true;
      for (const auto& ci : clauses)
        for (const auto& sc : ci.selfCalls) {
          const SizeVal& v = sc.inputSizes[j];
          if (v.kind != SizeVal::Kind::Expr) {
            decreasing = false;
            continue;
          }
          ExprPtr delta =
              normalize(Expr::sub(v.expr, Expr::variable(vars[j])));
          auto c = constValue(delta);
          if (!c || *c != Rat(-1)) decreasing = false;
        }
      if (!decreasing) continue;
      if (rv) {
        note("more than one strictly decreasing input size");
        return std::nullopt;
      }
      rv = vars[j];
    }
    if (!rv) note("no input size strictly decreases across self calls");
    return rv;
  }

  bool validatePassives(const std::string& recVar) {
    std::set<std::string> used;
    for (const auto& ci : clauses) {
      for (const auto& [res, sides] : ci.additive)
        for (const auto& side : sides)
          if (side) {
            auto fv = freeVars(*side);
            used.insert(fv.begin(), fv.end());
          }
      if (ci.outSize.kind == SizeVal::Kind::Expr) {
        auto fv = freeVars(*ci.outSize.expr);
        used.insert(fv.begin(), fv.end());
      }
      for (const auto& [var, range] : ci.domain.ranges) {
        (void)range;
        used.insert(var);
      }
    }
    const auto& vars = out.inputVars;
    for (size_t j = 0; j < vars.size(); ++j) {
      if (vars[j] == recVar || !used.count(vars[j])) continue;
      for (const auto& ci : clauses)
        for (const auto& sc : ci.selfCalls) {
          const SizeVal& v = sc.inputSizes[j];
          if (v.kind != SizeVal::Kind::Expr ||
              !structurallyEqual(v.expr, Expr::variable(vars[j]))) {
            note("input size " + vars[j] +
                 " changes across self calls but affects the result");
            return false;
          }
        }
    }
    for (const auto& ci : clauses)
      for (const auto& [var, range] : ci.domain.ranges) {
        (void)range;
        if (var != recVar) {
          note("guard on non-recursion input " + var + " unsupported");
          return false;
        }
      }
    return true;
  }

  Recurrence makeRecurrence(const std::string& recVar,
                            const std::vector<ExprPtr>& additives) {
    Recurrence r;
    r.var = recVar;
    for (size_t i = 0; i < clauses.size(); ++i) {
      Recurrence::Case c;
      c.guard.restrict(recVar, clauses[i].domain.rangeOf(recVar));
      c.selfCalls = static_cast<unsigned>(clauses[i].selfCalls.size());
      c.additive = additives[i];
      r.cases.push_back(std::move(c));
    }
    return r;
  }

  void buildRecursive() {
    auto recVar = findRecursionVar();
    if (!recVar || !validatePassives(*recVar)) {
      degradeAll("recursion shape unsupported");
      return;
    }
    for (const auto& res : kResources) {
      for (size_t side : {kLower, kUpper}) {
        std::vector<ExprPtr> additives;
        bool ok = true;
        for (const auto& ci : clauses) {
          ExprPtr a = ci.additive.at(res)[side];
          if (!a) ok = false;
          additives.push_back(a);
        }
        if (!ok) {
          degrade(res, side, "a clause has no " + res + " bound");
          continue;
        }
        std::string why;
        auto cf = solveRecurrence(makeRecurrence(*recVar, additives), &why);
        if (!cf) {
          degrade(res, side, res + " recurrence: " + why);
          continue;
        }
        DomainSet dom;
        dom.restrict(*recVar, {cf->validFrom, std::nullopt});
        if (cf->validFrom > 0)
          note(res + " bound valid from " + *recVar + " = " +
               cf->validFrom.get_str());
        IntervalFn& f = out.cost[res];
        (side == kLower ? f.lower : f.upper) =
            makeBoundFn(cf->expr, out.inputVars, dom);
      }
    }
    buildRecursiveSize(*recVar);
  }

  void buildRecursiveSize(const std::string& recVar) {
    if (!out.outPos) return;
    bool usesSelf = false;
    std::vector<ExprPtr> additives;
    for (const auto& ci : clauses) {
      switch (ci.outSize.kind) {
        case SizeVal::Kind::Expr:
          additives.push_back(ci.outSize.expr);
          break;
        case SizeVal::Kind::SelfOut:
          usesSelf = true;
          additives.push_back(Expr::constant(ci.outSize.shift));
          break;
        case SizeVal::Kind::Unknown:
          return;
      }
    }
    if (!usesSelf) {
      bool allEqual = true;
      for (const auto& s : additives)
        allEqual = allEqual && structurallyEqual(s, additives.front());
      if (allEqual) {
        BoundFn b = makeBoundFn(additives.front(), out.inputVars);
        out.outputSize = IntervalFn{b, b};
      }
      return;
    }
    Recurrence r;
    r.var = recVar;
    for (size_t i = 0; i < clauses.size(); ++i) {
      Recurrence::Case c;
      c.guard.restrict(recVar, clauses[i].domain.rangeOf(recVar));
      c.selfCalls =
          clauses[i].outSize.kind == SizeVal::Kind::SelfOut ? 1 : 0;
      c.additive = additives[i];
      r.cases.push_back(std::move(c));
    }
    std::string why;
    auto cf = solveRecurrence(r, &why);
    if (!cf) {
      note("output size recurrence: " + why);
      return;
    }
    DomainSet dom;
    dom.restrict(recVar, {cf->validFrom, std::nullopt});
    BoundFn b = makeBoundFn(cf->expr, out.inputVars, dom);
    out.outputSize = IntervalFn{b, b};
  }

  // lower > upper anywhere means an analysis defect; widen the lower bound
  // so downstream comparisons stay safe-sided.
  void checkOrder() {
    for (const auto& res : kResources) {
      IntervalFn& f = out.cost[res];
      if (f.upper.expr->kind == ExprKind::PosInf) continue;
      if (structurallyEqual(f.lower.expr, f.upper.expr)) continue;
      bool ok = true;
      try {
        SignPartition sp = compareFns(f.lower, f.upper);
        for (const auto& reg : sp.regions)
          if (reg.rel != Rel::Lt && reg.rel != Rel::Eq) ok = false;
      } catch (const std::exception&) {
        ok = false;
      }
      if (!ok) {
        f.lower = zeroBound(out.inputVars);
        note(res + " lower bound not confirmed below upper; widened to 0");
      }
    }
  }

  PredAnalysis build(const std::vector<Clause>& src) {
    for (size_t i = 0; i < cx.sig.args.size(); ++i)
      if (cx.sig.args[i].mode == ArgMode::In)
        out.inputVars.push_back(cx.sig.args[i].name);
    out.outPos = cx.sig.outputPosition();
    for (const auto& res : kResources) out.cost[res] = wideInterval(out.inputVars);

    for (const Clause& c : src) {
      ClauseInfo ci = processClause(c, cx);
      for (const auto& n : ci.notes) note(n);
      if (ci.domainEmpty) {
        note("a clause guard is unsatisfiable over sizes; clause dropped");
        continue;
      }
      if (!ci.supported) {
        degradeAll("clause unsupported");
        return out;
      }
      clauses.push_back(std::move(ci));
    }
    if (clauses.empty()) {
      degradeAll("no applicable clauses");
      return out;
    }
    for (const auto& ci : clauses) recursive |= !ci.selfCalls.empty();

    bool overlap = checkOverlap();
    if (overlap && recursive) {
      degradeAll("overlapping clause guards in a recursive predicate");
      return out;
    }
    if (recursive)
      buildRecursive();
    else
      buildNonRecursive();
    checkOrder();
    return out;
  }
};

}  // namespace

AnalysisResult analyzeProgram(const Program& p, const SignatureTable& sigs,
                              const EnergyModel& model,
                              const TrustTable& trusts) {
  AnalysisResult result;
  for (const SCC& scc : callGraphSCCs(p)) {
    if (scc.members.size() > 1) {
      for (const PredId& id : scc.members) {
        PredAnalysis pa;
        pa.supported = false;
        if (const PredicateSignature* sig = sigs.find(id)) {
          for (const auto& a : sig->args)
            if (a.mode == ArgMode::In) pa.inputVars.push_back(a.name);
          pa.outPos = sig->outputPosition();
        }
        for (const auto& res : kResources)
          pa.cost[res] = wideInterval(pa.inputVars);
        pa.notes.push_back("mutual recursion unsupported");
        result.preds.emplace(id, std::move(pa));
      }
      continue;
    }
    const PredId& id = scc.members.front();
    const PredicateSignature* sig = sigs.find(id);
    if (!sig) {
      PredAnalysis pa;
      pa.supported = false;
      for (const auto& res : kResources) pa.cost[res] = wideInterval({});
      pa.notes.push_back("no signature declared for " + predIdToString(id));
      result.notes.push_back("no signature declared for " +
                             predIdToString(id));
      result.preds.emplace(id, std::move(pa));
      continue;
    }
    PredContext cx{id, *sig, sigs, model, result, trusts};
    PredBuilder builder(cx);
    result.preds.emplace(id, builder.build(*p.clausesOf(id)));
  }
  return result;
}

}  // namespace enverify
