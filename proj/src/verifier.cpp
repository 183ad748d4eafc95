#include "enverify/verifier.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

#include <json.hpp>

#include "enverify/compare.hpp"

namespace enverify {

namespace {

bool fullRange(const DomainSet::Range& r) { return r.lo == 0 && !r.hi; }

DomainSet trimmed(const DomainSet& d) {
  DomainSet out;
  for (const auto& [v, r] : d.ranges)
    if (!fullRange(r)) out.ranges.emplace(v, r);
  return out;
}

std::string domainConjuncts(const DomainSet& d) {
  std::ostringstream os;
  bool any = false;
  auto piece = [&](const std::string& s) {
    if (any) os << " && ";
    os << s;
    any = true;
  };
  for (const auto& [v, r] : d.ranges) {
    if (fullRange(r)) continue;
    if (r.lo > 0) piece(r.lo.get_str() + " <= " + v);
    if (r.hi) piece(v + " <= " + r.hi->get_str());
  }
  return any ? os.str() : std::string("true");
}

bool containsInf(const Expr& e) {
  if (e.kind == ExprKind::PosInf || e.kind == ExprKind::NegInf) return true;
  if (e.a && containsInf(*e.a)) return true;
  if (e.b && containsInf(*e.b)) return true;
  if (e.body && containsInf(*e.body)) return true;
  return false;
}

// Partition of the core domain by one pointwise comparison; Rel::Lt means
// the left side is strictly below the right.
struct CondPart {
  std::vector<std::pair<DomainSet, Rel>> parts;
};

CondPart constantCond(const DomainSet& core, Rel rel) {
  CondPart c;
  c.parts.push_back({core, rel});
  return c;
}

CondPart compareCond(const ExprPtr& a, const ExprPtr& b,
                     const std::vector<std::string>& vars,
                     const DomainSet& core) {
  if (containsInf(*a) || containsInf(*b))
    return constantCond(core, Rel::Unknown);
  try {
    SignPartition sp =
        compareFns(makeBoundFn(a, vars, core), makeBoundFn(b, vars, core));
    CondPart out;
    for (const SignRegion& reg : sp.regions) {
      DomainSet r = core;
      r.restrict(sp.var, {reg.lo, reg.hi});
      if (!r.empty()) out.parts.push_back({std::move(r), reg.rel});
    }
    if (out.parts.empty()) return constantCond(core, Rel::Unknown);
    return out;
  } catch (const std::exception&) {
    return constantCond(core, Rel::Unknown);
  }
}

// Merge b into a when the regions agree everywhere except one variable
// whose ranges are adjacent.
bool tryMerge(DomainSet& a, const DomainSet& b) {
  std::set<std::string> vars;
  for (const auto& [v, r] : a.ranges) vars.insert(v);
  for (const auto& [v, r] : b.ranges) vars.insert(v);
  std::string diffVar;
  int diffs = 0;
  for (const auto& v : vars)
    if (!(a.rangeOf(v) == b.rangeOf(v))) {
      ++diffs;
      diffVar = v;
    }
  if (diffs == 0) return true;
  if (diffs > 1) return false;
  DomainSet::Range ra = a.rangeOf(diffVar);
  DomainSet::Range rb = b.rangeOf(diffVar);
  DomainSet::Range merged;
  if (ra.hi && *ra.hi + 1 == rb.lo) {
    merged = {ra.lo, rb.hi};
  } else if (rb.hi && *rb.hi + 1 == ra.lo) {
    merged = {rb.lo, ra.hi};
  } else {
    return false;
  }
  if (fullRange(merged))
    a.ranges.erase(diffVar);
  else
    a.ranges[diffVar] = merged;
  return true;
}

bool verdictLess(const VerificationOutcome::Verdict& a,
                 const VerificationOutcome::Verdict& b) {
  std::set<std::string> vars;
  for (const auto& [v, r] : a.region.ranges) vars.insert(v);
  for (const auto& [v, r] : b.region.ranges) vars.insert(v);
  for (const auto& v : vars) {
    DomainSet::Range ra = a.region.rangeOf(v);
    DomainSet::Range rb = b.region.rangeOf(v);
    if (ra.lo != rb.lo) return ra.lo < rb.lo;
    if (ra.hi != rb.hi) {
      if (!ra.hi) return false;
      if (!rb.hi) return true;
      return *ra.hi < *rb.hi;
    }
  }
  return false;
}

void mergeAndSort(std::vector<VerificationOutcome::Verdict>& verdicts) {
  bool again = true;
  while (again) {
    again = false;
    for (size_t i = 0; i < verdicts.size() && !again; ++i)
      for (size_t j = i + 1; j < verdicts.size() && !again; ++j) {
        if (verdicts[i].status != verdicts[j].status) continue;
        if (tryMerge(verdicts[i].region, verdicts[j].region)) {
          verdicts.erase(verdicts.begin() + static_cast<long>(j));
          again = true;
        }
      }
  }
  std::sort(verdicts.begin(), verdicts.end(), verdictLess);
}

bool holds(Rel r) { return r == Rel::Lt || r == Rel::Eq; }

void dedupe(std::vector<std::string>& lines) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (auto& s : lines)
    if (seen.insert(s).second) out.push_back(std::move(s));
  lines = std::move(out);
}

}  // namespace

VerificationOutcome checkAssertion(const IntervalFn& inferred,
                                   const InternalAssertion& spec) {
  VerificationOutcome out;
  out.original = spec;
  std::vector<std::string> vars = spec.inputVars();
  DomainSet specDom = spec.sizePrecond;
  if (specDom.empty()) {
    out.diagnostics.push_back("precondition is unsatisfiable over sizes");
    return out;
  }

  ExprPtr specLo = spec.lower ? spec.lower : Expr::constant(0);
  ExprPtr specUp = spec.upper ? spec.upper : Expr::posInf();

  // Parts of the precondition domain where an inferred bound is not valid
  // stay undecided.
  std::vector<VerificationOutcome::Verdict> verdicts;
  DomainSet core = specDom;
  bool peeled = false;
  for (const BoundFn* bf : {&inferred.lower, &inferred.upper}) {
    for (const auto& [v, r] : bf->domain.ranges) {
      if (fullRange(r) || core.empty()) continue;
      DomainSet::Range cur = core.rangeOf(v);
      if (cur.lo < r.lo) {
        DomainSet strip = core;
        strip.restrict(v, {cur.lo, r.lo - 1});
        if (!strip.empty()) {
          verdicts.push_back({trimmed(strip), Status::Check});
          peeled = true;
        }
        core.restrict(v, {r.lo, std::nullopt});
      }
      cur = core.rangeOf(v);
      if (r.hi && (!cur.hi || *cur.hi > *r.hi)) {
        DomainSet strip = core;
        strip.restrict(v, {*r.hi + 1, cur.hi});
        if (!strip.empty()) {
          verdicts.push_back({trimmed(strip), Status::Check});
          peeled = true;
        }
        core.restrict(v, {Int(0), *r.hi});
      }
    }
  }
  if (peeled)
    out.diagnostics.push_back(
        "inferred bounds are not valid on part of the precondition domain");

  if (!core.empty()) {
    bool specUpInf = specUp->kind == ExprKind::PosInf;
    bool infUpInf = inferred.upper.expr->kind == ExprKind::PosInf;

    if (!specUpInf) {
      CondPart sane = compareCond(specLo, specUp, vars, core);
      for (const auto& [region, rel] : sane.parts)
        if (rel == Rel::Gt)
          out.diagnostics.push_back("inconsistent specification interval on " +
                                    domainConjuncts(region));
    }

    // one: specLo <= infLo; two: infUp <= specUp (non-strict conditions);
    // three: infUp < specLo; four: specUp < infLo (strict incorrectness).
    CondPart one = compareCond(specLo, inferred.lower.expr, vars, core);
    CondPart two = specUpInf ? constantCond(core, Rel::Lt)
                   : infUpInf ? constantCond(core, Rel::Gt)
                              : compareCond(inferred.upper.expr, specUp, vars,
                                            core);
    CondPart three = infUpInf
                         ? constantCond(core, Rel::Gt)
                         : compareCond(inferred.upper.expr, specLo, vars,
                                       core);
    CondPart four = specUpInf ? constantCond(core, Rel::Gt)
                              : compareCond(specUp, inferred.lower.expr, vars,
                                            core);

    struct Cell {
      DomainSet region;
      std::array<Rel, 4> rels;
    };
    std::vector<Cell> cells{
        {core, {Rel::Unknown, Rel::Unknown, Rel::Unknown, Rel::Unknown}}};
    const std::array<const CondPart*, 4> conds = {&one, &two, &three, &four};
    for (size_t ci = 0; ci < conds.size(); ++ci) {
      std::vector<Cell> next;
      for (const Cell& cell : cells)
        for (const auto& [region, rel] : conds[ci]->parts) {
          DomainSet inter = intersect(cell.region, region);
          if (inter.empty()) continue;
          Cell c = cell;
          c.region = std::move(inter);
          c.rels[ci] = rel;
          next.push_back(std::move(c));
        }
      cells = std::move(next);
    }

    for (const Cell& cell : cells) {
      bool checked = holds(cell.rels[0]) && holds(cell.rels[1]);
      bool incorrect = cell.rels[2] == Rel::Lt || cell.rels[3] == Rel::Lt;
      Status s = Status::Check;
      if (checked && incorrect)
        out.diagnostics.push_back(
            "inconsistent specification interval on " +
            domainConjuncts(cell.region));
      else if (checked)
        s = Status::Checked;
      else if (incorrect)
        s = Status::False;
      verdicts.push_back({trimmed(cell.region), s});
    }
  }

  mergeAndSort(verdicts);
  out.verdicts = std::move(verdicts);
  return out;
}

std::vector<XCAssertion> splitToAssertions(const VerificationOutcome& o,
                                           const PredicateSignature& sig,
                                           std::vector<std::string>* skipped) {
  std::vector<XCAssertion> out;
  for (const auto& verdict : o.verdicts) {
    InternalAssertion v = o.original;
    v.sizePrecond = verdict.region;
    v.status = verdict.status;
    try {
      out.push_back(fromInternal(v, sig));
    } catch (const AssertionError& e) {
      if (skipped)
        skipped->push_back("region " + domainConjuncts(verdict.region) +
                           " kept internal: " + e.what());
    }
  }
  return out;
}

namespace {

bool startsWith(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

std::string stripLeft(const std::string& s) {
  size_t i = s.find_first_not_of(" \t");
  return i == std::string::npos ? std::string() : s.substr(i);
}

std::string stripRight(const std::string& s) {
  size_t i = s.find_last_not_of(" \t\r");
  return i == std::string::npos ? std::string() : s.substr(0, i + 1);
}

int parenBalance(const std::string& s) {
  int b = 0;
  for (char c : s) {
    if (c == '(') ++b;
    if (c == ')') --b;
  }
  return b;
}

bool endsWithAny(const std::string& s,
                 const std::vector<std::string>& suffixes) {
  for (const auto& suf : suffixes)
    if (s.size() >= suf.size() &&
        s.compare(s.size() - suf.size(), suf.size(), suf) == 0)
      return true;
  return false;
}

}  // namespace

SpecFile parseSpecFile(const std::string& text) {
  SpecFile file;
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);

  static const std::vector<std::string> continuations = {":", "==>", "&&",
                                                         ","};
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string body = stripRight(stripLeft(lines[i]));
    if (body.empty() || startsWith(body, "//")) {
      file.entries.push_back({SpecEntry::Kind::Passthrough,
                              stripRight(lines[i]), static_cast<int>(i + 1),
                              std::nullopt, std::nullopt});
      continue;
    }
    int firstLine = static_cast<int>(i + 1);
    bool isPragma = startsWith(body, "#pragma");
    bool isInternal = startsWith(body, ":-");
    if (!isPragma && !isInternal)
      throw ParseError("specs line " + std::to_string(firstLine) +
                       ": expected a #pragma assertion, a ':-' assertion, "
                       "or a // comment");
    std::string joined = body;
    int balance = parenBalance(joined);
    auto needsMore = [&]() {
      if (balance > 0) return true;
      if (isPragma) return endsWithAny(stripRight(joined), continuations);
      return !endsWithAny(stripRight(joined), {"."});
    };
    while (needsMore() && i + 1 < lines.size()) {
      ++i;
      std::string more = stripRight(stripLeft(lines[i]));
      joined += " " + more;
      balance += parenBalance(more);
    }
    if (needsMore())
      throw ParseError("specs line " + std::to_string(firstLine) +
                       ": unterminated assertion");
    SpecEntry entry;
    entry.kind = isPragma ? SpecEntry::Kind::Pragma : SpecEntry::Kind::Internal;
    entry.text = joined;
    entry.line = firstLine;
    try {
      if (isPragma)
        entry.pragma = parsePragma(joined);
      else
        entry.internal = parseInternalLine(joined);
    } catch (const std::exception& e) {
      throw ParseError("specs line " + std::to_string(firstLine) + ": " +
                       e.what());
    }
    file.entries.push_back(std::move(entry));
  }
  return file;
}

namespace {

const std::array<std::string, 2> kResources = {"energy", "steps"};

struct Pending {
  size_t entryIndex = 0;
  std::string text;
  bool internalForm = false;
  bool ok = false;
  std::string error;
  InternalAssertion internal;
  const PredicateSignature* sig = nullptr;
};

IntervalFn renameInterval(const IntervalFn& f,
                          const std::vector<std::string>& from,
                          const std::vector<std::string>& to) {
  std::map<std::string, ExprPtr> m;
  std::map<std::string, std::string> names;
  for (size_t i = 0; i < from.size() && i < to.size(); ++i) {
    m[from[i]] = Expr::variable(to[i]);
    names[from[i]] = to[i];
  }
  auto renameBound = [&](const BoundFn& b) {
    DomainSet dom;
    for (const auto& [v, r] : b.domain.ranges) {
      auto it = names.find(v);
      dom.ranges.emplace(it == names.end() ? v : it->second, r);
    }
    return makeBoundFn(normalize(substitute(b.expr, m)), to, dom);
  };
  return {renameBound(f.lower), renameBound(f.upper)};
}

// Exact confirmation of the checked conditions at one integer point;
// nullopt when an enclosure is too wide to decide.
std::optional<bool> checkedAt(const IntervalFn& inferred, const ExprPtr& specLo,
                              const ExprPtr& specUp,
                              const std::map<std::string, Int>& pt) {
  EvalEnv env;
  for (const auto& [v, k] : pt) env.vars[v] = ExtRat(k);
  try {
    Enclosure sl = eval(*specLo, env);
    Enclosure il = eval(*inferred.lower.expr, env);
    Enclosure iu = eval(*inferred.upper.expr, env);
    Enclosure su = eval(*specUp, env);
    if (sl.hi <= il.lo && iu.hi <= su.lo) return true;
    if (sl.lo > il.hi || iu.lo > su.hi) return false;
    return std::nullopt;
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

void spotCheck(SpecResult& sr, long maxSample) {
  const InternalAssertion& spec = sr.outcome.original;
  ExprPtr specLo = spec.lower ? spec.lower : Expr::constant(0);
  ExprPtr specUp = spec.upper ? spec.upper : Expr::posInf();
  for (auto& verdict : sr.outcome.verdicts) {
    if (verdict.status == Status::Check) continue;
    std::vector<std::string> constrained;
    for (const auto& [v, r] : verdict.region.ranges)
      if (!fullRange(r)) constrained.push_back(v);
    if (constrained.size() > 1) {
      sr.diagnostics.push_back("spot check skipped on multi-variable region " +
                               domainConjuncts(verdict.region));
      continue;
    }
    std::string var = constrained.empty()
                          ? (spec.inputVars().empty() ? std::string()
                                                      : spec.inputVars()[0])
                          : constrained[0];
    std::map<std::string, Int> pt;
    for (const auto& v : spec.inputVars()) pt[v] = 0;
    DomainSet::Range range =
        var.empty() ? DomainSet::Range{Int(0), Int(0)}
                    : verdict.region.rangeOf(var);
    bool demoted = false;
    long count = 0;
    for (Int k = range.lo; count < maxSample && (!range.hi || k <= *range.hi);
         k += 1, ++count) {
      if (!var.empty()) pt[var] = k;
      std::optional<bool> ok = checkedAt(sr.inferred, specLo, specUp, pt);
      bool breach;
      if (!ok.has_value())
        breach = true;
      else
        breach = verdict.status == Status::Checked ? !*ok : *ok;
      if (breach) {
        sr.diagnostics.push_back(
            "spot check demoted " + statusName(verdict.status) + " region " +
            domainConjuncts(verdict.region) + " at " + var + " = " +
            k.get_str());
        verdict.status = Status::Check;
        demoted = true;
        break;
      }
    }
    if (demoted) continue;
  }
}

}  // namespace

Report verifyProgram(const Program& p, const SignatureTable& sigs,
                     const EnergyModel& model, const SpecFile& specs,
                     long maxSample) {
  Report rep;
  rep.file = specs;

  std::vector<Pending> pendings;
  for (size_t i = 0; i < specs.entries.size(); ++i) {
    const SpecEntry& entry = specs.entries[i];
    if (entry.kind == SpecEntry::Kind::Passthrough) continue;
    Pending pd;
    pd.entryIndex = i;
    pd.text = entry.text;
    pd.internalForm = entry.kind == SpecEntry::Kind::Internal;
    try {
      if (entry.kind == SpecEntry::Kind::Pragma) {
        const XCAssertion& x = *entry.pragma;
        PredId pid{x.funcName, x.scopeArgs.size() + 1};
        pd.sig = sigs.find(pid);
        if (!pd.sig)
          throw AssertionError("no signature declared for " +
                               predIdToString(pid));
        pd.internal = toInternal(x, *pd.sig);
      } else {
        pd.internal = *entry.internal;
        pd.sig = sigs.find(pd.internal.pred);
        if (!pd.sig)
          throw AssertionError("no signature declared for " +
                               predIdToString(pd.internal.pred));
        resolveAgainstSignature(pd.internal, *pd.sig);
      }
      pd.ok = true;
    } catch (const std::exception& e) {
      pd.error = e.what();
    }
    pendings.push_back(std::move(pd));
  }

  TrustTable trusts;
  for (const Pending& pd : pendings) {
    if (!pd.ok || pd.internal.status != Status::Trust) continue;
    std::vector<std::string> patInputs = pd.internal.inputVars();
    std::vector<std::string> sigInputs;
    for (size_t pos : pd.sig->inputPositions())
      sigInputs.push_back(pd.sig->args[pos].name);
    IntervalFn f = renameInterval(
        IntervalFn{
            makeBoundFn(pd.internal.lower ? pd.internal.lower
                                          : Expr::constant(0),
                        patInputs, pd.internal.sizePrecond),
            makeBoundFn(pd.internal.upper ? pd.internal.upper
                                          : Expr::posInf(),
                        patInputs, pd.internal.sizePrecond)},
        patInputs, sigInputs);
    auto& slot = trusts[pd.internal.pred];
    if (slot.count(pd.internal.resourceName)) {
      rep.diagnostics.push_back("duplicate trust assertion for " +
                                predIdToString(pd.internal.pred) +
                                " ignored (first kept)");
      continue;
    }
    slot.emplace(pd.internal.resourceName, std::move(f));
  }

  for (const Diagnostic& d : validate(p, model)) {
    if (d.severity == Diagnostic::Severity::Error) {
      bool covered = false;
      for (const auto& [pid, _] : trusts)
        if (d.message.find(predIdToString(pid)) != std::string::npos)
          covered = true;
      if (covered) continue;
    }
    rep.diagnostics.push_back(diagnosticToString(d));
  }

  AnalysisResult ar = analyzeProgram(p, sigs, model, trusts);
  for (const auto& note : ar.notes) rep.diagnostics.push_back(note);

  // Trust intervals replace whatever the analysis inferred.
  for (const auto& [pid, resmap] : trusts) {
    PredAnalysis& pa = ar.preds[pid];
    if (pa.inputVars.empty()) {
      if (const PredicateSignature* sig = sigs.find(pid)) {
        for (const auto& a : sig->args)
          if (a.mode == ArgMode::In) pa.inputVars.push_back(a.name);
        pa.outPos = sig->outputPosition();
      }
    }
    for (const auto& res : kResources)
      if (!pa.cost.count(res))
        pa.cost[res] = IntervalFn{makeBoundFn(Expr::constant(0), pa.inputVars),
                                  makeBoundFn(Expr::posInf(), pa.inputVars)};
    for (const auto& [res, f] : resmap) pa.cost[res] = f;
    pa.notes.push_back("bounds taken from a trust assertion");
  }

  for (const Pending& pd : pendings) {
    if (pd.ok && pd.internal.status == Status::Trust) continue;
    SpecResult sr;
    sr.entryIndex = pd.entryIndex;
    sr.originalText = pd.text;
    if (!pd.ok) {
      sr.diagnostics.push_back(pd.error);
      sr.outcome.verdicts.push_back({DomainSet{}, Status::Check});
      sr.resultLines.push_back(pd.text);
      rep.checkCount += 1;
      rep.specs.push_back(std::move(sr));
      continue;
    }
    sr.pred = pd.internal.pred;
    sr.resource = pd.internal.resourceName;
    sr.declaredStatus = pd.internal.status;

    const PredAnalysis* pa = ar.find(sr.pred);
    if (!pa || !pa->cost.count(sr.resource)) {
      sr.diagnostics.push_back("no inferred " + sr.resource + " bound for " +
                               predIdToString(sr.pred));
      sr.outcome.original = pd.internal;
      sr.outcome.verdicts.push_back(
          {trimmed(pd.internal.sizePrecond), Status::Check});
      sr.resultLines.push_back(pd.text);
      rep.checkCount += 1;
      rep.specs.push_back(std::move(sr));
      continue;
    }
    std::vector<std::string> sigInputs;
    for (size_t pos : pd.sig->inputPositions())
      sigInputs.push_back(pd.sig->args[pos].name);
    sr.inferred =
        renameInterval(pa->cost.at(sr.resource), sigInputs,
                       pd.internal.inputVars());
    sr.resolved = true;
    for (const auto& note : pa->notes) sr.diagnostics.push_back(note);

    sr.outcome = checkAssertion(sr.inferred, pd.internal);
    for (const auto& d : sr.outcome.diagnostics) sr.diagnostics.push_back(d);
    spotCheck(sr, maxSample);

    bool allChecked = !sr.outcome.verdicts.empty();
    bool allFalse = !sr.outcome.verdicts.empty();
    for (const auto& verdict : sr.outcome.verdicts) {
      allChecked = allChecked && verdict.status == Status::Checked;
      allFalse = allFalse && verdict.status == Status::False;
    }
    if ((sr.declaredStatus == Status::True ||
         sr.declaredStatus == Status::Checked) &&
        !allChecked)
      sr.diagnostics.push_back("declared " + statusName(sr.declaredStatus) +
                               " but verification does not confirm it on the "
                               "whole domain");
    if (sr.declaredStatus == Status::False && !allFalse)
      sr.diagnostics.push_back(
          "declared false but verification does not confirm it on the whole "
          "domain");

    // Rendered result assertions.
    for (const auto& verdict : sr.outcome.verdicts) {
      InternalAssertion v = pd.internal;
      v.sizePrecond = verdict.region;
      v.status = verdict.status;
      std::string line;
      if (pd.internalForm) {
        line = printInternalLine(v);
      } else {
        try {
          line = printPragma(fromInternal(v, *pd.sig));
        } catch (const AssertionError& e) {
          sr.diagnostics.push_back(std::string("region kept internal: ") +
                                   e.what());
          line = printInternalLine(v);
        }
      }
      sr.resultLines.push_back(std::move(line));
      switch (verdict.status) {
        case Status::Checked: rep.checkedCount += 1; break;
        case Status::False: rep.falseCount += 1; break;
        default: rep.checkCount += 1; break;
      }
    }

    // Inferred interval as a `true` assertion, when expressible.
    bool finite = !containsInf(*sr.inferred.lower.expr) &&
                  !containsInf(*sr.inferred.upper.expr);
    bool fullDomains = trimmed(sr.inferred.lower.domain).ranges.empty() &&
                       trimmed(sr.inferred.upper.domain).ranges.empty();
    if (finite && fullDomains) {
      InternalAssertion t = pd.internal;
      t.status = Status::True;
      t.sizePrecond = DomainSet{};
      t.lower = sr.inferred.lower.expr;
      t.upper = sr.inferred.upper.expr;
      if (pd.internalForm) {
        sr.inferredTrueLine = printInternalLine(t);
      } else {
        try {
          sr.inferredTrueLine = printPragma(fromInternal(t, *pd.sig));
        } catch (const AssertionError&) {
          sr.inferredTrueLine = printInternalLine(t);
        }
      }
    }
    dedupe(sr.diagnostics);
    rep.specs.push_back(std::move(sr));
  }
  dedupe(rep.diagnostics);

  rep.allVerified = true;
  for (const SpecResult& sr : rep.specs) {
    bool allChecked = sr.resolved && !sr.outcome.verdicts.empty();
    for (const auto& verdict : sr.outcome.verdicts)
      allChecked = allChecked && verdict.status == Status::Checked;
    rep.allVerified = rep.allVerified && allChecked;
  }
  return rep;
}

std::string renderAnnotatedSpec(const Report& r) {
  std::ostringstream os;
  std::map<size_t, const SpecResult*> byEntry;
  for (const SpecResult& sr : r.specs) byEntry[sr.entryIndex] = &sr;
  for (size_t i = 0; i < r.file.entries.size(); ++i) {
    const SpecEntry& entry = r.file.entries[i];
    if (entry.kind == SpecEntry::Kind::Passthrough) {
      os << entry.text << "\n";
      continue;
    }
    auto it = byEntry.find(i);
    if (it == byEntry.end()) {
      os << entry.text << "\n";  // trust assertions pass through
      continue;
    }
    const SpecResult& sr = *it->second;
    if (sr.inferredTrueLine) os << *sr.inferredTrueLine << "\n";
    for (const std::string& line : sr.resultLines) os << line << "\n";
    for (const auto& verdict : sr.outcome.verdicts)
      if (verdict.status == Status::Check)
        os << "// warning: could not verify on "
           << domainConjuncts(verdict.region) << "\n";
    for (const std::string& d : sr.diagnostics)
      os << "// warning: " << d << "\n";
  }
  return os.str();
}

std::string renderSummaryJson(const Report& r) {
  nlohmann::ordered_json j;
  j["all_verified"] = r.allVerified;
  j["counts"] = {{"checked", r.checkedCount},
                 {"false", r.falseCount},
                 {"check", r.checkCount}};
  j["specs"] = nlohmann::ordered_json::array();
  for (const SpecResult& sr : r.specs) {
    nlohmann::ordered_json s;
    s["assertion"] = sr.originalText;
    s["predicate"] = predIdToString(sr.pred);
    s["resource"] = sr.resource;
    s["declared_status"] = statusName(sr.declaredStatus);
    if (sr.resolved) {
      s["inferred"] = {{"lower", render(sr.inferred.lower.expr)},
                       {"upper", render(sr.inferred.upper.expr)}};
    } else {
      s["inferred"] = nullptr;
    }
    s["verdicts"] = nlohmann::ordered_json::array();
    for (const auto& verdict : sr.outcome.verdicts)
      s["verdicts"].push_back({{"status", statusName(verdict.status)},
                               {"domain", domainToString(verdict.region)}});
    s["diagnostics"] = sr.diagnostics;
    j["specs"].push_back(std::move(s));
  }
  j["diagnostics"] = r.diagnostics;
  return j.dump(2) + "\n";
}

}  // namespace enverify
