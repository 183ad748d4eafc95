#include "enverify/compare.hpp"

#include <algorithm>
#include <map>

#include "enverify/poly.hpp"

namespace enverify {

namespace {
unsigned gTaylorSeedOrder = 8;
}  // namespace

unsigned taylorSeedOrder() { return gTaylorSeedOrder; }

void setTaylorSeedOrder(unsigned order) {
  gTaylorSeedOrder = order < 1 ? 1 : order;
}

namespace {

const Rat& bisectWidthTarget() {
  static const Rat w = Rat(1) / (Rat(Int(1) << 32));
  return w;
}

struct IsolRoot {
  Enclosure enc;
  bool exact = false;
  unsigned multiplicity = 1;
  UPoly defining;  // sign flips across enc; empty for exact roots

  Rat lo() const { return enc.lo.value(); }
  Rat hi() const { return enc.hi.value(); }
};

// One bisection step against the defining polynomial; may land exactly on
// the root.
void refineOnce(IsolRoot& r) {
  if (r.exact) return;
  Rat a = r.lo();
  Rat b = r.hi();
  Rat m = (a + b) / 2;
  Rat fm = upEval(r.defining, m);
  if (sgn(fm) == 0) {
    r.enc = Enclosure::point(ExtRat(m));
    r.exact = true;
    return;
  }
  Rat fa = upEval(r.defining, a);
  if (sgn(fa) * sgn(fm) < 0)
    r.enc = Enclosure(ExtRat(a), ExtRat(m));
  else
    r.enc = Enclosure(ExtRat(m), ExtRat(b));
}

IsolRoot exactIsolRoot(Rat v, unsigned mult) {
  IsolRoot r;
  r.enc = Enclosure::point(ExtRat(std::move(v)));
  r.exact = true;
  r.multiplicity = mult;
  return r;
}

// Bisect a bracket [a, b] with known opposite endpoint signs down to the
// width target, detecting exact rational hits on the way.
IsolRoot upBisect(const UPoly& s, Rat a, Rat b, int signA) {
  while (b - a >= bisectWidthTarget()) {
    Rat m = (a + b) / 2;
    Rat fm = upEval(s, m);
    if (sgn(fm) == 0) return exactIsolRoot(std::move(m), 1);
    if (sgn(fm) == signA)
      a = std::move(m);
    else
      b = std::move(m);
  }
  // At most one integer fits in the final bracket; exact substitution there
  // upgrades an enclosed integer root to an exact one.
  Rat k(ceilRat(a));
  if (k <= b && sgn(upEval(s, k)) == 0) return exactIsolRoot(std::move(k), 1);
  IsolRoot r;
  r.enc = Enclosure(ExtRat(std::move(a)), ExtRat(std::move(b)));
  r.defining = s;
  return r;
}

Enclosure upEvalEnclosure(const UPoly& p, const Enclosure& x) {
  Enclosure acc = Enclosure::point(ExtRat(Rat(0)));
  for (size_t i = p.size(); i > 0; --i)
    acc = acc * x + Enclosure::point(ExtRat(p[i - 1]));
  return acc;
}

std::vector<IsolRoot> isolateSquareFree(const UPoly& sIn);

// Sign of s at an isolated root of another polynomial, refining the root
// enclosure until the sign is determined. The root is never a root of s
// (coprime by construction), so this terminates.
int signAtIsolated(const UPoly& s, IsolRoot& at) {
  for (int iter = 0; iter < 512; ++iter) {
    if (at.exact) {
      return sgn(upEval(s, at.lo()));
    }
    auto sg = upEvalEnclosure(s, at.enc).sign();
    if (sg && *sg != 0) return *sg;
    refineOnce(at);
  }
  throw EvalError("sign refinement at critical point did not converge");
}

// Complete real-root isolation of a square-free polynomial via the
// derivative chain: the extrema split the line into monotone pieces, each
// holding at most one root, bracketed and bisected exactly.
std::vector<IsolRoot> isolateSquareFree(const UPoly& sIn) {
  UPoly s = upTrim(sIn);
  int d = upDegree(s);
  std::vector<IsolRoot> out;
  if (d <= 0) return out;
  if (d == 1) {
    out.push_back(exactIsolRoot(Rat(-s[0] / s[1]), 1));
    return out;
  }
  if (d == 2) {
    Rat a = s[2], b = s[1], c = s[0];
    Rat disc = b * b - 4 * a * c;
    int sd = sgn(disc);
    if (sd < 0) return out;
    if (sd == 0) {
      out.push_back(exactIsolRoot(Rat(-b / (2 * a)), 1));
      return out;
    }
    if (auto sq = exactRootN(disc, 2)) {
      Rat r1 = (-b - *sq) / (2 * a);
      Rat r2 = (-b + *sq) / (2 * a);
      if (r1 > r2) std::swap(r1, r2);
      out.push_back(exactIsolRoot(std::move(r1), 1));
      out.push_back(exactIsolRoot(std::move(r2), 1));
      return out;
    }
    // Irrational pair straddles the vertex; each side brackets exactly one.
    Enclosure sq = encloseSqrt(disc);
    Rat vertex = -b / (2 * a);
    Rat halfSpan = sq.hi.value() / abs(2 * a);
    Rat left = vertex - 2 * halfSpan;
    Rat right = vertex + 2 * halfSpan;
    out.push_back(upBisect(s, left, vertex, sgn(upEval(s, left))));
    out.push_back(upBisect(s, vertex, right, sgn(upEval(s, vertex))));
    return out;
  }

  UPoly ds = upSquareFreePart(upDerivative(s));
  std::vector<IsolRoot> crits = isolateSquareFree(ds);

  Rat m = upCauchyBound(s);
  for (const IsolRoot& c : crits) {
    Rat mag = std::max(abs(c.lo()), abs(c.hi()));
    if (mag >= m) m = mag + 1;
  }
  m += 1;

  // Refine extremum enclosures until pairwise disjoint and s-sign-stable,
  // then read off monotone brackets.
  for (size_t i = 0; i + 1 < crits.size(); ++i) {
    int guard = 0;
    while (crits[i].hi() >= crits[i + 1].lo() && guard++ < 512) {
      refineOnce(crits[i]);
      refineOnce(crits[i + 1]);
    }
  }

  std::vector<Rat> points;     // bracket endpoints, increasing
  std::vector<int> signs;      // sign of s at each point
  std::vector<Rat> exactHits;  // bracket endpoints that are roots

  auto record = [&](Rat x) {
    Rat v = upEval(s, x);
    if (sgn(v) == 0) {
      exactHits.push_back(x);
      points.push_back(std::move(x));
      signs.push_back(0);
    } else {
      points.push_back(std::move(x));
      signs.push_back(sgn(v));
    }
  };

  record(Rat(-m));
  for (IsolRoot& c : crits) {
    // The extremum itself is never a root of s (s is square-free), so the
    // refined enclosure excludes roots of s; both endpoints work as
    // bracket walls once s's sign over the enclosure is determined.
    signAtIsolated(s, c);
    record(c.lo());
    if (!c.exact) record(c.hi());
  }
  record(Rat(m));

  for (const Rat& x : exactHits) out.push_back(exactIsolRoot(x, 1));
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    if (signs[i] == 0 || signs[i + 1] == 0) continue;
    if (signs[i] * signs[i + 1] < 0)
      out.push_back(upBisect(s, points[i], points[i + 1], signs[i]));
  }
  std::sort(out.begin(), out.end(),
            [](const IsolRoot& a, const IsolRoot& b) { return a.lo() < b.lo(); });
  return out;
}

// Square-free decomposition (Yun): p = prod f_i^i with the f_i square-free
// and pairwise coprime, so every root of f_i has exact multiplicity i.
std::vector<std::pair<UPoly, unsigned>> yunDecompose(const UPoly& p) {
  std::vector<std::pair<UPoly, unsigned>> out;
  UPoly dp = upDerivative(p);
  UPoly g = upGcd(p, dp);
  if (upDegree(g) <= 0) {
    out.emplace_back(upTrim(p), 1);
    return out;
  }
  UPoly w = upDivRem(p, g).first;
  UPoly z = upSub(upDivRem(dp, g).first, upDerivative(w));
  unsigned i = 1;
  while (upDegree(w) > 0 && i <= 256) {
    UPoly h = upGcd(w, z);
    if (upDegree(h) > 0) out.emplace_back(h, i);
    w = upDivRem(w, h).first;
    z = upSub(upDivRem(z, h).first, upDerivative(w));
    ++i;
  }
  return out;
}

std::vector<IsolRoot> upAllRoots(const UPoly& p) {
  std::vector<IsolRoot> all;
  for (auto& [factor, mult] : yunDecompose(p)) {
    for (IsolRoot& r : isolateSquareFree(factor)) {
      r.multiplicity = mult;
      all.push_back(std::move(r));
    }
  }
  // Roots of distinct square-free factors are distinct reals; refine until
  // the enclosures order cleanly.
  for (int round = 0; round < 512; ++round) {
    std::sort(all.begin(), all.end(), [](const IsolRoot& a, const IsolRoot& b) {
      return a.lo() < b.lo();
    });
    bool overlap = false;
    for (size_t i = 0; i + 1 < all.size(); ++i) {
      if (all[i].hi() >= all[i + 1].lo() &&
          !(all[i].exact && all[i + 1].exact)) {
        refineOnce(all[i]);
        refineOnce(all[i + 1]);
        overlap = true;
      }
    }
    if (!overlap) break;
  }
  return all;
}

Root toPublicRoot(const IsolRoot& r) {
  Root out;
  out.value = r.enc;
  out.exact = r.exact;
  out.multiplicity = r.multiplicity;
  return out;
}

std::string soleVar(const BoundFn& f) {
  auto fv = freeVars(*f.expr);
  if (fv.size() == 1) return *fv.begin();
  if (!f.vars.empty()) return f.vars.front();
  return "n";
}

std::optional<int> signAtInt(const BoundFn& f, const std::string& var,
                             const Int& k) {
  try {
    EvalEnv env;
    env.vars[var] = ExtRat(Rat(k));
    return eval(*f.expr, env).sign();
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

std::optional<Enclosure> evalAtRat(const BoundFn& f, const std::string& var,
                                   const Rat& x) {
  try {
    EvalEnv env;
    env.vars[var] = ExtRat(x);
    return eval(*f.expr, env);
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

// Rational bisection between integers with determined opposite signs, for
// scan-routed functions. Signs come from directed enclosures; an
// undetermined midpoint stops refinement with the bracket so far.
Root bisectGeneral(const BoundFn& f, const std::string& var, Rat a, Rat b,
                   int signA) {
  for (int iter = 0; iter < 128 && b - a >= bisectWidthTarget(); ++iter) {
    Rat m = (a + b) / 2;
    auto fm = evalAtRat(f, var, m);
    if (!fm) break;
    auto sg = fm->sign();
    if (!sg) break;
    if (*sg == 0) {
      Root r;
      r.value = Enclosure::point(ExtRat(std::move(m)));
      r.exact = true;
      return r;
    }
    if (*sg == signA)
      a = std::move(m);
    else
      b = std::move(m);
  }
  Root r;
  r.value = Enclosure(ExtRat(std::move(a)), ExtRat(std::move(b)));
  return r;
}

struct ScanParams {
  static constexpr long kFullScanCap = 4096;
  static constexpr int kDoublingRounds = 12;
};

// Integer scan with series-seeded horizon and a doubling dominance guard
// for the tail. Exact at every probed integer.
RootsResult scanRoots(const BoundFn& f, const std::string& var, const Int& lo,
                      const std::optional<Int>& hi) {
  RootsResult rr;
  rr.kind = RootsResult::Kind::Roots;
  rr.note = "integer scan";

  Int horizon = lo + 64;
  try {
    ExprPtr seeded = taylorExpand(f.expr, taylorSeedOrder());
    auto up = polyFromExpr(seeded).univariateIn(var);
    if (up && upDegree(*up) >= 1) {
      Int bound = ceilRat(upCauchyBound(*up)) + 4;
      if (bound > horizon) horizon = bound;
    }
  } catch (const std::exception&) {
  }
  if (hi && *hi < horizon) horizon = *hi;
  if (horizon - lo > ScanParams::kFullScanCap)
    horizon = lo + ScanParams::kFullScanCap;

  std::optional<Int> prevAt;
  int prevSign = 0;
  auto probe = [&](const Int& k) -> std::optional<int> {
    auto s = signAtInt(f, var, k);
    if (!s) {
      Root marker;
      marker.value = Enclosure::point(ExtRat(Rat(k)));
      marker.exact = false;
      rr.roots.push_back(std::move(marker));
      return std::nullopt;
    }
    if (*s == 0) {
      Root z;
      z.value = Enclosure::point(ExtRat(Rat(k)));
      z.exact = true;
      rr.roots.push_back(std::move(z));
    } else if (prevSign != 0 && *s != prevSign && prevAt && k - *prevAt == 1) {
      rr.roots.push_back(
          bisectGeneral(f, var, Rat(*prevAt), Rat(k), prevSign));
    }
    if (*s != 0) {
      prevAt = k;
      prevSign = *s;
    } else {
      prevAt = k;
      prevSign = 0;
    }
    return s;
  };

  for (Int k = lo; k <= horizon; ++k) probe(k);

  if (hi && *hi <= horizon) return rr;

  // Tail: accept only when sign holds at 2x and 4x; otherwise hunt the
  // change down and extend.
  Int s = horizon;
  if (prevSign == 0 || !prevAt || *prevAt != s) {
    rr.completeUpTo = s;
    rr.note += "; tail sign not determined at horizon";
    return rr;
  }
  int tailSign = prevSign;
  for (int round = 0; round < ScanParams::kDoublingRounds; ++round) {
    Int s2 = s <= 0 ? Int(s + 64) : Int(s * 2);
    Int s4 = s <= 0 ? Int(s + 128) : Int(s * 4);
    if (hi && s2 > *hi) s2 = *hi;
    if (hi && s4 > *hi) s4 = *hi;
    auto sig2 = signAtInt(f, var, s2);
    auto sig4 = signAtInt(f, var, s4);
    if (!sig2 || !sig4) {
      rr.completeUpTo = s;
      rr.note += "; tail sign undetermined";
      return rr;
    }
    if (*sig2 == tailSign && *sig4 == tailSign) {
      rr.note += "; tail accepted by dominance probes";
      return rr;
    }
    // A change hides in (s, s4]; binary-search the first flip pair.
    Int a = s;
    Int b = (*sig2 != tailSign) ? s2 : s4;
    int signB = (*sig2 != tailSign) ? *sig2 : *sig4;
    while (b - a > 1) {
      Int mid = (a + b) / 2;
      auto sm = signAtInt(f, var, mid);
      if (!sm) {
        rr.completeUpTo = a;
        rr.note += "; tail sign undetermined";
        return rr;
      }
      if (*sm == 0) {
        Root z;
        z.value = Enclosure::point(ExtRat(Rat(mid)));
        z.exact = true;
        rr.roots.push_back(std::move(z));
        b = mid;
        break;
      }
      if (*sm == tailSign)
        a = mid;
      else
        b = mid;
    }
    if (b - a == 1) {
      auto sa = signAtInt(f, var, a);
      auto sb = signAtInt(f, var, b);
      if (sa && sb && *sa != 0 && *sb != 0 && *sa != *sb)
        rr.roots.push_back(bisectGeneral(f, var, Rat(a), Rat(b), *sa));
      else if (sb && *sb == 0) {
        Root z;
        z.value = Enclosure::point(ExtRat(Rat(b)));
        z.exact = true;
        rr.roots.push_back(std::move(z));
      }
    }
    s = b;
    auto ns = signAtInt(f, var, s);
    if (!ns || *ns == 0) {
      rr.completeUpTo = s;
      rr.note += "; tail sign undetermined past flip";
      return rr;
    }
    tailSign = *ns;
    if (hi && s >= *hi) return rr;
  }
  rr.completeUpTo = s;
  rr.note += "; tail not stabilized, unknown beyond";
  return rr;
}

}  // namespace

std::string relName(Rel r) {
  switch (r) {
    case Rel::Lt:
      return "lt";
    case Rel::Eq:
      return "eq";
    case Rel::Gt:
      return "gt";
    case Rel::Unknown:
      return "unknown";
  }
  return "unknown";
}

RootsResult findRoots(const BoundFn& f) {
  RootsResult rr;
  auto fv = freeVars(*f.expr);
  if (fv.size() > 1) {
    rr.kind = RootsResult::Kind::Unsupported;
    rr.note = "not univariate";
    return rr;
  }
  ExprPtr norm = normalize(f.expr);
  if (fv.empty()) {
    Poly p = polyFromExpr(norm);
    if (p.isConstant()) {
      if (sgn(p.constantValue()) == 0) {
        rr.kind = RootsResult::Kind::EverywhereZero;
      } else {
        rr.kind = RootsResult::Kind::Roots;
      }
      return rr;
    }
  }
  std::string var = fv.empty() ? soleVar(f) : *fv.begin();
  Classification cls = classify(norm);
  DomainSet::Range range = f.domain.rangeOf(var);

  switch (cls.cls) {
    case FunctionClass::Constant:
    case FunctionClass::Polynomial: {
      auto up = polyFromExpr(norm).univariateIn(var);
      if (!up) {
        rr.kind = RootsResult::Kind::Unsupported;
        rr.note = "polynomial extraction failed";
        return rr;
      }
      if (upDegree(*up) < 0) {
        rr.kind = RootsResult::Kind::EverywhereZero;
        return rr;
      }
      if (upDegree(*up) == 0) {
        rr.kind = RootsResult::Kind::Roots;
        return rr;
      }
      rr.kind = RootsResult::Kind::Roots;
      rr.note = "exact isolation";
      ExtRat domLo(Rat(range.lo));
      for (const IsolRoot& r : upAllRoots(*up)) {
        Root pub = toPublicRoot(r);
        if (pub.value.hi < domLo) continue;
        if (range.hi && pub.value.lo > ExtRat(Rat(*range.hi))) continue;
        rr.roots.push_back(std::move(pub));
      }
      return rr;
    }
    case FunctionClass::Exponential:
    case FunctionClass::Logarithmic:
    case FunctionClass::Mixed: {
      BoundFn nf = f;
      nf.expr = norm;
      return scanRoots(nf, var, range.lo, range.hi);
    }
    case FunctionClass::Unsupported:
      rr.kind = RootsResult::Kind::Unsupported;
      rr.note = "unsupported function class";
      return rr;
  }
  return rr;
}

SafeAdjustResult safeAdjust(const BoundFn& f, const Root& root,
                            SafeSide side) {
  SafeAdjustResult res;
  std::string var = soleVar(f);
  DomainSet::Range range = f.domain.rangeOf(var);

  Int z0 = floorRat(root.value.lo.value());
  Int z1 = ceilRat(root.value.hi.value());
  if (z0 < range.lo) z0 = range.lo;
  if (range.hi && z1 > *range.hi) z1 = *range.hi;
  if (z1 < z0) z1 = z0;

  // Exact zeros anywhere in the zone win outright.
  for (Int z = z0; z <= z1 && z - z0 <= 64; ++z) {
    auto s = signAtInt(f, var, z);
    if (s && *s == 0) {
      res.kind = SafeAdjustResult::Kind::ExactBoundary;
      res.boundary = z;
      return res;
    }
  }

  // Expand outward until both flanks have determined signs.
  int guard = 0;
  std::optional<int> ls, rs;
  while (!(ls = signAtInt(f, var, z0)) || *ls == 0) {
    if (ls && *ls == 0) {
      res.kind = SafeAdjustResult::Kind::ExactBoundary;
      res.boundary = z0;
      return res;
    }
    --z0;
    if (z0 < range.lo || ++guard > 128) {
      res.kind = SafeAdjustResult::Kind::DomainExhausted;
      return res;
    }
  }
  guard = 0;
  while (!(rs = signAtInt(f, var, z1)) || *rs == 0) {
    if (rs && *rs == 0) {
      res.kind = SafeAdjustResult::Kind::ExactBoundary;
      res.boundary = z1;
      return res;
    }
    ++z1;
    if ((range.hi && z1 > *range.hi) || ++guard > 128) {
      res.kind = SafeAdjustResult::Kind::DomainExhausted;
      return res;
    }
  }

  if (*ls == *rs) {
    res.kind = SafeAdjustResult::Kind::NoTransition;
    return res;
  }

  res.kind = SafeAdjustResult::Kind::Cut;
  res.leftSign = *ls;
  res.rightSign = *rs;
  // Adjacent flanks pin the cut; an ambiguous gap goes to whichever side
  // is safe to grow.
  if (z1 - z0 == 1) {
    res.boundary = z0;
  } else if (side == SafeSide::ShrinkLeft) {
    res.boundary = z0;
  } else {
    res.boundary = z1 - 1;
  }
  return res;
}

namespace {

struct PartitionBuilder {
  const BoundFn& f;
  std::string var;
  std::vector<SignRegion> regions;

  std::optional<Rel> sampleRel(const Int& k) {
    auto s = signAtInt(f, var, k);
    if (!s) return std::nullopt;
    if (*s < 0) return Rel::Lt;
    if (*s > 0) return Rel::Gt;
    return Rel::Eq;
  }

  void emit(Int a, std::optional<Int> b, Rel r) {
    if (b && *b < a) return;
    regions.push_back(SignRegion{std::move(a), std::move(b), r});
  }

  // Labels [a, b] (b may be open) where the root set promises no sign
  // change strictly inside. Splits defensively if the endpoints disagree
  // and isolates undeterminable integers; emission stays in ascending
  // order throughout.
  void labelRange(Int a, std::optional<Int> b) {
    // Peel undecidable right endpoints first so singles emit in order.
    std::vector<Int> rightUnknowns;
    if (b) {
      int peel = 0;
      while (a <= *b) {
        if (sampleRel(*b)) break;
        if (++peel > 64) {
          emit(a, *b, Rel::Unknown);
          for (size_t i = rightUnknowns.size(); i > 0; --i)
            emit(rightUnknowns[i - 1], rightUnknowns[i - 1], Rel::Unknown);
          return;
        }
        rightUnknowns.push_back(*b);
        b = *b - 1;
      }
    }
    labelCore(std::move(a), b);
    for (size_t i = rightUnknowns.size(); i > 0; --i)
      emit(rightUnknowns[i - 1], rightUnknowns[i - 1], Rel::Unknown);
  }

  void labelCore(Int a, std::optional<Int> b) {
    int isolations = 0;
    while (!b || a <= *b) {
      auto ra = sampleRel(a);
      if (!ra) {
        emit(a, a, Rel::Unknown);
        ++a;
        if (++isolations > 64) {
          if (!b)
            emit(a, std::nullopt, Rel::Unknown);
          else if (a <= *b)
            emit(a, *b, Rel::Unknown);
          return;
        }
        continue;
      }
      if (!b) {
        emit(a, std::nullopt, *ra);
        return;
      }
      auto rb = sampleRel(*b);
      if (rb && *rb == *ra) {
        emit(a, *b, *ra);
        return;
      }
      if (!rb) {
        emit(a, *b, Rel::Unknown);
        return;
      }
      // Defensive split: a sign change the root set did not announce.
      Int loP = a, hiP = *b;
      bool restart = false;
      while (hiP - loP > 1) {
        Int mid = (loP + hiP) / 2;
        auto rm = sampleRel(mid);
        if (!rm) {
          labelRange(a, mid - 1);
          emit(mid, mid, Rel::Unknown);
          a = mid + 1;
          restart = true;
          break;
        }
        if (*rm == *ra)
          loP = mid;
        else
          hiP = mid;
      }
      if (restart) continue;
      emit(a, loP, *ra);
      a = hiP;
    }
  }
};

}  // namespace

SignPartition signPartition(const BoundFn& f) {
  SignPartition part;
  auto fv = freeVars(*f.expr);
  part.var = fv.size() == 1 ? *fv.begin() : soleVar(f);

  DomainSet::Range range = f.domain.rangeOf(part.var);
  if (range.empty()) return part;
  Int lo = range.lo;
  std::optional<Int> hi = range.hi;

  PartitionBuilder pb{f, part.var, {}};

  if (fv.size() > 1) {
    pb.emit(lo, hi, Rel::Unknown);
    part.regions = std::move(pb.regions);
    return part;
  }
  if (fv.empty()) {
    // Variable-free: one determined sample labels everything.
    pb.labelRange(lo, hi);
    part.regions = std::move(pb.regions);
    return part;
  }

  RootsResult rr = findRoots(f);
  if (rr.kind == RootsResult::Kind::Unsupported) {
    pb.emit(lo, hi, Rel::Unknown);
  } else if (rr.kind == RootsResult::Kind::EverywhereZero) {
    pb.emit(lo, hi, Rel::Eq);
  } else {
    std::optional<Int> coverEnd = hi;
    if (rr.completeUpTo && (!hi || *rr.completeUpTo < *hi))
      coverEnd = rr.completeUpTo;

    Int pos = lo;
    for (const Root& r : rr.roots) {
      if (coverEnd && pos > *coverEnd) break;
      if (!r.value.finite()) continue;
      Int zLo = floorRat(r.value.lo.value());
      Int zHi = ceilRat(r.value.hi.value());
      if (zHi < pos) continue;
      if (coverEnd && zLo > *coverEnd) break;
      Int zA = zLo < pos ? pos : zLo;
      Int zB = (coverEnd && zHi > *coverEnd) ? *coverEnd : zHi;
      pb.labelRange(pos, zA - 1);
      if (zB - zA > 512) {
        pb.emit(zA, zB, Rel::Unknown);
      } else {
        for (Int z = zA; z <= zB; ++z) {
          auto rz = pb.sampleRel(z);
          pb.emit(z, z, rz ? *rz : Rel::Unknown);
        }
      }
      pos = zB + 1;
    }
    if (!coverEnd || pos <= *coverEnd) pb.labelRange(pos, coverEnd);
    if (coverEnd && (!hi || *coverEnd < *hi) && rr.completeUpTo) {
      Int afterCover = *coverEnd + 1;
      if (!hi || afterCover <= *hi) pb.emit(afterCover, hi, Rel::Unknown);
    }
  }

  // Merge adjacent regions with the same label.
  std::vector<SignRegion> merged;
  for (SignRegion& r : pb.regions) {
    if (!merged.empty() && merged.back().rel == r.rel && merged.back().hi &&
        *merged.back().hi + 1 == r.lo) {
      merged.back().hi = r.hi;
    } else {
      merged.push_back(std::move(r));
    }
  }
  part.regions = std::move(merged);
  return part;
}

SignPartition compareFns(const BoundFn& a, const BoundFn& b) {
  return signPartition(subtract(a, b));
}

Rel relAt(const SignPartition& p, const Int& x) {
  for (const SignRegion& r : p.regions) {
    if (x >= r.lo && (!r.hi || x <= *r.hi)) return r.rel;
  }
  return Rel::Unknown;
}

}  // namespace enverify
