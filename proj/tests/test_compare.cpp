#include "doctest.h"

#include <random>
#include <set>
#include <string>
#include <vector>

#include "enverify/compare.hpp"

using namespace enverify;

namespace {

BoundFn F(const std::string& text, DomainSet d = {}) {
  ExprPtr e = normalize(parseExprText(text));
  std::set<std::string> names = freeVars(*e);
  std::vector<std::string> vars(names.begin(), names.end());
  if (vars.empty()) vars.push_back("n");
  return makeBoundFn(e, vars, d);
}

Rat valueAt(const BoundFn& f, const Int& x) {
  Enclosure e = evalAtPoint(f, {{f.vars.front(), x}});
  REQUIRE(e.exact());
  return e.lo.value();
}

}  // namespace

TEST_CASE("findRoots: exact integer roots with multiplicities") {
  // (n - 3)(n - 7)
  RootsResult r = findRoots(F("n*n - 10*n + 21"));
  REQUIRE(r.kind == RootsResult::Kind::Roots);
  REQUIRE(r.roots.size() == 2);
  CHECK(r.roots[0].exact);
  CHECK(r.roots[0].value.lo == ExtRat(3));
  CHECK(r.roots[1].value.lo == ExtRat(7));
  CHECK(!r.completeUpTo.has_value());

  RootsResult sq = findRoots(F("n*n - 10*n + 25"));
  REQUIRE(sq.roots.size() == 1);
  CHECK(sq.roots[0].multiplicity == 2);
  CHECK(sq.roots[0].value.lo == ExtRat(5));
}

TEST_CASE("findRoots: irrational roots come back as tight enclosures") {
  RootsResult r = findRoots(F("n*n - 2"));
  REQUIRE(r.roots.size() == 1);
  CHECK(!r.roots[0].exact);
  const Enclosure& v = r.roots[0].value;
  CHECK(v.lo.value() * v.lo.value() < Rat(2));
  CHECK(v.hi.value() * v.hi.value() > Rat(2));
  CHECK(v.width() < Rat(1, 1000000));
}

TEST_CASE("findRoots: degree-4 derivative chain isolates every real root") {
  // (n - 1)(n - 4)(n - 9)(n - 16), expanded
  RootsResult r = findRoots(F("n*n*n*n - 30*n*n*n + 273*n*n - 820*n + 576"));
  REQUIRE(r.roots.size() == 4);
  Int expect[4] = {1, 4, 9, 16};
  for (size_t i = 0; i < 4; ++i) {
    CHECK(r.roots[i].exact);
    CHECK(r.roots[i].value.lo == ExtRat(expect[i]));
  }
}

TEST_CASE("findRoots: all-zero function reports EverywhereZero") {
  CHECK(findRoots(F("0")).kind == RootsResult::Kind::EverywhereZero);
  CHECK(findRoots(F("n - n")).kind == RootsResult::Kind::EverywhereZero);
}

TEST_CASE("taylor seed order is configurable and defaults to 8") {
  CHECK(taylorSeedOrder() == 8);
  setTaylorSeedOrder(12);
  CHECK(taylorSeedOrder() == 12);
  setTaylorSeedOrder(0);
  CHECK(taylorSeedOrder() == 1);
  setTaylorSeedOrder(8);
}

TEST_CASE("safeAdjust: boundaries always land on sign-confirmed integers") {
  BoundFn f = F("n*n - 2");
  RootsResult r = findRoots(f);
  REQUIRE(r.roots.size() == 1);

  SafeAdjustResult left = safeAdjust(f, r.roots[0], SafeSide::ShrinkLeft);
  CHECK(left.kind == SafeAdjustResult::Kind::Cut);
  CHECK(left.boundary == 1);
  CHECK(left.leftSign == -1);
  CHECK(left.rightSign == 1);

  BoundFn g = F("n - 5");
  RootsResult rg = findRoots(g);
  SafeAdjustResult ex = safeAdjust(g, rg.roots[0], SafeSide::ShrinkLeft);
  CHECK(ex.kind == SafeAdjustResult::Kind::ExactBoundary);
  CHECK(ex.boundary == 5);
}

TEST_CASE("signPartition: regions cover the domain in order") {
  // 5 - n: positive below 5, zero at 5, negative above
  SignPartition p = signPartition(F("5 - n"));
  REQUIRE(p.regions.size() == 3);
  CHECK(p.regions[0].rel == Rel::Gt);
  CHECK(p.regions[0].lo == 0);
  CHECK(*p.regions[0].hi == 4);
  CHECK(p.regions[1].rel == Rel::Eq);
  CHECK(p.regions[1].lo == 5);
  CHECK(*p.regions[1].hi == 5);
  CHECK(p.regions[2].rel == Rel::Lt);
  CHECK(p.regions[2].lo == 6);
  CHECK(!p.regions[2].hi.has_value());
}

TEST_CASE("signPartition: non-integer crossings cut between integers") {
  // 2n - 7 crosses at 3.5
  SignPartition p = signPartition(F("2*n - 7"));
  REQUIRE(p.regions.size() == 2);
  CHECK(p.regions[0].rel == Rel::Lt);
  CHECK(*p.regions[0].hi == 3);
  CHECK(p.regions[1].rel == Rel::Gt);
  CHECK(p.regions[1].lo == 4);
}

TEST_CASE("signPartition: multivariate functions degrade to Unknown") {
  ExprPtr e = parseExprText("a + b - 3");
  BoundFn f = makeBoundFn(e, {"a", "b"});
  SignPartition p = signPartition(f);
  REQUIRE(p.regions.size() == 1);
  CHECK(p.regions[0].rel == Rel::Unknown);
}

TEST_CASE("compareFns: Lt means the left argument is below the right") {
  SignPartition p = compareFns(F("n + 5"), F("2*n"));
  REQUIRE(p.regions.size() == 3);
  CHECK(p.regions[0].rel == Rel::Gt);
  CHECK(*p.regions[0].hi == 4);
  CHECK(p.regions[1].rel == Rel::Eq);
  CHECK(p.regions[1].lo == 5);
  CHECK(p.regions[2].rel == Rel::Lt);
  CHECK(p.regions[2].lo == 6);

  CHECK(relAt(p, Int(0)) == Rel::Gt);
  CHECK(relAt(p, Int(5)) == Rel::Eq);
  CHECK(relAt(p, Int(1000)) == Rel::Lt);
}

TEST_CASE("compareFns: exponential against polynomial via the guarded scan") {
  SignPartition p = compareFns(F("power(2, n)"), F("n*n*n"));
  // 2^n vs n^3: 1>0, 2>1, then 4<8 .. 512<729, then 1024>1000 onwards
  REQUIRE(p.regions.size() == 3);
  CHECK(p.regions[0].rel == Rel::Gt);
  CHECK(p.regions[0].lo == 0);
  CHECK(*p.regions[0].hi == 1);
  CHECK(p.regions[1].rel == Rel::Lt);
  CHECK(p.regions[1].lo == 2);
  CHECK(*p.regions[1].hi == 9);
  CHECK(p.regions[2].rel == Rel::Gt);
  CHECK(p.regions[2].lo == 10);
  CHECK(!p.regions[2].hi.has_value());
}

TEST_CASE("compareFns: logarithmic mixtures") {
  // n vs 8 log2 n: equal at 64? 64 vs 48 no; crossing near 43.56; and at 1.
  SignPartition p = compareFns(F("n"), F("8*log(2, n)"));
  // domain forced to n >= 1 by the log guard
  Int pts[] = {1, 2, 10, 43, 44, 100};
  for (const Int& x : pts) {
    Rat lhs(x);
    EvalEnv env;
    env.vars["n"] = ExtRat(x);
    Enclosure rhs = eval(*parseExprText("8*log(2, n)"), env);
    Rel want = Rel::Unknown;
    if (ExtRat(lhs) < rhs.lo)
      want = Rel::Lt;
    else if (ExtRat(lhs) > rhs.hi)
      want = Rel::Gt;
    else if (rhs.exact() && ExtRat(lhs) == rhs.lo)
      want = Rel::Eq;
    if (want != Rel::Unknown) CHECK(relAt(p, x) == want);
  }
}

TEST_CASE("compareFns: randomized polynomial pairs agree with pointwise "
          "evaluation") {
  std::mt19937 rng(20240817);
  std::uniform_int_distribution<int> coeff(-10, 10);
  std::uniform_int_distribution<int> deg(0, 3);
  for (int trial = 0; trial < 60; ++trial) {
    auto mk = [&]() {
      int d = deg(rng);
      ExprPtr e = Expr::constant(Rat(coeff(rng)));
      ExprPtr pw = Expr::constant(Rat(1));
      for (int i = 1; i <= d; ++i) {
        pw = normalize(Expr::mul(pw, Expr::variable("n")));
        e = Expr::add(e, Expr::mul(Expr::constant(Rat(coeff(rng))), pw));
      }
      return makeBoundFn(normalize(e), {"n"});
    };
    BoundFn a = mk();
    BoundFn b = mk();
    SignPartition p = compareFns(a, b);
    for (Int x = 0; x <= 200; ++x) {
      Rat va = valueAt(a, x);
      Rat vb = valueAt(b, x);
      Rel want = va < vb ? Rel::Lt : va > vb ? Rel::Gt : Rel::Eq;
      REQUIRE(relAt(p, x) == want);
    }
  }
}

TEST_CASE("compareFns: restricted domains clip the partition") {
  DomainSet d;
  d.restrict("n", {Int(1), std::nullopt});
  SignPartition p = compareFns(F("16502087*n + 5445103", d),
                               F("125000000", d));
  REQUIRE(p.regions.size() == 2);
  CHECK(p.regions[0].rel == Rel::Lt);
  CHECK(p.regions[0].lo == 1);
  CHECK(*p.regions[0].hi == 7);
  CHECK(p.regions[1].rel == Rel::Gt);
  CHECK(p.regions[1].lo == 8);
  CHECK(!p.regions[1].hi.has_value());
}
