#include "doctest.h"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "enverify/analysis.hpp"
#include "enverify/costmodel.hpp"

using namespace enverify;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(ENVERIFY_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Recurrence::Case baseCase(const Int& lo, const Int& hi, const Rat& value) {
  Recurrence::Case c;
  c.guard.restrict("n", {lo, hi});
  c.additive = Expr::constant(value);
  return c;
}

Recurrence::Case recCase(const Int& lo, unsigned selfCalls, ExprPtr add) {
  Recurrence::Case c;
  c.guard.restrict("n", {lo, std::nullopt});
  c.selfCalls = selfCalls;
  c.additive = std::move(add);
  return c;
}

Rat evalClosed(const ExprPtr& e, const Int& n) {
  EvalEnv env;
  env.vars["n"] = ExtRat(n);
  Enclosure v = eval(*e, env);
  REQUIRE(v.exact());
  return v.lo.value();
}

// direct numeric unrolling, independent of the expression machinery
Rat iterate(unsigned a, const Rat& base, const std::vector<Rat>& adds,
            const Int& n, const Int& n0) {
  Rat t = base;
  for (Int k = n0 + 1; k <= n; ++k)
    t = Rat(a) * t + adds[k.get_ui()];
  return t;
}

const EnergyModel kNoModel;

AnalysisResult analyzeFixture(const std::string& hcir, const std::string& sig,
                              const EnergyModel& model) {
  Program p = parseProgram(slurp(hcir));
  SignatureTable sigs = parseSignatures(slurp(sig));
  return analyzeProgram(p, sigs, model);
}

void checkCost(const PredAnalysis& pa, const std::string& res,
               const std::string& lowerText, const std::string& upperText) {
  REQUIRE(pa.cost.count(res) == 1);
  const IntervalFn& f = pa.cost.at(res);
  CHECK(structurallyEqual(*f.lower.expr,
                          *normalize(parseExprText(lowerText))));
  CHECK(structurallyEqual(*f.upper.expr,
                          *normalize(parseExprText(upperText))));
}

}  // namespace

TEST_CASE("solveRecurrence: telescoping additive constant") {
  Recurrence r;
  r.var = "n";
  r.cases = {baseCase(0, 0, Rat(1)),
             recCase(1, 1, Expr::constant(Rat(1)))};
  auto cf = solveRecurrence(r);
  REQUIRE(cf.has_value());
  CHECK(cf->validFrom == 0);
  CHECK(structurallyEqual(*cf->expr, *normalize(parseExprText("n + 1"))));
}

TEST_CASE("solveRecurrence: telescoping polynomial additive") {
  // T(0) = 0, T(n) = T(n-1) + n
  Recurrence r;
  r.var = "n";
  r.cases = {baseCase(0, 0, Rat(0)),
             recCase(1, 1, Expr::variable("n"))};
  auto cf = solveRecurrence(r);
  REQUIRE(cf.has_value());
  for (Int n = 0; n <= 25; ++n) {
    Rat direct(0);
    for (Int k = 1; k <= n; ++k) direct += Rat(k);
    CHECK(evalClosed(cf->expr, n) == direct);
  }
}

TEST_CASE("solveRecurrence: exponential homogeneous part") {
  // T(0) = 1, T(n) = 2 T(n-1)
  Recurrence r;
  r.var = "n";
  r.cases = {baseCase(0, 0, Rat(1)),
             recCase(1, 2, Expr::constant(Rat(0)))};
  auto cf = solveRecurrence(r);
  REQUIRE(cf.has_value());
  for (Int n = 0; n <= 25; ++n)
    CHECK(evalClosed(cf->expr, n) == powRat(Rat(2), n.get_si()));
}

TEST_CASE("solveRecurrence: exponential with polynomial forcing") {
  // T(0) = 0, T(n) = 2 T(n-1) + n; closed form 2^(n+1) - n - 2
  Recurrence r;
  r.var = "n";
  r.cases = {baseCase(0, 0, Rat(0)),
             recCase(1, 2, Expr::variable("n"))};
  auto cf = solveRecurrence(r);
  REQUIRE(cf.has_value());
  std::vector<Rat> adds;
  for (int k = 0; k <= 30; ++k) adds.push_back(Rat(k));
  for (Int n = 0; n <= 25; ++n) {
    CHECK(evalClosed(cf->expr, n) == iterate(2, Rat(0), adds, n, Int(0)));
    CHECK(evalClosed(cf->expr, n) ==
          powRat(Rat(2), n.get_si() + 1) - Rat(n) - Rat(2));
  }
}

TEST_CASE("solveRecurrence: cubic forcing under a tripling recursion") {
  Recurrence r;
  r.var = "n";
  ExprPtr cubic = parseExprText("n*n*n - 2*n + 5");
  r.cases = {baseCase(0, 0, Rat(7)), recCase(1, 3, cubic)};
  auto cf = solveRecurrence(r);
  REQUIRE(cf.has_value());
  std::vector<Rat> adds;
  for (int k = 0; k <= 30; ++k)
    adds.push_back(Rat(k) * Rat(k) * Rat(k) - Rat(2) * Rat(k) + Rat(5));
  for (Int n = 0; n <= 25; ++n)
    CHECK(evalClosed(cf->expr, n) == iterate(3, Rat(7), adds, n, Int(0)));
}

TEST_CASE("solveRecurrence: base case away from zero limits validity") {
  // defined from n = 3 up, base at n = 3
  Recurrence r;
  r.var = "n";
  r.cases = {baseCase(3, 3, Rat(10)),
             recCase(4, 1, Expr::constant(Rat(2)))};
  auto cf = solveRecurrence(r);
  REQUIRE(cf.has_value());
  CHECK(cf->validFrom == 3);
  for (Int n = 3; n <= 25; ++n)
    CHECK(evalClosed(cf->expr, n) == Rat(10) + Rat(2) * Rat(n - 3));
}

TEST_CASE("solveRecurrence: unsupported shapes return a reason") {
  Recurrence gap;
  gap.var = "n";
  gap.cases = {baseCase(0, 0, Rat(1)),
               recCase(1, 1, parseExprText("power(2, n)"))};
  std::string note;
  CHECK(!solveRecurrence(gap, &note).has_value());
  CHECK(!note.empty());

  Recurrence wide;
  wide.var = "n";
  wide.cases = {baseCase(0, 0, Rat(1)),
                recCase(1, 1, Expr::constant(Rat(1))),
                recCase(1, 2, Expr::constant(Rat(0)))};
  CHECK(!solveRecurrence(wide).has_value());
}

TEST_CASE("unrollRecurrence matches the closed form point by point") {
  Recurrence r;
  r.var = "n";
  r.cases = {baseCase(0, 0, Rat(5)),
             recCase(1, 2, parseExprText("3*n + 1"))};
  auto cf = solveRecurrence(r);
  REQUIRE(cf.has_value());
  for (Int n = 0; n <= 25; ++n) {
    auto u = unrollRecurrence(r, n);
    REQUIRE(u.has_value());
    CHECK(evalClosed(*u, n) == evalClosed(cf->expr, n));
  }
  CHECK(!unrollRecurrence(r, Int(-1)).has_value());
}

TEST_CASE("analyzeProgram: biquad cascade energy is linear in the section "
          "count") {
  EnergyModel model = loadModel(slurp("biquad_model.json"));
  AnalysisResult res =
      analyzeFixture("biquad.hcir", "biquad.sig", model);
  const PredAnalysis* pa = res.find({"biquadCascade", 4});
  REQUIRE(pa != nullptr);
  REQUIRE(pa->supported);
  CHECK(pa->inputVars == std::vector<std::string>{"state", "xn", "N"});
  checkCost(*pa, "energy", "16502087*N + 5445103",
            "16502087*N + 5445103");
}

TEST_CASE("analyzeProgram: append steps and output length") {
  AnalysisResult res = analyzeFixture("append.hcir", "lists.sig", kNoModel);
  const PredAnalysis* pa = res.find({"append", 3});
  REQUIRE(pa != nullptr);
  REQUIRE(pa->supported);
  checkCost(*pa, "steps", "A + 1", "A + 1");
  REQUIRE(pa->outputSize.has_value());
  CHECK(structurallyEqual(*pa->outputSize->lower.expr,
                          *normalize(parseExprText("A + B"))));
  CHECK(structurallyEqual(*pa->outputSize->upper.expr,
                          *normalize(parseExprText("A + B"))));
}

TEST_CASE("analyzeProgram: factorial steps count every clause entry") {
  AnalysisResult res = analyzeFixture("fact.hcir", "fact.sig", kNoModel);
  const PredAnalysis* pa = res.find({"fact", 2});
  REQUIRE(pa != nullptr);
  checkCost(*pa, "steps", "N + 1", "N + 1");
}

TEST_CASE("analyzeProgram: two self calls double per level") {
  Program p = parseProgram(
      ":- entry(twice/2).\n"
      "twice(N, 1) :- N =< 0.\n"
      "twice(N, R) :- N > 0, N1 is N - 1, twice(N1, A), twice(N1, B), "
      "R is A + B.\n");
  SignatureTable sigs = parseSignatures(
      "pred twice(N: in num value, R: out num value).\n");
  AnalysisResult res = analyzeProgram(p, sigs, kNoModel);
  const PredAnalysis* pa = res.find({"twice", 2});
  REQUIRE(pa != nullptr);
  REQUIRE(pa->supported);
  // steps: T(0) = 1, T(n) = 2 T(n-1) + 1 = 2^(n+1) - 1
  const IntervalFn& steps = pa->cost.at("steps");
  for (Int n = 0; n <= 12; ++n) {
    Enclosure v = evalAtPoint(steps.upper, {{"N", n}});
    REQUIRE(v.exact());
    CHECK(v.lo.value() == powRat(Rat(2), n.get_si() + 1) - Rat(1));
  }
}

TEST_CASE("analyzeProgram: non-recursive predicates take clause maxima") {
  Program p = parseProgram(
      ":- entry(choose/2).\n"
      "choose(X, Y) :- cheap(X, Y).\n"
      "choose(X, Y) :- costly(X, Y).\n");
  SignatureTable sigs = parseSignatures(
      "pred choose(X: in num value, Y: out num value).\n");
  EnergyModel model = loadModel(R"({
    "unit": "nJ",
    "instructions": {
      "cheap/2": { "cost": 10 },
      "costly/2": { "cost": 70 }
    }
  })");
  AnalysisResult res = analyzeProgram(p, sigs, model);
  const PredAnalysis* pa = res.find({"choose", 2});
  REQUIRE(pa != nullptr);
  checkCost(*pa, "energy", "10", "70");
  CHECK(!pa->deterministic);
}

TEST_CASE("analyzeProgram: calls into an analyzed callee compose") {
  Program p = parseProgram(
      ":- entry(main/2).\n"
      "main(N, R) :- fact(N, R).\n"
      "fact(N, 1) :- N =< 0.\n"
      "fact(N, F) :- N > 0, N1 is N - 1, fact(N1, F1), F is N * F1.\n");
  SignatureTable sigs = parseSignatures(
      "pred main(N: in num value, R: out num value).\n"
      "pred fact(N: in num value, F: out num value).\n");
  AnalysisResult res = analyzeProgram(p, sigs, kNoModel);
  const PredAnalysis* pa = res.find({"main", 2});
  REQUIRE(pa != nullptr);
  // one clause entry plus the callee's N + 1
  checkCost(*pa, "steps", "N + 2", "N + 2");
}

TEST_CASE("analyzeProgram: used inputs must pass through self calls "
          "unchanged") {
  Program p = parseProgram(
      ":- entry(sneaky/3).\n"
      "sneaky(N, M, 0) :- N =< 0.\n"
      "sneaky(N, M, R) :- N > 0, N1 is N - 1, M1 is M + 1, "
      "helper(M, H), sneaky(N1, M1, R1), R is H + R1.\n"
      "helper(K, 1) :- K =< 0.\n"
      "helper(K, R) :- K > 0, K1 is K - 1, helper(K1, R1), R is R1 + 1.\n");
  SignatureTable sigs = parseSignatures(
      "pred sneaky(N: in num value, M: in num value, R: out num value).\n"
      "pred helper(K: in num value, R: out num value).\n");
  AnalysisResult res = analyzeProgram(p, sigs, kNoModel);
  const PredAnalysis* pa = res.find({"sneaky", 3});
  REQUIRE(pa != nullptr);
  CHECK(!pa->supported);
}

TEST_CASE("analyzeProgram: unused inputs may vary across self calls") {
  // the state argument changes every iteration but nothing depends on it
  EnergyModel model = loadModel(slurp("biquad_model.json"));
  AnalysisResult res = analyzeFixture("biquad.hcir", "biquad.sig", model);
  const PredAnalysis* pa = res.find({"biquadCascade", 4});
  REQUIRE(pa != nullptr);
  CHECK(pa->supported);
}

TEST_CASE("analyzeProgram: mutual recursion degrades to unsupported") {
  Program p = parseProgram(
      ":- entry(evenp/2).\n"
      "evenp(N, 1) :- N =< 0.\n"
      "evenp(N, R) :- N > 0, N1 is N - 1, oddp(N1, R).\n"
      "oddp(N, 0) :- N =< 0.\n"
      "oddp(N, R) :- N > 0, N1 is N - 1, evenp(N1, R).\n");
  SignatureTable sigs = parseSignatures(
      "pred evenp(N: in num value, R: out num value).\n"
      "pred oddp(N: in num value, R: out num value).\n");
  AnalysisResult res = analyzeProgram(p, sigs, kNoModel);
  REQUIRE(res.find({"evenp", 2}) != nullptr);
  CHECK(!res.find({"evenp", 2})->supported);
  CHECK(!res.find({"oddp", 2})->supported);
}

TEST_CASE("analyzeProgram: trusted bounds substitute for missing bodies") {
  Program p = parseProgram(slurp("trust.hcir"));
  SignatureTable sigs = parseSignatures(slurp("trust.sig"));
  TrustTable trusts;
  IntervalFn helper;
  helper.lower = makeBoundFn(normalize(parseExprText("2*N")), {"N"});
  helper.upper = makeBoundFn(normalize(parseExprText("3*N + 5")), {"N"});
  trusts[{"helper", 2}]["energy"] = helper;
  AnalysisResult res = analyzeProgram(p, sigs, kNoModel, trusts);
  const PredAnalysis* pa = res.find({"caller", 2});
  REQUIRE(pa != nullptr);
  checkCost(*pa, "energy", "2*N", "3*N + 5");
}

TEST_CASE("analyzeProgram: guards on non-recursion inputs are not "
          "supported") {
  Program p = parseProgram(
      ":- entry(guarded/3).\n"
      "guarded(N, M, 0) :- N =< 0.\n"
      "guarded(N, M, R) :- N > 0, M > 2, N1 is N - 1, "
      "guarded(N1, M, R).\n");
  SignatureTable sigs = parseSignatures(
      "pred guarded(N: in num value, M: in num value, "
      "R: out num value).\n");
  AnalysisResult res = analyzeProgram(p, sigs, kNoModel);
  REQUIRE(res.find({"guarded", 3}) != nullptr);
  CHECK(!res.find({"guarded", 3})->supported);
}

TEST_CASE("analyzeProgram: predicates without signatures are skipped") {
  Program p = parseProgram("mystery(X, Y) :- mystery(X, Y).\n");
  AnalysisResult res = analyzeProgram(p, SignatureTable{}, kNoModel);
  const PredAnalysis* pa = res.find({"mystery", 2});
  REQUIRE(pa != nullptr);
  CHECK(!pa->supported);
}

TEST_CASE("analysis intervals keep lower at or below upper") {
  Program p = parseProgram(
      ":- entry(skew/2).\n"
      "skew(X, Y) :- big(X, Y).\n"
      "skew(X, Y) :- small(X, Y).\n");
  SignatureTable sigs = parseSignatures(
      "pred skew(X: in num value, Y: out num value).\n");
  EnergyModel model = loadModel(R"({
    "unit": "nJ",
    "instructions": {
      "big/2": { "lower": 50, "upper": 60 },
      "small/2": { "lower": 1, "upper": 2 }
    }
  })");
  AnalysisResult res = analyzeProgram(p, sigs, model);
  const PredAnalysis* pa = res.find({"skew", 2});
  REQUIRE(pa != nullptr);
  const IntervalFn& f = pa->cost.at("energy");
  Enclosure lo = evalAtPoint(f.lower, {{"X", Int(0)}});
  Enclosure hi = evalAtPoint(f.upper, {{"X", Int(0)}});
  CHECK(lo.hi <= hi.lo);
}
