#include "doctest.h"

#include <random>
#include <string>
#include <vector>

#include "enverify/assertlang.hpp"

using namespace enverify;

namespace {

const char* kCheckPragma =
    "#pragma check biquadCascade(state,xn,N) : "
    "(1 <= N) ==> (energy <= 125000000)";
const char* kTruePragma =
    "#pragma true biquadCascade(state,xn,N) : "
    "(16502087*N + 5445103 <= energy && energy <= 16502087*N + 5445103)";
const char* kCheckedPragma =
    "#pragma checked biquadCascade(state,xn,N) : "
    "(1 <= N && N <= 7) ==> (energy <= 125000000)";
const char* kFalsePragma =
    "#pragma false biquadCascade(state,xn,N) : "
    "(8 <= N) ==> (energy <= 125000000)";

SignatureTable biquadSigs() {
  return parseSignatures(
      "pred biquadCascade(state: in num value, xn: in num value, "
      "N: in num value, yn: out num value).\n");
}

}  // namespace

TEST_CASE("parsePragma: budget-check assertion") {
  XCAssertion a = parsePragma(kCheckPragma);
  CHECK(a.status == Status::Check);
  CHECK(a.funcName == "biquadCascade");
  CHECK(a.scopeArgs == std::vector<std::string>{"state", "xn", "N"});
  REQUIRE(a.precond.has_value());
  CHECK(a.precond->id == "N");
  REQUIRE(a.precond->lower != nullptr);
  CHECK(structurallyEqual(*a.precond->lower, *Expr::constant(Rat(1))));
  CHECK(a.precond->upper == nullptr);
  CHECK(a.costLower == nullptr);
  REQUIRE(a.costUpper != nullptr);
  CHECK(structurallyEqual(*a.costUpper, *Expr::constant(Rat(125000000))));
}

TEST_CASE("parsePragma: two-sided cost body without a precondition") {
  XCAssertion a = parsePragma(kTruePragma);
  CHECK(a.status == Status::True);
  CHECK(!a.precond.has_value());
  REQUIRE(a.costLower != nullptr);
  REQUIRE(a.costUpper != nullptr);
  CHECK(structurallyEqual(*a.costLower, *a.costUpper));
  CHECK(structurallyEqual(*a.costLower,
                          *parseExprText("16502087*N + 5445103")));
}

TEST_CASE("parsePragma: multi-line layout joins into one assertion") {
  XCAssertion a = parsePragma(
      "#pragma checked biquadCascade(state,xn,N) : \n"
      "   (1 <= N && N <= 7) \n"
      "       ==> (energy <= 125000000)");
  CHECK(a.status == Status::Checked);
  REQUIRE(a.precond.has_value());
  CHECK(structurallyEqual(*a.precond->lower, *Expr::constant(Rat(1))));
  CHECK(structurallyEqual(*a.precond->upper, *Expr::constant(Rat(7))));
  CHECK(xcEqual(a, parsePragma(kCheckedPragma)));
}

TEST_CASE("parsePragma: omitted status defaults to check") {
  XCAssertion a = parsePragma("#pragma f(n) : (energy <= 10)");
  CHECK(a.status == Status::Check);
  CHECK(a.funcName == "f");

  // a status word immediately followed by '(' is a function name
  XCAssertion b = parsePragma("#pragma check(n) : (energy <= 10)");
  CHECK(b.status == Status::Check);
  CHECK(b.funcName == "check");
}

TEST_CASE("parsePragma: malformed assertions are rejected") {
  CHECK_THROWS_AS(parsePragma("#pragma bogus status f(n) : (energy <= 1)"),
                  ParseError);
  CHECK_THROWS_AS(parsePragma("#pragma check f(n) : (1 <= m) ==> "
                              "(energy <= 1)"),
                  ParseError);
  CHECK_THROWS_AS(parsePragma("#pragma check f(n) : (energy <= )"),
                  ParseError);
  CHECK_THROWS_AS(parsePragma("#pragma check f(n,) : (energy <= 1)"),
                  ParseError);
  CHECK(parsePragma("#pragma check f() : (energy <= 1)").scopeArgs.empty());
}

TEST_CASE("printPragma: canonical single-line text for the corpus pragmas") {
  CHECK(printPragma(parsePragma(kCheckPragma)) == kCheckPragma);
  CHECK(printPragma(parsePragma(kTruePragma)) == kTruePragma);
  CHECK(printPragma(parsePragma(kCheckedPragma)) == kCheckedPragma);
  CHECK(printPragma(parsePragma(kFalsePragma)) == kFalsePragma);
}

TEST_CASE("pragma round trip holds under a randomized generator") {
  std::mt19937 rng(911);
  std::uniform_int_distribution<int> pick(0, 4);
  std::uniform_int_distribution<int> coeff(0, 9);
  const char* names[] = {"f", "g2", "biquadCascade", "runFilter"};
  const char* args[] = {"n", "m", "len", "xs"};

  for (int trial = 0; trial < 150; ++trial) {
    XCAssertion a;
    a.status = static_cast<Status>(pick(rng));
    a.funcName = names[pick(rng) % 4];
    size_t nargs = 1 + pick(rng) % 3;
    for (size_t i = 0; i < nargs; ++i) a.scopeArgs.push_back(args[i]);
    if (pick(rng) % 2 == 0) {
      XCAssertion::Precond pre;
      pre.id = a.scopeArgs[pick(rng) % nargs];
      pre.lower = Expr::constant(Rat(coeff(rng)));
      if (pick(rng) % 2 == 0)
        pre.upper = Expr::constant(Rat(coeff(rng) + 10));
      a.precond = pre;
    }
    ExprPtr linear = Expr::add(
        Expr::mul(Expr::constant(Rat(1 + coeff(rng))),
                  Expr::variable(a.scopeArgs[0])),
        Expr::constant(Rat(coeff(rng))));
    if (pick(rng) % 3 == 0) a.costLower = linear;
    a.costUpper = pick(rng) % 3 == 0 ? Expr::arrayMax(a.scopeArgs[0])
                                     : linear;

    XCAssertion b = parsePragma(printPragma(a));
    CHECK(xcEqual(a, b));
    CHECK(printPragma(b) == printPragma(a));
  }
}

TEST_CASE("toInternal: the predicate form gains the output argument") {
  SignatureTable sigs = biquadSigs();
  XCAssertion a = parsePragma(kCheckPragma);
  InternalAssertion ia = toInternal(a, *sigs.find({"biquadCascade", 4}));
  CHECK(ia.pred.name == "biquadCascade");
  CHECK(ia.pred.arity == 4);
  REQUIRE(ia.callPattern.size() == 4);
  CHECK(ia.callPattern[3].mode == ArgMode::Out);
  CHECK(ia.inputVars() ==
        std::vector<std::string>{"state", "xn", "N"});
  CHECK(ia.sizePrecond.rangeOf("N").lo == 1);
  CHECK(!ia.sizePrecond.rangeOf("N").hi.has_value());
  CHECK(ia.resourceName == "energy");
  CHECK(structurallyEqual(*ia.lower, *Expr::constant(Rat(0))));
  REQUIRE(ia.upper != nullptr);
  CHECK(structurallyEqual(*ia.upper, *Expr::constant(Rat(125000000))));
}

TEST_CASE("fromInternal: defaults are elided on the way out") {
  SignatureTable sigs = biquadSigs();
  const PredicateSignature& sig = *sigs.find({"biquadCascade", 4});
  InternalAssertion ia = toInternal(parsePragma(kCheckPragma), sig);
  XCAssertion back = fromInternal(ia, sig);
  CHECK(xcEqual(back, parsePragma(kCheckPragma)));

  InternalAssertion steps = ia;
  steps.resourceName = "steps";
  CHECK_THROWS_AS(fromInternal(steps, sig), AssertionError);

  InternalAssertion wide = ia;
  wide.sizePrecond = DomainSet{};
  wide.sizePrecond.restrict("N", {Int(1), std::nullopt});
  wide.sizePrecond.restrict("xn", {Int(2), std::nullopt});
  CHECK_THROWS_AS(fromInternal(wide, sig), AssertionError);
}

TEST_CASE("internal line: parse and print round trip") {
  const char* line =
      ":- check pred append(A, B, C) + resource(steps, 0, A + 1).";
  InternalAssertion ia = parseInternalLine(line);
  CHECK(ia.pred.name == "append");
  CHECK(ia.pred.arity == 3);
  CHECK(ia.status == Status::Check);
  CHECK(ia.resourceName == "steps");
  CHECK(structurallyEqual(*ia.lower, *Expr::constant(Rat(0))));
  CHECK(structurallyEqual(*ia.upper, *parseExprText("A + 1")));

  InternalAssertion again = parseInternalLine(printInternalLine(ia));
  CHECK(again.pred == ia.pred);
  CHECK(again.status == ia.status);
  CHECK(structurallyEqual(*again.upper, *ia.upper));

  InternalAssertion trust = parseInternalLine(
      ":- trust pred helper(N, R) + resource(energy, 2*N, 3*N + 5).");
  CHECK(trust.status == Status::Trust);
  CHECK(structurallyEqual(*trust.lower, *parseExprText("2*N")));

  InternalAssertion guarded = parseInternalLine(
      ":- checked pred f(N, R) : (1 <= N && N <= 7) + "
      "resource(energy, 0, inf).");
  CHECK(guarded.sizePrecond.rangeOf("N").lo == 1);
  CHECK(*guarded.sizePrecond.rangeOf("N").hi == 7);
  CHECK(guarded.upper->kind == ExprKind::PosInf);
}

TEST_CASE("resolveAgainstSignature fills metrics and catches mismatches") {
  SignatureTable sigs = parseSignatures(
      "listnum := [] | [num | listnum].\n"
      "pred append(A: in listnum length, B: in listnum length, "
      "C: out listnum length).\n");
  InternalAssertion ia = parseInternalLine(
      ":- check pred append(X, Y, Z) + resource(steps, 0, X + 1).");
  resolveAgainstSignature(ia, *sigs.find({"append", 3}));
  CHECK(ia.callPattern[0].metric == SizeMetric::ListLength);
  CHECK(ia.callPattern[2].mode == ArgMode::Out);

  InternalAssertion bad = parseInternalLine(
      ":- check pred append(X, Y) + resource(steps, 0, X).");
  CHECK_THROWS_AS(
      resolveAgainstSignature(bad, *sigs.find({"append", 3})),
      AssertionError);
}

TEST_CASE("status names round trip") {
  for (Status s : {Status::Check, Status::Trust, Status::True,
                   Status::Checked, Status::False}) {
    CHECK(statusFromName(statusName(s)) == s);
  }
  CHECK(!statusFromName("maybe").has_value());
}
