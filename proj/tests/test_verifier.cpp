#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "enverify/verifier.hpp"

using namespace enverify;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(ENVERIFY_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

IntervalFn linearInterval(const std::string& lowerText,
                          const std::string& upperText) {
  IntervalFn f;
  f.lower = makeBoundFn(normalize(parseExprText(lowerText)), {"n"});
  f.upper = makeBoundFn(normalize(parseExprText(upperText)), {"n"});
  return f;
}

InternalAssertion assertionOn(const std::string& lowerText,
                              const std::string& upperText,
                              DomainSet precond = {}) {
  InternalAssertion a;
  a.pred = {"p", 2};
  a.callPattern = {{"n", "num", ArgMode::In, SizeMetric::IntValue},
                   {"r", "num", ArgMode::Out, SizeMetric::IntValue}};
  a.sizePrecond = std::move(precond);
  a.resourceName = "energy";
  a.lower = lowerText.empty() ? Expr::constant(Rat(0))
                              : parseExprText(lowerText);
  a.upper = upperText.empty() ? Expr::posInf() : parseExprText(upperText);
  return a;
}

const VerificationOutcome::Verdict* verdictAt(const VerificationOutcome& o,
                                              const Int& x) {
  for (const auto& v : o.verdicts)
    if (v.region.contains({{"n", x}})) return &v;
  return nullptr;
}

Report runFixture(const std::string& hcir, const std::string& model,
                  const std::string& spec, const std::string& sig) {
  Program p = parseProgram(slurp(hcir));
  EnergyModel m = loadModel(slurp(model));
  SpecFile f = parseSpecFile(slurp(spec));
  SignatureTable sigs = parseSignatures(slurp(sig));
  return verifyProgram(p, sigs, m, f);
}

}  // namespace

TEST_CASE("checkAssertion: three-way split against a constant budget") {
  IntervalFn inferred = linearInterval("2*n", "3*n + 5");
  InternalAssertion spec = assertionOn("", "100");
  VerificationOutcome o = checkAssertion(inferred, spec);

  REQUIRE(o.verdicts.size() == 3);
  CHECK(o.verdicts[0].status == Status::Checked);
  CHECK(o.verdicts[0].region.rangeOf("n").lo == 0);
  CHECK(*o.verdicts[0].region.rangeOf("n").hi == 31);
  CHECK(o.verdicts[1].status == Status::Check);
  CHECK(o.verdicts[1].region.rangeOf("n").lo == 32);
  CHECK(*o.verdicts[1].region.rangeOf("n").hi == 50);
  CHECK(o.verdicts[2].status == Status::False);
  CHECK(o.verdicts[2].region.rangeOf("n").lo == 51);
  CHECK(!o.verdicts[2].region.rangeOf("n").hi.has_value());
}

TEST_CASE("checkAssertion: spec lower bound above the inferred lower "
          "blocks checked") {
  IntervalFn inferred = linearInterval("n", "n");
  // spec demands at least n + 1 spent: inferred lower sits strictly below
  InternalAssertion spec = assertionOn("n + 1", "");
  VerificationOutcome o = checkAssertion(inferred, spec);
  for (const auto& v : o.verdicts) CHECK(v.status != Status::Checked);
  // and the inferred upper n misses the spec lower n + 1 outright
  CHECK(verdictAt(o, Int(0)) != nullptr);
  CHECK(verdictAt(o, Int(0))->status == Status::False);
}

TEST_CASE("checkAssertion: equality at the boundary is still within "
          "bounds") {
  IntervalFn inferred = linearInterval("5", "5");
  InternalAssertion spec = assertionOn("5", "5");
  VerificationOutcome o = checkAssertion(inferred, spec);
  REQUIRE(o.verdicts.size() == 1);
  CHECK(o.verdicts[0].status == Status::Checked);
}

TEST_CASE("checkAssertion: false needs a strict miss") {
  // inferred exactly the budget: upper == spec upper, not false
  IntervalFn inferred = linearInterval("2*n", "2*n");
  InternalAssertion spec = assertionOn("", "100");
  VerificationOutcome o = checkAssertion(inferred, spec);
  const auto* at50 = verdictAt(o, Int(50));
  REQUIRE(at50 != nullptr);
  CHECK(at50->status == Status::Checked);
  const auto* at51 = verdictAt(o, Int(51));
  REQUIRE(at51 != nullptr);
  CHECK(at51->status == Status::False);
}

TEST_CASE("checkAssertion: inconsistent specification intervals never "
          "verify") {
  IntervalFn inferred = linearInterval("10", "10");
  InternalAssertion spec = assertionOn("20", "5");
  VerificationOutcome o = checkAssertion(inferred, spec);
  bool flagged = false;
  for (const auto& d : o.diagnostics)
    if (d.find("inconsistent") != std::string::npos) flagged = true;
  CHECK(flagged);
  for (const auto& v : o.verdicts) CHECK(v.status != Status::Checked);
}

TEST_CASE("checkAssertion: precondition clipping") {
  IntervalFn inferred = linearInterval("n", "n");
  DomainSet pre;
  pre.restrict("n", {Int(3), Int(9)});
  InternalAssertion spec = assertionOn("", "6", pre);
  VerificationOutcome o = checkAssertion(inferred, spec);
  REQUIRE(o.verdicts.size() == 2);
  CHECK(o.verdicts[0].status == Status::Checked);
  CHECK(o.verdicts[0].region.rangeOf("n").lo == 3);
  CHECK(*o.verdicts[0].region.rangeOf("n").hi == 6);
  CHECK(o.verdicts[1].status == Status::False);
  CHECK(o.verdicts[1].region.rangeOf("n").lo == 7);
  CHECK(*o.verdicts[1].region.rangeOf("n").hi == 9);
}

TEST_CASE("checkAssertion: regions outside the inferred validity fall "
          "back to check") {
  IntervalFn inferred = linearInterval("n", "n");
  DomainSet valid;
  valid.restrict("n", {Int(5), std::nullopt});
  inferred.lower.domain = valid;
  inferred.upper.domain = valid;
  InternalAssertion spec = assertionOn("", "1000");
  VerificationOutcome o = checkAssertion(inferred, spec);
  const auto* low = verdictAt(o, Int(0));
  REQUIRE(low != nullptr);
  CHECK(low->status == Status::Check);
  const auto* high = verdictAt(o, Int(5));
  REQUIRE(high != nullptr);
  CHECK(high->status == Status::Checked);
}

TEST_CASE("checkAssertion: randomized safe-side audit") {
  std::mt19937 rng(4242);
  std::uniform_int_distribution<int> small(0, 6);
  int checkedRegions = 0;
  for (int trial = 0; trial < 120; ++trial) {
    int a = small(rng), b = small(rng);
    int c = a + small(rng) % 3, d = b + small(rng);
    IntervalFn inferred = linearInterval(
        std::to_string(a) + "*n + " + std::to_string(b),
        std::to_string(c) + "*n + " + std::to_string(d));
    InternalAssertion spec = assertionOn(
        std::to_string(small(rng)) + "*n",
        std::to_string(1 + small(rng)) + "*n + " + std::to_string(small(rng)));
    VerificationOutcome o = checkAssertion(inferred, spec);
    for (const auto& v : o.verdicts) {
      if (v.status != Status::Checked) continue;
      ++checkedRegions;
      const auto& range = v.region.rangeOf("n");
      Int stop = range.hi ? *range.hi
                          : std::max(Int(range.lo + 50), Int(200));
      for (Int x = range.lo; x <= stop; ++x) {
        std::map<std::string, Int> pt{{"n", x}};
        Rat infLo = evalAtPoint(inferred.lower, pt).lo.value();
        Rat infHi = evalAtPoint(inferred.upper, pt).lo.value();
        EvalEnv env;
        env.vars["n"] = ExtRat(x);
        Rat specLo = eval(*spec.lower, env).lo.value();
        Rat specHi = eval(*spec.upper, env).lo.value();
        REQUIRE(specLo <= infLo);
        REQUIRE(infHi <= specHi);
      }
    }
  }
  CHECK(checkedRegions > 0);
}

TEST_CASE("splitToAssertions: one pragma per region") {
  IntervalFn inferred = linearInterval("2*n", "3*n + 5");
  InternalAssertion spec = assertionOn("", "100");
  spec.pred = {"p", 2};
  VerificationOutcome o = checkAssertion(inferred, spec);
  SignatureTable sigs = parseSignatures(
      "pred p(n: in num value, r: out num value).\n");
  std::vector<std::string> skipped;
  auto parts = splitToAssertions(o, *sigs.find({"p", 2}), &skipped);
  REQUIRE(parts.size() == o.verdicts.size());
  CHECK(skipped.empty());
  CHECK(parts[0].status == Status::Checked);
  REQUIRE(parts[0].precond.has_value());
  CHECK(parts[0].precond->id == "n");
}

TEST_CASE("parseSpecFile: passthrough, pragmas, internal lines") {
  SpecFile f = parseSpecFile(
      "// kept verbatim\n"
      "\n"
      "#pragma check f(n) :\n"
      "    (1 <= n) ==>\n"
      "    (energy <= 10)\n"
      ":- trust pred g(N, R) + resource(energy, 0, N).\n");
  REQUIRE(f.entries.size() == 4);
  CHECK(f.entries[0].kind == SpecEntry::Kind::Passthrough);
  CHECK(f.entries[0].text == "// kept verbatim");
  CHECK(f.entries[1].kind == SpecEntry::Kind::Passthrough);
  CHECK(f.entries[2].kind == SpecEntry::Kind::Pragma);
  REQUIRE(f.entries[2].pragma.has_value());
  CHECK(f.entries[2].pragma->funcName == "f");
  CHECK(f.entries[3].kind == SpecEntry::Kind::Internal);
  REQUIRE(f.entries[3].internal.has_value());
  CHECK(f.entries[3].internal->status == Status::Trust);

  CHECK_THROWS_AS(parseSpecFile("what is this\n"), ParseError);
}

TEST_CASE("verifyProgram: biquad against its energy budget") {
  Report rep = runFixture("biquad.hcir", "biquad_model.json", "biquad.spec",
                          "biquad.sig");
  REQUIRE(rep.specs.size() == 1);
  const SpecResult& sr = rep.specs[0];
  REQUIRE(sr.resolved);

  REQUIRE(sr.resultLines.size() == 2);
  CHECK(sr.resultLines[0] ==
        "#pragma checked biquadCascade(state,xn,N) : "
        "(1 <= N && N <= 7) ==> (energy <= 125000000)");
  CHECK(sr.resultLines[1] ==
        "#pragma false biquadCascade(state,xn,N) : "
        "(8 <= N) ==> (energy <= 125000000)");
  REQUIRE(sr.inferredTrueLine.has_value());
  CHECK(*sr.inferredTrueLine ==
        "#pragma true biquadCascade(state,xn,N) : "
        "(16502087*N + 5445103 <= energy && "
        "energy <= 16502087*N + 5445103)");

  CHECK(rep.checkedCount == 1);
  CHECK(rep.falseCount == 1);
  CHECK(rep.checkCount == 0);
  CHECK(!rep.allVerified);
}

TEST_CASE("verifyProgram: append and fact verify on the whole domain") {
  Report append = runFixture("append.hcir", "empty_model.json",
                             "append.spec", "lists.sig");
  REQUIRE(append.specs.size() == 1);
  CHECK(append.allVerified);
  CHECK(append.checkedCount == 1);
  CHECK(append.falseCount == 0);

  Report fact = runFixture("fact.hcir", "empty_model.json", "fact.spec",
                           "fact.sig");
  CHECK(fact.allVerified);
  REQUIRE(fact.specs.size() == 1);
  REQUIRE(fact.specs[0].inferredTrueLine.has_value());
  CHECK(*fact.specs[0].inferredTrueLine ==
        ":- true pred fact(N,F) + resource(steps, N + 1, N + 1).");
}

TEST_CASE("verifyProgram: trusted callee bounds flow into the caller") {
  Report rep = runFixture("trust.hcir", "empty_model.json", "trust.spec",
                          "trust.sig");
  REQUIRE(rep.specs.size() == 1);
  const SpecResult& sr = rep.specs[0];
  REQUIRE(sr.resolved);
  REQUIRE(sr.outcome.verdicts.size() == 3);
  CHECK(sr.outcome.verdicts[0].status == Status::Checked);
  CHECK(*sr.outcome.verdicts[0].region.rangeOf("N").hi == 31);
  CHECK(sr.outcome.verdicts[1].status == Status::Check);
  CHECK(sr.outcome.verdicts[2].status == Status::False);
  CHECK(sr.outcome.verdicts[2].region.rangeOf("N").lo == 51);

  bool noted = false;
  for (const auto& d : sr.diagnostics)
    if (d.find("trust") != std::string::npos) noted = true;
  CHECK(noted);
}

TEST_CASE("verifyProgram: declared statuses are re-verified") {
  Program p = parseProgram(slurp("fact.hcir"));
  EnergyModel m = loadModel(slurp("empty_model.json"));
  SignatureTable sigs = parseSignatures(slurp("fact.sig"));

  SpecFile wrongTrue = parseSpecFile(
      ":- true pred fact(N, F) + resource(steps, 0, N).\n");
  Report rep = verifyProgram(p, sigs, m, wrongTrue);
  REQUIRE(rep.specs.size() == 1);
  bool flagged = false;
  for (const auto& d : rep.specs[0].diagnostics)
    if (d.find("true") != std::string::npos ||
        d.find("declared") != std::string::npos)
      flagged = true;
  CHECK(flagged);

  SpecFile rightChecked = parseSpecFile(
      ":- checked pred fact(N, F) + resource(steps, N + 1, N + 1).\n");
  Report rep2 = verifyProgram(p, sigs, m, rightChecked);
  CHECK(rep2.allVerified);
  CHECK(rep2.specs[0].diagnostics.empty());
}

TEST_CASE("verifyProgram: unresolvable assertions stay as check") {
  Program p = parseProgram(slurp("fact.hcir"));
  EnergyModel m = loadModel(slurp("empty_model.json"));
  SignatureTable sigs = parseSignatures(slurp("fact.sig"));
  SpecFile f = parseSpecFile(
      ":- check pred nosuch(N, R) + resource(steps, 0, N).\n");
  Report rep = verifyProgram(p, sigs, m, f);
  REQUIRE(rep.specs.size() == 1);
  CHECK(!rep.specs[0].resolved);
  CHECK(!rep.allVerified);
  CHECK(rep.checkCount == 1);
}

TEST_CASE("renderAnnotatedSpec: passthrough text survives verbatim") {
  Report rep = runFixture("biquad.hcir", "biquad_model.json", "biquad.spec",
                          "biquad.sig");
  std::string out = renderAnnotatedSpec(rep);
  CHECK(out.find("// budget: 0.125 s deadline at 1 W, expressed in nJ") !=
        std::string::npos);
  CHECK(out.find("#pragma true biquadCascade") != std::string::npos);
  CHECK(out.find("#pragma checked biquadCascade") != std::string::npos);
  CHECK(out.find("#pragma false biquadCascade") != std::string::npos);
}

TEST_CASE("renderSummaryJson: machine-readable verdict layout") {
  Report rep = runFixture("biquad.hcir", "biquad_model.json", "biquad.spec",
                          "biquad.sig");
  auto doc = nlohmann::json::parse(renderSummaryJson(rep));
  CHECK(doc.at("all_verified") == false);
  CHECK(doc.at("counts").at("checked") == 1);
  CHECK(doc.at("counts").at("false") == 1);
  CHECK(doc.at("counts").at("check") == 0);
  REQUIRE(doc.at("specs").size() == 1);
  const auto& spec = doc.at("specs").at(0);
  CHECK(spec.at("predicate") == "biquadCascade/4");
  CHECK(spec.at("resource") == "energy");
  CHECK(spec.at("inferred").at("lower") == "16502087*N + 5445103");
  REQUIRE(spec.at("verdicts").size() == 2);
  CHECK(spec.at("verdicts").at(0).at("status") == "checked");
  CHECK(spec.at("verdicts").at(0).at("domain") == "1 <= N <= 7");
}
