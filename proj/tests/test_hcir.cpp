#include "doctest.h"

#include <fstream>
#include <sstream>
#include <string>

#include "enverify/costmodel.hpp"
#include "enverify/expr.hpp"
#include "enverify/hcir.hpp"

using namespace enverify;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(ENVERIFY_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("terms: list sugar builds nested cons cells") {
  Program p = parseProgram("p([1, 2 | T]).\n");
  const Clause& c = p.predicates.at({"p", 1}).front();
  REQUIRE(c.headArgs.size() == 1);
  const Term& t = *c.headArgs[0];
  REQUIRE(isCons(t));
  CHECK(t.args[0]->kind == TermKind::IntConst);
  CHECK(t.args[0]->value == 1);
  const Term& tail = *t.args[1];
  REQUIRE(isCons(tail));
  CHECK(tail.args[1]->kind == TermKind::Var);
  CHECK(tail.args[1]->name == "T");

  Program q = parseProgram("p([]).\n");
  CHECK(isNil(*q.predicates.at({"p", 1}).front().headArgs[0]));
}

TEST_CASE("terms: text form round trips") {
  TermPtr t = Term::cons(Term::intConst(Int(3)),
                         Term::cons(Term::var("X"), Term::nil()));
  CHECK(termToString(*t) == "[3,X]");
  TermPtr open = Term::cons(Term::intConst(Int(3)), Term::var("T"));
  CHECK(termToString(*open) == "[3|T]");

  Program p = parseProgram("f(N, M) :- M is (N + 1) * N - 2.\n");
  std::string out = printProgram(p);
  CHECK(out.find("M is (N + 1) * N - 2") != std::string::npos);
}

TEST_CASE("parseProgram: clauses, entries, and is/2 arithmetic") {
  std::string text = slurp("fact.hcir");
  Program p = parseProgram(text);
  REQUIRE(p.entries.size() == 1);
  CHECK(p.entries[0].name == "fact");
  CHECK(p.entries[0].arity == 2);

  const auto& clauses = p.predicates.at({"fact", 2});
  REQUIRE(clauses.size() == 2);
  CHECK(clauses[0].body.size() == 1);
  CHECK(clauses[0].body[0].kind == LiteralKind::Builtin);
  CHECK(clauses[0].body[0].name == "=<");

  const Clause& rec = clauses[1];
  REQUIRE(rec.body.size() == 4);
  CHECK(rec.body[1].name == "is");
  const Term& rhs = *rec.body[1].args[1];
  CHECK(rhs.kind == TermKind::Compound);
  CHECK(rhs.name == "-");
  CHECK(rec.body[2].kind == LiteralKind::Call);
  CHECK(rec.body[2].name == "fact");
}

TEST_CASE("parseProgram: comments and layout are ignored") {
  Program a = parseProgram(
      "% leading comment\n"
      "p(X, Y) :-\n"
      "    q(X,\n"
      "      Y).  % trailing\n"
      "q(A, A).\n");
  CHECK(a.predicates.count({"p", 2}) == 1);
  CHECK(a.predicates.count({"q", 2}) == 1);
}

TEST_CASE("parseProgram: malformed input reports the line") {
  try {
    parseProgram("p(X).\nq(X) :- r(X\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("printProgram: parse of the print is structurally identical") {
  for (const char* name : {"biquad.hcir", "append.hcir", "fact.hcir"}) {
    Program p = parseProgram(slurp(name));
    Program q = parseProgram(printProgram(p));
    CHECK(programEqual(p, q));
  }
}

TEST_CASE("callGraphSCCs: callee-first order and recursion flags") {
  Program p = parseProgram(
      "top(X, Y) :- mid(X, Z), leafp(Z, Y).\n"
      "mid(X, Y) :- leafp(X, Y).\n"
      "leafp(X, X).\n"
      "loop(X, Y) :- loop(X, Y).\n");
  auto sccs = callGraphSCCs(p);
  REQUIRE(sccs.size() == 4);

  auto indexOf = [&](const std::string& name) {
    for (size_t i = 0; i < sccs.size(); ++i)
      if (sccs[i].members.front().name == name) return i;
    FAIL("missing scc");
    return size_t(0);
  };
  CHECK(indexOf("leafp") < indexOf("mid"));
  CHECK(indexOf("mid") < indexOf("top"));

  for (const auto& s : sccs) {
    if (s.members.front().name == "loop")
      CHECK(s.recursive);
    else
      CHECK(!s.recursive);
  }
}

TEST_CASE("callGraphSCCs: mutual recursion collapses into one component") {
  Program p = parseProgram(
      "even(N) :- odd(M).\n"
      "odd(N) :- even(M).\n");
  auto sccs = callGraphSCCs(p);
  REQUIRE(sccs.size() == 1);
  CHECK(sccs[0].members.size() == 2);
  CHECK(sccs[0].recursive);
}

TEST_CASE("validate: undefined callees without a model entry are errors") {
  Program p = parseProgram(":- entry(f/2).\nf(X, Y) :- g(X, Y).\n");
  EnergyModel empty;
  auto diags = validate(p, empty);
  bool found = false;
  for (const auto& d : diags)
    if (d.severity == Diagnostic::Severity::Error &&
        d.message.find("g/2") != std::string::npos)
      found = true;
  CHECK(found);

  EnergyModel withG("m", "nJ", {{{"g", 2}, {Rat(1), Rat(1)}}});
  CHECK(validate(p, withG).empty());
}

TEST_CASE("validate: repeated variables in a parameter head are flagged") {
  EnergyModel empty;
  Program dup = parseProgram("f(X, X).\n");
  bool found = false;
  for (const auto& d : validate(dup, empty))
    if (d.message.find("repeat") != std::string::npos) found = true;
  CHECK(found);

  // pattern heads may repeat variables across pattern and parameters
  Program pat = parseProgram("g([X | R], X).\n");
  for (const auto& d : validate(pat, empty))
    CHECK(d.severity != Diagnostic::Severity::Error);
}

TEST_CASE("validate: builtin arities") {
  EnergyModel empty;
  Program p = parseProgram("f(X) :- X > 1.\n");
  CHECK(validate(p, empty).empty());
  CHECK(isBuiltinName("is", 2));
  CHECK(isBuiltinName("=<", 2));
  CHECK(!isBuiltinName("is", 3));
  CHECK(isComparisonBuiltin(">="));
  CHECK(!isComparisonBuiltin("is"));
}
