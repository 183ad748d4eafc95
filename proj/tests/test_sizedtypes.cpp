#include "doctest.h"

#include <fstream>
#include <sstream>
#include <string>

#include "enverify/sizedtypes.hpp"

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

TEST_CASE("parseSignatures: list type declarations plus predicate modes") {
  SignatureTable t = parseSignatures(slurp("lists.sig"));
  REQUIRE(t.types.isDeclared("listnum"));
  const RegularType& lt = t.types.types.at("listnum");
  CHECK(lt.hasNil);
  REQUIRE(lt.cons.has_value());
  CHECK(lt.cons->elemType == "num");
  CHECK(lt.cons->tailType == "listnum");

  const PredicateSignature* sig = t.find({"append", 3});
  REQUIRE(sig != nullptr);
  REQUIRE(sig->arity() == 3);
  CHECK(sig->args[0].name == "A");
  CHECK(sig->args[0].mode == ArgMode::In);
  CHECK(sig->args[0].metric == SizeMetric::ListLength);
  CHECK(sig->args[2].mode == ArgMode::Out);
  CHECK(sig->inputPositions() == std::vector<size_t>{0, 1});
  CHECK(sig->outputPosition() == size_t(2));
}

TEST_CASE("parseSignatures: value metric on num arguments") {
  SignatureTable t = parseSignatures(slurp("fact.sig"));
  const PredicateSignature* sig = t.find({"fact", 2});
  REQUIRE(sig != nullptr);
  CHECK(sig->args[0].metric == SizeMetric::IntValue);
  CHECK(sig->args[0].typeName == "num");
}

TEST_CASE("parseSignatures: depth metric and rejection of unknown names") {
  SignatureTable t = parseSignatures(
      "nested := [] | [num | nested].\n"
      "pred size(T: in nested depth, S: out num value).\n");
  const PredicateSignature* sig = t.find({"size", 2});
  REQUIRE(sig != nullptr);
  CHECK(sig->args[0].metric == SizeMetric::TermDepth);

  CHECK_THROWS_AS(
      parseSignatures("pred f(X: in nosuch length, Y: out num value).\n"),
      SizedTypeError);
  CHECK_THROWS_AS(
      parseSignatures("pred f(X: in num wibble, Y: out num value).\n"),
      SizedTypeError);
}

TEST_CASE("deriveSchema: length pair for lists, value pair for num") {
  SignatureTable t = parseSignatures(slurp("lists.sig"));
  SizedSchema ls = deriveSchema("listnum", t.types);
  REQUIRE(ls.pairs.size() >= 1);
  CHECK(ls.pairs[0].role == "length");

  SizedSchema ns = deriveSchema("num", t.types);
  REQUIRE(ns.pairs.size() == 1);
  CHECK(ns.pairs[0].role == "value");

  CHECK_THROWS_AS(deriveSchema("nosuch", t.types), SizedTypeError);
}

TEST_CASE("sizeOf: metrics on ground terms") {
  TermPtr xs = Term::cons(
      Term::intConst(Int(5)),
      Term::cons(Term::intConst(Int(6)),
                 Term::cons(Term::intConst(Int(7)), Term::nil())));
  CHECK(sizeOf(*xs, SizeMetric::ListLength) == 3);
  CHECK(sizeOf(*Term::nil(), SizeMetric::ListLength) == 0);
  CHECK(sizeOf(*Term::intConst(Int(42)), SizeMetric::IntValue) == 42);

  TermPtr tree = Term::compound(
      "node", {Term::intConst(Int(1)),
               Term::compound("node", {Term::intConst(Int(2)),
                                       Term::compound("leaf", {}),
                                       Term::compound("leaf", {})}),
               Term::compound("leaf", {})});
  CHECK(sizeOf(*tree, SizeMetric::TermDepth) == 3);

  CHECK_THROWS_AS(sizeOf(*Term::var("X"), SizeMetric::ListLength),
                  SizedTypeError);
  CHECK_THROWS_AS(sizeOf(*Term::nil(), SizeMetric::IntValue), SizedTypeError);
}

TEST_CASE("signature table lookup is by name and arity") {
  SignatureTable t = parseSignatures(slurp("lists.sig"));
  CHECK(t.find({"append", 3}) != nullptr);
  CHECK(t.find({"append", 2}) == nullptr);
  CHECK(t.find({"reverse", 2}) == nullptr);
}
