#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "enverify/hcir.hpp"
#include "enverify/rational.hpp"

namespace enverify {

struct SizedTypeError : std::runtime_error {
  explicit SizedTypeError(const std::string& what)
      : std::runtime_error(what) {}
};

enum class SizeMetric { IntValue, ListLength, TermDepth };

std::string sizeMetricName(SizeMetric m);

// Declared regular type. The grammar is deterministic: at most one nil
// alternative and at most one cons alternative. The primitive type `num`
// is built in and never declared.
struct RegularType {
  struct ConsAlt {
    std::string elemType;
    std::string tailType;
  };

  std::string name;
  bool hasNil = false;
  std::optional<ConsAlt> cons;
};

struct TypeTable {
  std::map<std::string, RegularType> types;

  bool isDeclared(const std::string& name) const {
    return types.count(name) != 0;
  }
  static bool isNum(const std::string& name) { return name == "num"; }
};

// A regular type annotated with one (lower, upper) size-bound variable
// pair per recursive position and per primitive leaf, e.g.
// listnum^(s1,s2)(num^(s3,s4)).
struct SizedSchema {
  struct BoundPair {
    std::string role;  // "length" or "value"
    std::string lowerVar;
    std::string upperVar;
  };

  std::string typeName;
  std::vector<BoundPair> pairs;
  std::string text;
};

// Instantiates the schema with fresh pairwise-distinct variable names.
// Cycles other than a cons tail referring back to the type itself are
// rejected.
SizedSchema deriveSchema(const std::string& typeName, const TypeTable& table);

enum class ArgMode { In, Out };

struct SigArg {
  std::string name;  // doubles as the argument's size-variable name
  ArgMode mode = ArgMode::In;
  std::string typeName;
  SizeMetric metric = SizeMetric::IntValue;
};

// Houses the paper's input/size metadata for one predicate: per argument
// a mode, a regular type, and the size metric measuring it.
struct PredicateSignature {
  std::string predName;
  std::vector<SigArg> args;

  size_t arity() const { return args.size(); }
  std::vector<size_t> inputPositions() const;
  // Defined only when exactly one argument is declared out.
  std::optional<size_t> outputPosition() const;
};

struct SignatureTable {
  TypeTable types;
  std::map<PredId, PredicateSignature> preds;

  const PredicateSignature* find(const PredId& id) const;
};

// Signature file: `%` comments, regular type declarations
//   listnum := [] | [num|listnum].
// and predicate signatures
//   pred append(A: in listnum length, B: in listnum length,
//               C: out listnum length).
// Metrics are value/length/depth and must fit the declared type (value
// needs num, length needs a list type). Throws ParseError / SizedTypeError.
SignatureTable parseSignatures(const std::string& text);

// Size of a ground term under a metric: value -> |integer|, length ->
// number of cons cells along the spine, depth -> term height with leaves
// at 1. Throws SizedTypeError on non-ground terms or a metric/term
// mismatch.
Int sizeOf(const Term& t, SizeMetric metric);

}  // namespace enverify
