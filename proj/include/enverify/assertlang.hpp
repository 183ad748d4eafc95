#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "enverify/costfn.hpp"
#include "enverify/expr.hpp"
#include "enverify/sizedtypes.hpp"

namespace enverify {

struct AssertionError : std::runtime_error {
  explicit AssertionError(const std::string& what)
      : std::runtime_error(what) {}
};

enum class Status { Check, Trust, True, Checked, False };

std::string statusName(Status s);
std::optional<Status> statusFromName(const std::string& name);

// One #pragma assertion. The precondition constrains a single scope
// identifier from both sides; its ground expressions must not mention any
// scope identifier. Cost bounds are expressions over scope identifiers,
// integers, and min()/max() of scope identifiers.
struct XCAssertion {
  struct Precond {
    std::string id;
    ExprPtr lower;  // lower <= id; null when absent
    ExprPtr upper;  // id <= upper; null when absent
  };

  Status status = Status::Check;
  std::string funcName;
  std::vector<std::string> scopeArgs;
  std::optional<Precond> precond;
  ExprPtr costLower;  // costLower <= energy; null when absent
  ExprPtr costUpper;  // energy <= costUpper; null when absent
};

bool xcEqual(const XCAssertion& a, const XCAssertion& b);

// Parses one assertion, possibly spanning multiple physical lines already
// joined into `text`. A missing status token defaults to check; when the
// token after #pragma is a status word followed by '(', it is read as the
// function name instead. The precondition group and the cost-bounds group
// may each be wrapped in one pair of parentheses, as in the usual
// multi-line layout. Throws ParseError.
XCAssertion parsePragma(const std::string& text);

// Single-line canonical form with parenthesized groups;
// parsePragma(printPragma(a)) structurally equals a.
std::string printPragma(const XCAssertion& a);

// Ciao-style assertion over the HC IR predicate (output argument
// included). Bound expressions range over the input arguments' size
// variables; the size precondition is a conjunction of integer interval
// constraints on them.
struct InternalAssertion {
  struct PatArg {
    std::string name;
    std::string typeName;
    ArgMode mode = ArgMode::In;
    SizeMetric metric = SizeMetric::IntValue;
  };

  PredId pred;
  std::vector<PatArg> callPattern;
  DomainSet sizePrecond;
  std::string resourceName = "energy";
  ExprPtr lower;  // defaults applied: 0
  ExprPtr upper;  // defaults applied: +inf
  Status status = Status::Check;

  std::vector<std::string> inputVars() const;
};

// Translation into the internal form: the predicate gains the output
// argument declared by the signature (arity + 1), scope identifiers name
// the input positions in order, the precondition becomes integer bounds on
// the named argument's size variable, and missing cost bounds default to
// [0, +inf). Throws AssertionError on arity mismatch or unusable
// preconditions.
InternalAssertion toInternal(const XCAssertion& a,
                             const PredicateSignature& sig);

// Inverse of toInternal up to default-bound elision. Only the energy
// resource is expressible as a pragma; multi-variable preconditions and
// bounds mentioning the output are not printable. Throws AssertionError.
XCAssertion fromInternal(const InternalAssertion& a,
                         const PredicateSignature& sig);

// Ciao-style surface form for internal assertions (the only way to state
// bounds on resources other than energy):
//   :- check pred fact(N,Fact) : (1 <= N) + resource(steps, N + 1, N + 1).
// The precondition group is optional; bounds are always explicit, with
// `inf` for an absent upper bound. Types, modes, and metrics are not part
// of the line; resolveAgainstSignature fills them in.
InternalAssertion parseInternalLine(const std::string& text);
std::string printInternalLine(const InternalAssertion& a);

// Copies types/modes/metrics from the signature onto the call pattern and
// checks the assertion against it: argument count, input-only
// precondition variables, bound expressions over input size variables
// only. Throws AssertionError.
void resolveAgainstSignature(InternalAssertion& a,
                             const PredicateSignature& sig);

}  // namespace enverify
