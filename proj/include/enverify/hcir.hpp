#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "enverify/rational.hpp"

namespace enverify {

class EnergyModel;

enum class TermKind { Var, IntConst, Compound };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// First-order term. Lists are nil/cons compounds ("[]"/2-ary "."), produced
// by the bracket syntax and printed back as sugar. Variables are scoped to
// their clause.
struct Term {
  TermKind kind = TermKind::Compound;
  std::string name;  // variable name or compound functor
  Int value;         // IntConst
  std::vector<TermPtr> args;

  static TermPtr var(std::string name);
  static TermPtr intConst(Int v);
  static TermPtr compound(std::string functor, std::vector<TermPtr> args);
  static TermPtr nil();
  static TermPtr cons(TermPtr head, TermPtr tail);
};

bool isNil(const Term& t);
bool isCons(const Term& t);
bool termEqual(const Term& a, const Term& b);
std::string termToString(const Term& t);

enum class LiteralKind { Call, Builtin };

// Body literal: a call to another (or the same) block, or one of the fixed
// builtins {is/2, =</2, </2, >/2, >=/2, =/2, ==/2}. Unknown names are
// calls. Operator expressions appear only as the right argument of is/2,
// encoded as compound terms with functors "+", "-", "*".
struct Literal {
  LiteralKind kind = LiteralKind::Call;
  std::string name;
  std::vector<TermPtr> args;
  int line = 0;
};

bool isBuiltinName(const std::string& name, size_t arity);
bool isComparisonBuiltin(const std::string& name);

struct Clause {
  std::string predName;
  std::vector<TermPtr> headArgs;
  std::vector<Literal> body;
  int line = 0;
};

struct PredId {
  std::string name;
  size_t arity = 0;

  friend bool operator<(const PredId& a, const PredId& b) {
    return a.name != b.name ? a.name < b.name : a.arity < b.arity;
  }
  friend bool operator==(const PredId& a, const PredId& b) {
    return a.name == b.name && a.arity == b.arity;
  }
};

std::string predIdToString(const PredId& id);

// Immutable after parsing. Clause order within a predicate is execution
// order; `order` lists predicates by first appearance.
struct Program {
  std::vector<PredId> order;
  std::map<PredId, std::vector<Clause>> predicates;
  std::vector<PredId> entries;
  std::vector<std::string> warnings;

  const std::vector<Clause>* clausesOf(const PredId& id) const;
  bool defines(const PredId& id) const { return predicates.count(id) != 0; }
};

// Prolog-like clause syntax: `head :- lit, lit.` and facts `head.`;
// `%` starts a line comment; `:- entry(name/arity).` declares an entry
// point. Throws ParseError with line/column on malformed input. Clauses of
// one predicate interleaved with another predicate's are accepted with a
// warning recorded on the program.
Program parseProgram(const std::string& text);

// Canonical text form; parseProgram(printProgram(p)) is structurally
// equal to p.
std::string printProgram(const Program& p);

// Structural equality ignoring source positions and parse warnings.
bool programEqual(const Program& a, const Program& b);

struct SCC {
  std::vector<PredId> members;
  bool recursive = false;
};

// Strongly connected components of the call graph restricted to predicates
// defined in the program, in reverse topological (callee-first) order.
// A singleton is recursive iff it calls itself.
std::vector<SCC> callGraphSCCs(const Program& p);

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;
  int line = 0;
};

std::string diagnosticToString(const Diagnostic& d);

// Reports call targets defined neither in the program nor in the energy
// model, calls whose arity matches no definition of the same name, and
// repeated head parameters. A head counts as a parameter list only when
// every argument is a variable; pattern heads (constants, lists) repeat
// variables to express aliasing and are not flagged.
std::vector<Diagnostic> validate(const Program& p, const EnergyModel& m);

}  // namespace enverify
