#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "enverify/costfn.hpp"
#include "enverify/costmodel.hpp"
#include "enverify/hcir.hpp"
#include "enverify/sizedtypes.hpp"

namespace enverify {

// Univariate recurrence over one strictly decreasing input size. Cases
// carry guard intervals on that variable; other input sizes may appear in
// the additive expressions but stay constant across the recursion.
struct Recurrence {
  struct Case {
    DomainSet guard;  // over var
    unsigned selfCalls = 0;
    Int descent = 1;
    ExprPtr additive;
  };

  std::string var;
  std::vector<Case> cases;
};

struct ClosedForm {
  ExprPtr expr;
  Int validFrom;  // solution holds for var >= validFrom
};

// Exact unrolled value as an expression (other size variables stay
// symbolic); nullopt when no single case covers n.
std::optional<ExprPtr> unrollRecurrence(const Recurrence& r, const Int& n);

// Solves T(n) = a T(n-1) + p(n) with polynomial additive of degree <= 3:
// telescoping with the symbolic summation table for a = 1, exponential
// plus a particular polynomial for integer a >= 2. The result is checked
// against exact unrolling on the first 26 points of its validity range
// (mandatory; failure returns nullopt) and extended downward over base
// points it happens to match. nullopt = unsupported shape, reason in
// *note.
std::optional<ClosedForm> solveRecurrence(const Recurrence& r,
                                          std::string* note = nullptr);

struct PredAnalysis {
  std::vector<std::string> inputVars;  // signature input names, in order
  std::optional<size_t> outPos;
  // Bounds on the output argument's size, as functions of inputVars.
  std::optional<IntervalFn> outputSize;
  // Resource name -> inferred cost interval over inputVars.
  std::map<std::string, IntervalFn> cost;
  bool deterministic = true;
  bool supported = true;
  std::vector<std::string> notes;
};

struct AnalysisResult {
  std::map<PredId, PredAnalysis> preds;
  std::vector<std::string> notes;

  const PredAnalysis* find(const PredId& id) const {
    auto it = preds.find(id);
    return it == preds.end() ? nullptr : &it->second;
  }
};

// Trusted cost intervals, expressed over the predicate's signature input
// names; consulted for callees in place of (absent or partial) analysis
// results.
using TrustTable = std::map<PredId, std::map<std::string, IntervalFn>>;

// Bottom-up inference over the call-graph SCCs. Every predicate with a
// signature gets a `steps` interval and, when the model resolves all its
// leaves, an `energy` interval; predicates the recurrence machinery cannot
// handle yield the sound imprecise interval [0, +inf) with a note.
AnalysisResult analyzeProgram(const Program& p, const SignatureTable& sigs,
                              const EnergyModel& model,
                              const TrustTable& trusts = {});

}  // namespace enverify
