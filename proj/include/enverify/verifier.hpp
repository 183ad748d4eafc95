#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "enverify/analysis.hpp"
#include "enverify/assertlang.hpp"
#include "enverify/costfn.hpp"
#include "enverify/costmodel.hpp"
#include "enverify/hcir.hpp"
#include "enverify/sizedtypes.hpp"

namespace enverify {

// Result of comparing one inferred interval against one assertion: a
// partition of the assertion's precondition domain into checked / false /
// check regions (merged maximally, ordered by position).
struct VerificationOutcome {
  struct Verdict {
    DomainSet region;
    Status status = Status::Check;
  };

  InternalAssertion original;
  std::vector<Verdict> verdicts;
  std::vector<std::string> diagnostics;
};

// Partial-correctness comparison. checked where the spec lower bound stays
// at or below the inferred lower AND the inferred upper stays at or below
// the spec upper; false where the inferred interval provably misses the
// spec interval (strict comparisons); check everywhere else, including
// every region the comparison machinery cannot decide and any part of the
// precondition domain outside the inferred bounds' validity.
VerificationOutcome checkAssertion(const IntervalFn& inferred,
                                   const InternalAssertion& spec);

// One assertion per verdict region, with the region rendered into the
// precondition. Regions constraining more than one variable are not
// expressible in the pragma grammar; they are skipped here with a
// diagnostic appended to *skipped (the internal-line form still prints
// them).
std::vector<XCAssertion> splitToAssertions(
    const VerificationOutcome& o, const PredicateSignature& sig,
    std::vector<std::string>* skipped = nullptr);

// Specification file: passthrough lines (blank, // comments) interleaved
// with #pragma assertions and Ciao-style `:- status pred ...` lines.
struct SpecEntry {
  enum class Kind { Passthrough, Pragma, Internal };
  Kind kind = Kind::Passthrough;
  std::string text;  // verbatim line, or the joined assertion text
  int line = 0;
  std::optional<XCAssertion> pragma;
  std::optional<InternalAssertion> internal;
};

struct SpecFile {
  std::vector<SpecEntry> entries;
};

SpecFile parseSpecFile(const std::string& text);

struct SpecResult {
  size_t entryIndex = 0;
  std::string originalText;
  PredId pred;
  std::string resource = "energy";
  Status declaredStatus = Status::Check;
  bool resolved = false;
  // Inferred interval renamed onto the assertion's own argument names;
  // meaningful only when resolved.
  IntervalFn inferred;
  VerificationOutcome outcome;
  // Rendered result assertions, one per verdict, in the original's form.
  std::vector<std::string> resultLines;
  std::optional<std::string> inferredTrueLine;
  std::vector<std::string> diagnostics;
};

struct Report {
  SpecFile file;
  std::vector<SpecResult> specs;  // non-trust assertions, source order
  size_t checkedCount = 0;
  size_t falseCount = 0;
  size_t checkCount = 0;
  bool allVerified = false;
  std::vector<std::string> diagnostics;
};

// Full pipeline over one program: validates against the model (errors
// covered by trust assertions are dropped), builds the trust table,
// runs the analysis once, verifies every assertion in source order, and
// spot-checks each decided region at up to maxSample integer points
// (failures demote the region to check; with a correct comparison stage
// this never fires).
Report verifyProgram(const Program& p, const SignatureTable& sigs,
                     const EnergyModel& model, const SpecFile& specs,
                     long maxSample = 10000);

// Annotated specification output: passthrough lines verbatim, each
// assertion replaced by the inferred-interval `true` assertion (when
// expressible) and its per-region result assertions, with warning comments
// on undecided regions.
std::string renderAnnotatedSpec(const Report& r);

// Machine-readable summary (stable field order, exact decimal endpoints).
std::string renderSummaryJson(const Report& r);

}  // namespace enverify
