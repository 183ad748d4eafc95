#pragma once

#include <optional>
#include <string>
#include <vector>

#include "enverify/costfn.hpp"

namespace enverify {

struct Root {
  Enclosure value;
  bool exact = false;          // true: point enclosure, exactly a root
  unsigned multiplicity = 1;   // exact via square-free decomposition
};

struct RootsResult {
  enum class Kind { Roots, EverywhereZero, Unsupported };
  Kind kind = Kind::Unsupported;
  std::vector<Root> roots;  // ascending, pairwise disjoint enclosures
  // Integer point up to which the root list is known complete; nullopt
  // means complete on the whole domain. Scan-routed functions (exp/log
  // mixtures) report the guarded prefix here.
  std::optional<Int> completeUpTo;
  std::string note;
};

// Truncation order of the series that seeds the integer-scan horizon for
// exponential/logarithmic mixtures (default 8). Seeding only steers where
// the scan looks; sign decisions stay exact regardless of the order.
unsigned taylorSeedOrder();
void setTaylorSeedOrder(unsigned order);

// All real roots of a univariate bound function over its domain.
// Polynomials take the exact route: square-free (Yun) decomposition, then
// closed formulas for degree <= 2 and derivative-chain isolation with exact
// rational bisection above that; complete for every real root. Exponential
// and logarithmic mixtures take guarded integer scanning seeded by the
// truncated series: exact at every scanned integer, with crossings bracketed
// by rational bisection and the tail accepted only after the doubling
// dominance check. Other shapes return Unsupported.
RootsResult findRoots(const BoundFn& f);

enum class Rel { Lt, Eq, Gt, Unknown };
std::string relName(Rel r);

struct SignRegion {
  Int lo;
  std::optional<Int> hi;  // nullopt: unbounded above
  Rel rel;
};

struct SignPartition {
  std::string var;
  std::vector<SignRegion> regions;  // ordered, disjoint, covering the domain
};

// Which side gives up integers when a boundary cannot be confirmed: the
// favorable region must only ever shrink.
enum class SafeSide { ShrinkLeft, ShrinkRight };

struct SafeAdjustResult {
  enum class Kind { Cut, ExactBoundary, NoTransition, DomainExhausted };
  Kind kind = Kind::DomainExhausted;
  // Cut: last integer of the left region (right region starts at cut + 1),
  // with both neighbor signs confirmed by exact/determined evaluation.
  // ExactBoundary: integer where f is exactly zero.
  Int boundary;
  int leftSign = 0;
  int rightSign = 0;
};

// Resolves one root to an integer boundary. Signs always come from
// evaluation at integers; an approximate root only proposes where to look.
// When a sign cannot be determined (enclosure straddling zero), the cut
// moves one integer at a time toward the safe side until it can be, or the
// domain runs out.
SafeAdjustResult safeAdjust(const BoundFn& f, const Root& root,
                            SafeSide side);

// Sign of f over the integer points of its domain, split at root
// boundaries. Region labels come from exact/determined evaluation;
// integers whose sign cannot be determined become singleton Unknown
// regions, and any stretch beyond the completeness horizon is Unknown.
SignPartition signPartition(const BoundFn& f);

// Pointwise order of a against b on the intersection of their domains:
// signPartition(a - b), with Lt meaning a < b and Gt meaning a > b.
SignPartition compareFns(const BoundFn& a, const BoundFn& b);

// Label of the region containing the given integer point.
Rel relAt(const SignPartition& p, const Int& x);

}  // namespace enverify
