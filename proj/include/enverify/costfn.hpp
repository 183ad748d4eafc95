#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "enverify/expr.hpp"
#include "enverify/rational.hpp"

namespace enverify {

// Conjunction of per-variable closed integer intervals over the size
// domain. Variables absent from the map range over all of [0, inf).
struct DomainSet {
  struct Range {
    Int lo = 0;
    std::optional<Int> hi;  // nullopt: unbounded above

    bool contains(const Int& v) const {
      return v >= lo && (!hi || v <= *hi);
    }
    bool empty() const { return hi && *hi < lo; }
    friend bool operator==(const Range& a, const Range& b) {
      return a.lo == b.lo && a.hi == b.hi;
    }
  };

  std::map<std::string, Range> ranges;

  Range rangeOf(const std::string& var) const;
  void restrict(const std::string& var, const Range& r);
  bool contains(const std::map<std::string, Int>& point) const;
  bool empty() const;
  friend DomainSet intersect(const DomainSet& a, const DomainSet& b);
  friend bool operator==(const DomainSet& a, const DomainSet& b) {
    return a.ranges == b.ranges;
  }
};

std::string domainToString(const DomainSet& d);

// A resource-bound function: an expression over named size variables,
// restricted to a domain.
struct BoundFn {
  ExprPtr expr;
  std::vector<std::string> vars;
  DomainSet domain;
};

// Checked constructor: free variables of the expression must be covered by
// the declared variable list.
BoundFn makeBoundFn(ExprPtr expr, std::vector<std::string> vars,
                    DomainSet domain = {});

struct IntervalFn {
  BoundFn lower;
  BoundFn upper;
};

struct EvalEnv {
  std::map<std::string, ExtRat> vars;
  // Element bounds for arrays referenced via min()/max().
  std::map<std::string, ExtRat> arrayMin;
  std::map<std::string, ExtRat> arrayMax;
};

// Evaluates over the extended rationals. Exact (point enclosure) unless the
// expression takes an irrational radical or logarithm, in which case the
// result is a directed enclosure with relative width <= 2^-64. Throws
// EvalError on unbound variables, indeterminate forms, division by zero,
// and domain violations (log of a non-positive value, even root of a
// negative one).
Enclosure eval(const Expr& e, const EvalEnv& env);

// eval at an integer point of the size domain.
Enclosure evalAtPoint(const BoundFn& f, const std::map<std::string, Int>& pt);

// Polynomial normal form: expands products of sums, collects terms over
// exact rational coefficients, orders monomials graded-lexicographically,
// and closes constant-bound and Faulhaber-closable summations.
// Non-polynomial subexpressions pass through structurally intact. Never
// throws on shape; idempotent. Expressions containing the infinities are
// returned unchanged.
ExprPtr normalize(const ExprPtr& e);

// Pointwise difference a - b as a normalized BoundFn on the intersected
// domain. Variable lists must agree on shared names; throws
// std::invalid_argument if the intersected domain is empty.
BoundFn subtract(const BoundFn& a, const BoundFn& b);

enum class FunctionClass {
  Constant,
  Polynomial,
  Exponential,
  Logarithmic,
  Mixed,
  Unsupported,
};

struct Classification {
  FunctionClass cls = FunctionClass::Unsupported;
  unsigned degree = 0;  // polynomial part
};

std::string functionClassName(FunctionClass c);

// Classifies a normalized expression. Exponential means some power(c, e)
// atom with constant c > 1 and variable exponent; logarithmic means a log
// atom over a variable argument; mixtures of those with polynomials are
// Mixed. Residual atoms (symbolic sums/products, divisions by variables,
// array refs) make it Unsupported.
Classification classify(const ExprPtr& normalized);

// Truncated series for exponential atoms: power(a, u) with constant
// rational a > 1 and u linear in one variable expands to
// sum_{k<=order} (u ln a)^k / k! with midpoint-rational ln a. The result
// seeds numeric root isolation only; sound sign decisions re-evaluate the
// original expression exactly. Non-exponential parts pass through.
ExprPtr taylorExpand(const ExprPtr& e, unsigned order);

// Same expansion for the natural exponential e^u (ln a = 1 exactly).
ExprPtr taylorExpandNaturalExp(const ExprPtr& exponent, unsigned order);

const Int& factorial(unsigned n);

}  // namespace enverify
