#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "enverify/expr.hpp"

namespace enverify {

// Multivariate polynomial layer behind normalize(). Generators are size
// variables plus opaque atoms (non-polynomial subexpressions such as
// power(2, N) or log(2, N), keyed by their canonical rendering, already
// normalized inside). Coefficients are exact rationals.

struct Monomial {
  // (generator key, exponent), sorted by key, exponents >= 1. Empty means
  // the constant monomial.
  std::vector<std::pair<std::string, unsigned>> factors;

  unsigned totalDegree() const;
  unsigned degreeIn(const std::string& gen) const;
  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.factors == b.factors;
  }
};

// Descending graded-lexicographic order, so map iteration is print order:
// higher total degree first, ties by exponent vector lexicographically.
struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class Poly {
 public:
  Poly() = default;

  static Poly constant(Rat c);
  static Poly variable(const std::string& name);
  static Poly atom(const ExprPtr& normalizedAtom);

  bool isZero() const { return terms_.empty(); }
  bool isConstant() const;
  const Rat& constantValue() const;  // pre: isConstant()
  bool hasAtoms() const { return !atoms_.empty(); }
  unsigned degree() const;
  unsigned degreeIn(const std::string& gen) const;

  Poly operator-() const;
  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scale(const Rat& c) const;
  Poly pow(unsigned k) const;

  const std::map<Monomial, Rat, MonomialOrder>& terms() const {
    return terms_;
  }
  const std::map<std::string, ExprPtr>& atoms() const { return atoms_; }

  // Canonical expression: terms in descending graded-lex order, negative
  // coefficients folded into binary minus.
  ExprPtr toExpr() const;

  // Dense coefficients by degree when the polynomial is univariate in `var`
  // and atom-free; nullopt otherwise.
  std::optional<std::vector<Rat>> univariateIn(const std::string& var) const;

 private:
  void addTerm(Monomial m, Rat c);
  void mergeAtomsFrom(const Poly& other);

  std::map<Monomial, Rat, MonomialOrder> terms_;
  std::map<std::string, ExprPtr> atoms_;
};

// Expr -> Poly. Non-polynomial subterms become atoms; constant-bound sums
// and products expand; symbolic-bound sums with polynomial bodies of index
// degree <= 3 close via the Faulhaber identities. Never throws on shape:
// anything unhandled lands in an atom.
Poly polyFromExpr(const ExprPtr& e);

// Univariate dense polynomials, coefficient of x^i at index i.
using UPoly = std::vector<Rat>;

UPoly upTrim(UPoly p);
int upDegree(const UPoly& p);  // -1 for the zero polynomial
Rat upEval(const UPoly& p, const Rat& x);
UPoly upAdd(const UPoly& a, const UPoly& b);
UPoly upSub(const UPoly& a, const UPoly& b);
UPoly upMul(const UPoly& a, const UPoly& b);
UPoly upScale(const UPoly& p, const Rat& c);
UPoly upDerivative(const UPoly& p);
// Quotient and remainder; divisor must be nonzero.
std::pair<UPoly, UPoly> upDivRem(const UPoly& a, const UPoly& b);
UPoly upGcd(UPoly a, UPoly b);  // monic
UPoly upSquareFreePart(const UPoly& p);
// Every real root r of p satisfies |r| <= bound (Cauchy bound).
Rat upCauchyBound(const UPoly& p);

// Sum of i^k for i in 1..m as a polynomial in m, k <= 3.
const UPoly& faulhaber(unsigned k);

}  // namespace enverify
