#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace enverify {

using Rat = mpq_class;
using Int = mpz_class;

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

// Parses "p", "p/q" or a decimal like "3.25" into an exact rational.
Rat ratFromString(const std::string& text);

// Canonical form: "p" for integers, "p/q" otherwise (q > 0, gcd(p,q)=1).
std::string ratToString(const Rat& value);

Int floorRat(const Rat& value);
Int ceilRat(const Rat& value);

// A rational extended with the two infinities. Arithmetic throws EvalError
// on indeterminate forms (inf - inf, 0 * inf, inf / inf, x / 0).
class ExtRat {
 public:
  enum class Kind { Finite, PosInf, NegInf };

  ExtRat() : kind_(Kind::Finite), value_(0) {}
  ExtRat(Rat v) : kind_(Kind::Finite), value_(std::move(v)) {}
  ExtRat(int v) : kind_(Kind::Finite), value_(v) {}
  ExtRat(const Int& v) : kind_(Kind::Finite), value_(v) {}

  static ExtRat posInf();
  static ExtRat negInf();

  Kind kind() const { return kind_; }
  bool finite() const { return kind_ == Kind::Finite; }
  const Rat& value() const;

  int sign() const;

  friend ExtRat operator-(const ExtRat& a);
  friend ExtRat operator+(const ExtRat& a, const ExtRat& b);
  friend ExtRat operator-(const ExtRat& a, const ExtRat& b);
  friend ExtRat operator*(const ExtRat& a, const ExtRat& b);
  friend ExtRat operator/(const ExtRat& a, const ExtRat& b);

  friend bool operator==(const ExtRat& a, const ExtRat& b);
  friend bool operator!=(const ExtRat& a, const ExtRat& b) { return !(a == b); }
  friend bool operator<(const ExtRat& a, const ExtRat& b);
  friend bool operator<=(const ExtRat& a, const ExtRat& b);
  friend bool operator>(const ExtRat& a, const ExtRat& b) { return b < a; }
  friend bool operator>=(const ExtRat& a, const ExtRat& b) { return b <= a; }

 private:
  Kind kind_;
  Rat value_;
};

std::string extToString(const ExtRat& value);
std::ostream& operator<<(std::ostream& os, const ExtRat& value);

// Directed enclosure [lo, hi] with exact rational endpoints. Exact values are
// represented as point enclosures; only radicals and logarithms introduce
// nonzero width. Interval arithmetic here never rounds, so widths only grow
// by combination of inexact sources.
struct Enclosure {
  ExtRat lo;
  ExtRat hi;

  Enclosure() = default;
  Enclosure(ExtRat l, ExtRat h);
  static Enclosure point(ExtRat v);

  bool exact() const { return lo == hi; }
  bool finite() const { return lo.finite() && hi.finite(); }
  Rat width() const;
  Rat midpoint() const;

  // Sign of every value in the enclosure, or nullopt if it straddles zero.
  std::optional<int> sign() const;

  friend Enclosure operator-(const Enclosure& a);
  friend Enclosure operator+(const Enclosure& a, const Enclosure& b);
  friend Enclosure operator-(const Enclosure& a, const Enclosure& b);
  friend Enclosure operator*(const Enclosure& a, const Enclosure& b);
  friend Enclosure operator/(const Enclosure& a, const Enclosure& b);
};

// Exact n-th root if the radicand is a perfect n-th power, else nullopt.
std::optional<Rat> exactRootN(const Rat& x, unsigned long n);

// Directed enclosures with relative width <= 2^-64. encloseSqrt/encloseRootN
// require x >= 0 for even n; encloseCbrt accepts any sign; encloseLn and
// encloseLog2 require x > 0.
Enclosure encloseSqrt(const Rat& x);
Enclosure encloseCbrt(const Rat& x);
Enclosure encloseRootN(const Rat& x, unsigned long n);
Enclosure encloseLn(const Rat& x);
Enclosure encloseLog2(const Rat& x);
Enclosure encloseExp(const Rat& x);

// Enclosure of b^e for rational b > 0 and rational exponent. Exact when the
// result is rational (integer exponents, or perfect roots).
Enclosure enclosePow(const Rat& base, const Rat& exponent);

// Exact b^k for integer k (k < 0 requires b != 0).
Rat powRat(const Rat& base, long k);

}  // namespace enverify
