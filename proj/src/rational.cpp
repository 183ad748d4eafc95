#include "enverify/rational.hpp"

#include <ostream>

namespace enverify {

namespace {

// 2^-64, the relative width target for inexact enclosures.
const Rat& relTolerance() {
  static const Rat tol = Rat(1) / (Rat(Int(1) << 64));
  return tol;
}

}  // namespace

Rat ratFromString(const std::string& text) {
  std::string s = text;
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    size_t frac = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+")
      throw std::invalid_argument("bad rational literal: " + text);
    Int num(digits, 10);
    Int den(1);
    for (size_t i = 0; i < frac; ++i) den *= 10;
    Rat q(num, den);
    q.canonicalize();
    return q;
  }
  Rat q;
  if (q.set_str(s, 10) != 0)
    throw std::invalid_argument("bad rational literal: " + text);
  if (q.get_den() == 0)
    throw std::invalid_argument("zero denominator in literal: " + text);
  q.canonicalize();
  return q;
}

std::string ratToString(const Rat& value) {
  Rat c = value;
  c.canonicalize();
  return c.get_str();
}

Int floorRat(const Rat& value) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), value.get_num().get_mpz_t(),
             value.get_den().get_mpz_t());
  return q;
}

Int ceilRat(const Rat& value) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), value.get_num().get_mpz_t(),
             value.get_den().get_mpz_t());
  return q;
}

ExtRat ExtRat::posInf() {
  ExtRat r;
  r.kind_ = Kind::PosInf;
  return r;
}

ExtRat ExtRat::negInf() {
  ExtRat r;
  r.kind_ = Kind::NegInf;
  return r;
}

const Rat& ExtRat::value() const {
  if (!finite()) throw EvalError("infinite value has no rational part");
  return value_;
}

int ExtRat::sign() const {
  switch (kind_) {
    case Kind::PosInf:
      return 1;
    case Kind::NegInf:
      return -1;
    case Kind::Finite:
      return sgn(value_);
  }
  return 0;
}

ExtRat operator-(const ExtRat& a) {
  switch (a.kind_) {
    case ExtRat::Kind::PosInf:
      return ExtRat::negInf();
    case ExtRat::Kind::NegInf:
      return ExtRat::posInf();
    case ExtRat::Kind::Finite:
      return ExtRat(Rat(-a.value_));
  }
  return ExtRat();
}

ExtRat operator+(const ExtRat& a, const ExtRat& b) {
  if (a.finite() && b.finite()) return ExtRat(Rat(a.value_ + b.value_));
  if (a.finite()) return b;
  if (b.finite()) return a;
  if (a.kind_ == b.kind_) return a;
  throw EvalError("indeterminate form inf - inf");
}

ExtRat operator-(const ExtRat& a, const ExtRat& b) {
  return a + (-b);
}

ExtRat operator*(const ExtRat& a, const ExtRat& b) {
  if (a.finite() && b.finite()) return ExtRat(Rat(a.value_ * b.value_));
  int sa = a.sign();
  int sb = b.sign();
  if (sa == 0 || sb == 0) throw EvalError("indeterminate form 0 * inf");
  return sa * sb > 0 ? ExtRat::posInf() : ExtRat::negInf();
}

ExtRat operator/(const ExtRat& a, const ExtRat& b) {
  if (!a.finite() && !b.finite())
    throw EvalError("indeterminate form inf / inf");
  if (b.finite()) {
    if (sgn(b.value_) == 0) throw EvalError("division by zero");
    if (a.finite()) return ExtRat(Rat(a.value_ / b.value_));
    return a.sign() * b.sign() > 0 ? ExtRat::posInf() : ExtRat::negInf();
  }
  return ExtRat(Rat(0));
}

bool operator==(const ExtRat& a, const ExtRat& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ != ExtRat::Kind::Finite) return true;
  return a.value_ == b.value_;
}

bool operator<(const ExtRat& a, const ExtRat& b) {
  if (a.kind_ == ExtRat::Kind::NegInf) return b.kind_ != ExtRat::Kind::NegInf;
  if (a.kind_ == ExtRat::Kind::PosInf) return false;
  if (b.kind_ == ExtRat::Kind::PosInf) return true;
  if (b.kind_ == ExtRat::Kind::NegInf) return false;
  return a.value_ < b.value_;
}

bool operator<=(const ExtRat& a, const ExtRat& b) {
  return a < b || a == b;
}

std::string extToString(const ExtRat& value) {
  switch (value.kind()) {
    case ExtRat::Kind::PosInf:
      return "inf";
    case ExtRat::Kind::NegInf:
      return "-inf";
    case ExtRat::Kind::Finite:
      return ratToString(value.value());
  }
  return "";
}

std::ostream& operator<<(std::ostream& os, const ExtRat& value) {
  return os << extToString(value);
}

Enclosure::Enclosure(ExtRat l, ExtRat h) : lo(std::move(l)), hi(std::move(h)) {
  if (hi < lo) throw EvalError("inverted enclosure");
}

Enclosure Enclosure::point(ExtRat v) {
  Enclosure e;
  e.lo = v;
  e.hi = std::move(v);
  return e;
}

Rat Enclosure::width() const {
  if (!finite()) throw EvalError("infinite enclosure has no width");
  return hi.value() - lo.value();
}

Rat Enclosure::midpoint() const {
  if (!finite()) throw EvalError("infinite enclosure has no midpoint");
  return (lo.value() + hi.value()) / 2;
}

std::optional<int> Enclosure::sign() const {
  if (lo.sign() > 0) return 1;
  if (hi.sign() < 0) return -1;
  if (lo.sign() == 0 && hi.sign() == 0) return 0;
  return std::nullopt;
}

Enclosure operator-(const Enclosure& a) {
  return Enclosure(-a.hi, -a.lo);
}

Enclosure operator+(const Enclosure& a, const Enclosure& b) {
  return Enclosure(a.lo + b.lo, a.hi + b.hi);
}

Enclosure operator-(const Enclosure& a, const Enclosure& b) {
  return a + (-b);
}

Enclosure operator*(const Enclosure& a, const Enclosure& b) {
  // 0 * inf corners of half-infinite enclosures resolve to 0 here: the
  // finite endpoint 0 bounds the product on that side.
  auto corner = [](const ExtRat& x, const ExtRat& y) -> ExtRat {
    if ((x.sign() == 0 && !y.finite()) || (y.sign() == 0 && !x.finite()))
      return ExtRat(Rat(0));
    return x * y;
  };
  ExtRat c1 = corner(a.lo, b.lo);
  ExtRat c2 = corner(a.lo, b.hi);
  ExtRat c3 = corner(a.hi, b.lo);
  ExtRat c4 = corner(a.hi, b.hi);
  ExtRat lo = c1, hi = c1;
  for (const ExtRat& c : {c2, c3, c4}) {
    if (c < lo) lo = c;
    if (hi < c) hi = c;
  }
  return Enclosure(lo, hi);
}

Enclosure operator/(const Enclosure& a, const Enclosure& b) {
  if (b.lo.sign() <= 0 && b.hi.sign() >= 0)
    throw EvalError("division by an enclosure containing zero");
  auto inv = [](const ExtRat& x) -> ExtRat {
    return x.finite() ? ExtRat(Rat(1)) / x : ExtRat(Rat(0));
  };
  return a * Enclosure(inv(b.hi), inv(b.lo));
}

std::optional<Rat> exactRootN(const Rat& x, unsigned long n) {
  if (n == 0) throw EvalError("zeroth root");
  if (sgn(x) < 0 && n % 2 == 0) return std::nullopt;
  Int num = x.get_num();
  Int den = x.get_den();
  Int rn, rd;
  bool numExact = mpz_root(rn.get_mpz_t(), num.get_mpz_t(), n) != 0;
  bool denExact = mpz_root(rd.get_mpz_t(), den.get_mpz_t(), n) != 0;
  if (!numExact || !denExact) return std::nullopt;
  Rat r(rn, rd);
  r.canonicalize();
  return r;
}

namespace {

// Upper-bound seed for the n-th root of a positive rational, within a small
// constant factor: ceil-root of the numerator over floor-root of the
// denominator.
Rat rootSeedUpper(const Rat& x, unsigned long n) {
  Int rn, rd;
  mpz_root(rn.get_mpz_t(), x.get_num().get_mpz_t(), n);
  mpz_root(rd.get_mpz_t(), x.get_den().get_mpz_t(), n);
  rn += 1;
  if (rd == 0) rd = 1;
  Rat seed(rn, rd);
  seed.canonicalize();
  return seed;
}

// Newton iteration for the n-th root of q > 0, descending from an upper
// seed. Each step stays above the root; the returned pair is a valid
// [q/x^(n-1), x] bracket with relative width <= relTolerance().
Enclosure rootNewton(const Rat& q, unsigned long n) {
  Rat x = rootSeedUpper(q, n);
  const Rat& tol = relTolerance();
  for (int iter = 0; iter < 512; ++iter) {
    Rat xPow = powRat(x, static_cast<long>(n - 1));
    Rat lo = q / xPow;
    if (x - lo <= tol * lo) return Enclosure(ExtRat(lo), ExtRat(x));
    x = (Rat(static_cast<long>(n - 1)) * x + lo) / Rat(static_cast<long>(n));
  }
  throw EvalError("root enclosure did not converge");
}

}  // namespace

Rat powRat(const Rat& base, long k) {
  if (k == 0) return Rat(1);
  bool neg = k < 0;
  unsigned long e = neg ? static_cast<unsigned long>(-k)
                        : static_cast<unsigned long>(k);
  Int num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), e);
  if (neg) {
    if (num == 0) throw EvalError("negative power of zero");
    std::swap(num, den);
  }
  Rat r(num, den);
  r.canonicalize();
  return r;
}

Enclosure encloseRootN(const Rat& x, unsigned long n) {
  if (n == 0) throw EvalError("zeroth root");
  if (n > 1000) throw EvalError("root index too large");
  int sx = sgn(x);
  if (sx == 0) return Enclosure::point(ExtRat(Rat(0)));
  if (sx < 0) {
    if (n % 2 == 0) throw EvalError("even root of a negative value");
    Enclosure pos = encloseRootN(Rat(-x), n);
    return -pos;
  }
  if (auto exact = exactRootN(x, n)) return Enclosure::point(ExtRat(*exact));
  return rootNewton(x, n);
}

Enclosure encloseSqrt(const Rat& x) {
  if (sgn(x) < 0) throw EvalError("square root of a negative value");
  return encloseRootN(x, 2);
}

Enclosure encloseCbrt(const Rat& x) {
  return encloseRootN(x, 3);
}

namespace {

// atanh series: ln((1+z)/(1-z)) = 2 * sum z^(2k+1)/(2k+1), |z| < 1.
// Returns a directed enclosure with absolute width <= tolAbs; requires
// 0 <= z <= 1/3 so the geometric remainder bound converges fast.
Enclosure lnViaAtanh(const Rat& z, const Rat& tolAbs) {
  if (sgn(z) == 0) return Enclosure::point(ExtRat(Rat(0)));
  Rat z2 = z * z;
  Rat term = z;
  Rat sum = 0;
  unsigned k = 0;
  for (;;) {
    sum += term / Rat(2 * k + 1);
    term *= z2;
    ++k;
    // remainder of 2*sum: 2 * term/(2k+1) * 1/(1-z2) bounds the tail
    Rat rem = 2 * term / (Rat(2 * k + 1) * (Rat(1) - z2));
    if (rem <= tolAbs) {
      Rat lo = 2 * sum;
      return Enclosure(ExtRat(lo), ExtRat(Rat(lo + rem)));
    }
    if (k > 4096) throw EvalError("ln series did not converge");
  }
}

// ln 2 cached to absolute width 2^-160.
const Enclosure& ln2Enclosure() {
  static const Enclosure e = lnViaAtanh(Rat(1, 3),
                                        Rat(1) / Rat(Int(1) << 160));
  return e;
}

// ln of an integer n >= 1: n = 2^k * m with m in [1, 2), ln n = k ln2 + ln m
// where ln m comes from the atanh series at z = (m-1)/(m+1) in [0, 1/3).
Enclosure lnOfInt(const Int& n, const Rat& tolAbs) {
  if (n == 1) return Enclosure::point(ExtRat(Rat(0)));
  size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  long k = static_cast<long>(bits - 1);
  Rat m = Rat(n) / powRat(Rat(2), k);
  Rat z = (m - 1) / (m + 1);
  Enclosure lnM = lnViaAtanh(z, tolAbs);
  Enclosure kLn2 = Enclosure::point(ExtRat(Rat(k))) * ln2Enclosure();
  return kLn2 + lnM;
}

}  // namespace

Enclosure encloseLn(const Rat& x) {
  if (sgn(x) <= 0) throw EvalError("logarithm of a non-positive value");
  if (x == 1) return Enclosure::point(ExtRat(Rat(0)));
  Rat tolAbs = Rat(1) / (Rat(Int(1) << 96));
  Enclosure e = lnOfInt(Int(x.get_num()), tolAbs) -
                lnOfInt(Int(x.get_den()), tolAbs);
  // Components carry absolute width ~2^-96; check the relative target and
  // tighten once if a huge exponent range diluted it.
  Rat mag = abs(e.midpoint());
  if (mag < 1) mag = 1;
  if (e.width() > relTolerance() * mag) {
    Rat fine = Rat(1) / (Rat(Int(1) << 192));
    e = lnOfInt(Int(x.get_num()), fine) - lnOfInt(Int(x.get_den()), fine);
  }
  return e;
}

Enclosure encloseLog2(const Rat& x) {
  if (sgn(x) <= 0) throw EvalError("logarithm of a non-positive value");
  // Exact for powers of two.
  Int num = x.get_num();
  Int den = x.get_den();
  if (num == 1 && mpz_popcount(den.get_mpz_t()) == 1) {
    long k = static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2) - 1);
    return Enclosure::point(ExtRat(Rat(-k)));
  }
  if (den == 1 && mpz_popcount(num.get_mpz_t()) == 1) {
    long k = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2) - 1);
    return Enclosure::point(ExtRat(Rat(k)));
  }
  return encloseLn(x) / ln2Enclosure();
}

namespace {

// Directed dyadic rounding to a fixed number of fractional bits, capping
// operand growth across repeated interval squarings.
Rat dyadicDown(const Rat& x, unsigned bits) {
  Int n = x.get_num() << bits;
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), x.get_den().get_mpz_t());
  Rat r(q, Int(Int(1) << bits));
  r.canonicalize();
  return r;
}

Rat dyadicUp(const Rat& x, unsigned bits) {
  Int n = x.get_num() << bits;
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), n.get_mpz_t(), x.get_den().get_mpz_t());
  Rat r(q, Int(Int(1) << bits));
  r.canonicalize();
  return r;
}

}  // namespace

Enclosure encloseExp(const Rat& x) {
  if (sgn(x) == 0) return Enclosure::point(ExtRat(Rat(1)));
  if (sgn(x) < 0) {
    Enclosure pos = encloseExp(Rat(-x));
    Rat lo = 1 / pos.hi.value();
    Rat hi = 1 / pos.lo.value();
    return Enclosure(ExtRat(std::move(lo)), ExtRat(std::move(hi)));
  }
  if (x > Rat(Int(1) << 16)) throw EvalError("exp argument out of range");
  unsigned halvings = 0;
  Rat r = x;
  while (r > Rat(1, 2)) {
    r /= 2;
    ++halvings;
  }
  // sum r^i/i! with r <= 1/2; the tail after term i is under twice the
  // next term.
  const unsigned kBits = 200;
  Rat tolAbs = Rat(1) / Rat(Int(Int(1) << kBits));
  Rat sum(1), term(1), rem;
  for (unsigned i = 1;; ++i) {
    term *= r;
    term /= Rat(static_cast<unsigned long>(i));
    sum += term;
    rem = 2 * term * r / Rat(static_cast<unsigned long>(i + 1));
    if (rem <= tolAbs) break;
    if (i > 4096) throw EvalError("exp series did not converge");
  }
  Enclosure e(ExtRat(sum), ExtRat(Rat(sum + rem)));
  for (unsigned j = 0; j < halvings; ++j) {
    Rat lo = e.lo.value() * e.lo.value();
    Rat hi = e.hi.value() * e.hi.value();
    e = Enclosure(ExtRat(dyadicDown(lo, kBits)), ExtRat(dyadicUp(hi, kBits)));
  }
  return e;
}

Enclosure enclosePow(const Rat& base, const Rat& exponent) {
  if (sgn(base) <= 0) throw EvalError("power with non-positive base");
  Int expNum = exponent.get_num();
  Int expDen = exponent.get_den();
  if (expDen == 1) {
    if (!expNum.fits_slong_p()) throw EvalError("exponent out of range");
    return Enclosure::point(ExtRat(powRat(base, expNum.get_si())));
  }
  // Split off the integer part; the fractional exponent then lies in (0, 1)
  // and its factor is bounded by the base, whatever the denominator.
  Int w = floorRat(exponent);
  if (!w.fits_slong_p()) throw EvalError("exponent out of range");
  Rat f = exponent - Rat(w);
  Rat whole = powRat(base, w.get_si());
  Int fq = f.get_den();
  // Perfect roots with small indices stay exact.
  if (fq <= 64) {
    long p = f.get_num().get_si();
    if (auto ex = exactRootN(powRat(base, p), fq.get_ui()))
      return Enclosure::point(ExtRat(Rat(whole * *ex)));
  }
  Enclosure t = Enclosure::point(ExtRat(f)) * encloseLn(base);
  Enclosure frac(encloseExp(t.lo.value()).lo, encloseExp(t.hi.value()).hi);
  return Enclosure::point(ExtRat(whole)) * frac;
}

}  // namespace enverify
