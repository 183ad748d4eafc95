#include "enverify/poly.hpp"

#include <algorithm>

namespace enverify {

unsigned Monomial::totalDegree() const {
  unsigned d = 0;
  for (const auto& [gen, exp] : factors) d += exp;
  return d;
}

unsigned Monomial::degreeIn(const std::string& gen) const {
  for (const auto& [g, exp] : factors)
    if (g == gen) return exp;
  return 0;
}

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
  unsigned da = a.totalDegree();
  unsigned db = b.totalDegree();
  if (da != db) return da > db;
  size_t i = 0, j = 0;
  while (i < a.factors.size() && j < b.factors.size()) {
    if (a.factors[i].first != b.factors[j].first)
      return a.factors[i].first < b.factors[j].first;
    if (a.factors[i].second != b.factors[j].second)
      return a.factors[i].second > b.factors[j].second;
    ++i;
    ++j;
  }
  return i < a.factors.size();
}

Poly Poly::constant(Rat c) {
  Poly p;
  if (sgn(c) != 0) p.terms_.emplace(Monomial{}, std::move(c));
  return p;
}

Poly Poly::variable(const std::string& name) {
  Poly p;
  Monomial m;
  m.factors.emplace_back(name, 1);
  p.terms_.emplace(std::move(m), Rat(1));
  return p;
}

Poly Poly::atom(const ExprPtr& normalizedAtom) {
  Poly p;
  std::string key = render(normalizedAtom);
  Monomial m;
  m.factors.emplace_back(key, 1);
  p.terms_.emplace(std::move(m), Rat(1));
  p.atoms_.emplace(std::move(key), normalizedAtom);
  return p;
}

bool Poly::isConstant() const {
  return terms_.empty() ||
         (terms_.size() == 1 && terms_.begin()->first.factors.empty());
}

const Rat& Poly::constantValue() const {
  static const Rat zero(0);
  if (terms_.empty()) return zero;
  return terms_.begin()->second;
}

unsigned Poly::degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.totalDegree());
  return d;
}

unsigned Poly::degreeIn(const std::string& gen) const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degreeIn(gen));
  return d;
}

void Poly::addTerm(Monomial m, Rat c) {
  if (sgn(c) == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(std::move(m), std::move(c));
    return;
  }
  it->second += c;
  if (sgn(it->second) == 0) terms_.erase(it);
}

void Poly::mergeAtomsFrom(const Poly& other) {
  for (const auto& [key, expr] : other.atoms_) atoms_.emplace(key, expr);
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly r = a;
  r.mergeAtomsFrom(b);
  for (const auto& [m, c] : b.terms_) r.addTerm(m, c);
  // Atoms whose generators cancelled entirely can be dropped.
  return r;
}

Poly operator-(const Poly& a, const Poly& b) {
  return a + (-b);
}

namespace {

Monomial mulMonomials(const Monomial& a, const Monomial& b) {
  Monomial r;
  size_t i = 0, j = 0;
  while (i < a.factors.size() || j < b.factors.size()) {
    if (j >= b.factors.size() ||
        (i < a.factors.size() && a.factors[i].first < b.factors[j].first)) {
      r.factors.push_back(a.factors[i++]);
    } else if (i >= a.factors.size() ||
               b.factors[j].first < a.factors[i].first) {
      r.factors.push_back(b.factors[j++]);
    } else {
      r.factors.emplace_back(a.factors[i].first,
                             a.factors[i].second + b.factors[j].second);
      ++i;
      ++j;
    }
  }
  return r;
}

}  // namespace

Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  r.mergeAtomsFrom(a);
  r.mergeAtomsFrom(b);
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_)
      r.addTerm(mulMonomials(ma, mb), Rat(ca * cb));
  return r;
}

Poly Poly::scale(const Rat& c) const {
  if (sgn(c) == 0) return Poly();
  Poly r = *this;
  for (auto& [m, coeff] : r.terms_) coeff *= c;
  return r;
}

Poly Poly::pow(unsigned k) const {
  if (k == 0) return constant(Rat(1));
  if (terms_.size() == 1) {
    const auto& [m, c] = *terms_.begin();
    Poly r;
    r.atoms_ = atoms_;
    Monomial mk;
    for (const auto& [gen, exp] : m.factors)
      mk.factors.emplace_back(gen, exp * k);
    Rat ck(1);
    for (unsigned i = 0; i < k; ++i) ck *= c;
    r.terms_.emplace(std::move(mk), std::move(ck));
    return r;
  }
  Poly r = constant(Rat(1));
  Poly base = *this;
  unsigned e = k;
  while (e > 0) {
    if (e & 1u) r = r * base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return r;
}

namespace {

ExprPtr genToExpr(const std::string& key,
                  const std::map<std::string, ExprPtr>& atoms) {
  auto it = atoms.find(key);
  if (it != atoms.end()) return it->second;
  return Expr::variable(key);
}

ExprPtr monomialToExpr(const Monomial& m, const Rat& coeff,
                       const std::map<std::string, ExprPtr>& atoms) {
  ExprPtr acc;
  if (coeff != 1 || m.factors.empty()) acc = Expr::constant(coeff);
  for (const auto& [gen, exp] : m.factors) {
    ExprPtr g = genToExpr(gen, atoms);
    if (exp >= 2) g = Expr::power(g, Expr::constant(static_cast<long>(exp)));
    acc = acc ? Expr::mul(acc, g) : g;
  }
  return acc;
}

}  // namespace

ExprPtr Poly::toExpr() const {
  if (terms_.empty()) return Expr::constant(0);
  ExprPtr acc;
  for (const auto& [m, c] : terms_) {
    if (!acc) {
      acc = monomialToExpr(m, c, atoms_);
    } else if (sgn(c) < 0) {
      acc = Expr::sub(acc, monomialToExpr(m, Rat(-c), atoms_));
    } else {
      acc = Expr::add(acc, monomialToExpr(m, c, atoms_));
    }
  }
  return acc;
}

std::optional<std::vector<Rat>> Poly::univariateIn(
    const std::string& var) const {
  if (hasAtoms()) return std::nullopt;
  std::vector<Rat> coeffs;
  for (const auto& [m, c] : terms_) {
    if (m.factors.size() > 1) return std::nullopt;
    unsigned deg = 0;
    if (!m.factors.empty()) {
      if (m.factors[0].first != var) return std::nullopt;
      deg = m.factors[0].second;
    }
    if (coeffs.size() <= deg) coeffs.resize(deg + 1, Rat(0));
    coeffs[deg] = c;
  }
  if (coeffs.empty()) coeffs.push_back(Rat(0));
  return coeffs;
}

namespace {

constexpr unsigned kMaxExpandedPow = 16;
constexpr long kMaxExpandedSumTerms = 4096;
constexpr long kMaxExpandedProdTerms = 64;
constexpr unsigned kMaxFaulhaberDegree = 3;

std::optional<long> constantLong(const Poly& p) {
  if (!p.isConstant()) return std::nullopt;
  const Rat& v = p.constantValue();
  if (v.get_den() != 1) return std::nullopt;
  if (!v.get_num().fits_slong_p()) return std::nullopt;
  return v.get_num().get_si();
}

Poly substituteFaulhaber(const UPoly& closed, const Poly& upper) {
  Poly r;
  for (size_t j = 0; j < closed.size(); ++j) {
    if (sgn(closed[j]) == 0) continue;
    r = r + upper.pow(static_cast<unsigned>(j)).scale(closed[j]);
  }
  return r;
}

// Coefficient polynomials of the body viewed in the index variable:
// body = sum_d coeff[d] * index^d. Requires the body to be atom-free in
// the index (the index may not hide inside an atom).
std::optional<std::vector<Poly>> coeffsInIndex(const Poly& body,
                                               const std::string& index) {
  for (const auto& [key, expr] : body.atoms())
    if (freeVars(*expr).count(index)) return std::nullopt;
  std::vector<Poly> byDeg;
  for (const auto& [m, c] : body.terms()) {
    unsigned d = m.degreeIn(index);
    Monomial rest;
    for (const auto& f : m.factors)
      if (f.first != index) rest.factors.push_back(f);
    if (byDeg.size() <= d) byDeg.resize(d + 1);
    Poly mono = Poly::constant(Rat(1));
    for (const auto& [gen, exp] : rest.factors) {
      Poly g = body.atoms().count(gen) ? Poly::atom(body.atoms().at(gen))
                                       : Poly::variable(gen);
      mono = mono * g.pow(exp);
    }
    byDeg[d] = byDeg[d] + mono.scale(c);
  }
  return byDeg;
}

}  // namespace

Poly polyFromExpr(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Constant:
      return Poly::constant(e->value);
    case ExprKind::Var:
      return Poly::variable(e->name);
    case ExprKind::Add:
      return polyFromExpr(e->a) + polyFromExpr(e->b);
    case ExprKind::Sub:
      return polyFromExpr(e->a) - polyFromExpr(e->b);
    case ExprKind::Mul:
      return polyFromExpr(e->a) * polyFromExpr(e->b);
    case ExprKind::Div: {
      Poly num = polyFromExpr(e->a);
      Poly den = polyFromExpr(e->b);
      if (den.isConstant()) {
        const Rat& c = den.constantValue();
        if (sgn(c) != 0) return num.scale(Rat(1 / c));
        // Degenerate: denominator normalized to zero. Keep the division
        // node intact with the original denominator.
        return Poly::atom(Expr::div(num.toExpr(), e->b));
      }
      return Poly::atom(Expr::div(num.toExpr(), den.toExpr()));
    }
    case ExprKind::Power: {
      Poly base = polyFromExpr(e->a);
      Poly exp = polyFromExpr(e->b);
      if (exp.isConstant()) {
        const Rat& v = exp.constantValue();
        if (v.get_den() == 1 && v >= 0 && v.get_num().fits_ulong_p()) {
          unsigned long k = v.get_num().get_ui();
          if (k <= kMaxExpandedPow ||
              (base.terms().size() <= 1 && k <= kMaxExpandedSumTerms))
            return base.pow(static_cast<unsigned>(k));
        }
      }
      return Poly::atom(Expr::power(base.toExpr(), exp.toExpr()));
    }
    case ExprKind::Log: {
      Poly base = polyFromExpr(e->a);
      Poly arg = polyFromExpr(e->b);
      return Poly::atom(Expr::log(base.toExpr(), arg.toExpr()));
    }
    case ExprKind::Sum:
    case ExprKind::Prod: {
      Poly lo = polyFromExpr(e->a);
      Poly hi = polyFromExpr(e->b);
      Poly body = polyFromExpr(e->body);
      bool isSum = e->kind == ExprKind::Sum;
      auto cLo = constantLong(lo);
      auto cHi = constantLong(hi);
      if (cLo && cHi) {
        long span = *cHi - *cLo + 1;
        long cap = isSum ? kMaxExpandedSumTerms : kMaxExpandedProdTerms;
        if (span <= 0) return Poly::constant(Rat(isSum ? 0 : 1));
        if (span <= cap) {
          Poly acc = Poly::constant(Rat(isSum ? 0 : 1));
          for (long i = *cLo; i <= *cHi; ++i) {
            std::map<std::string, ExprPtr> bind{
                {e->name, Expr::constant(i)}};
            Poly item = polyFromExpr(substitute(e->body, bind));
            acc = isSum ? acc + item : acc * item;
          }
          return acc;
        }
      }
      bool hiCovers = !hi.hasAtoms();
      if (isSum && cLo && hiCovers) {
        // F(up) - F(c-1) is an identity only when up >= c-1; with all size
        // variables nonnegative, an upper bound with nonnegative
        // coefficients and constant part >= c-1 holds that everywhere.
        Rat hiConst(0);
        for (const auto& [mono, coeff] : hi.terms()) {
          if (mono.factors.empty())
            hiConst = coeff;
          else if (sgn(coeff) < 0)
            hiCovers = false;
        }
        if (hiConst < Rat(*cLo) - 1) hiCovers = false;
      }
      if (isSum && cLo && hiCovers) {
        // sum(i, c, up, body) with polynomial body of index degree <= 3
        // closes as F(up) - F(c-1) through the power-sum identities.
        auto byDeg = coeffsInIndex(body, e->name);
        if (byDeg && byDeg->size() <= kMaxFaulhaberDegree + 1) {
          Poly shifted = Poly::constant(Rat(*cLo - 1));
          Poly total;
          for (unsigned d = 0; d < byDeg->size(); ++d) {
            const Poly& coeff = (*byDeg)[d];
            if (coeff.isZero()) continue;
            const UPoly& f = faulhaber(d);
            Poly closedHi = substituteFaulhaber(f, hi);
            Poly closedLo = substituteFaulhaber(f, shifted);
            total = total + coeff * (closedHi - closedLo);
          }
          return total;
        }
      }
      // Rebuild with normalized parts as an opaque atom.
      ExprPtr rebuilt;
      try {
        rebuilt = isSum ? Expr::sum(e->name, lo.toExpr(), hi.toExpr(),
                                    body.toExpr())
                        : Expr::prod(e->name, lo.toExpr(), hi.toExpr(),
                                     body.toExpr());
      } catch (const std::invalid_argument&) {
        rebuilt = e;
      }
      return Poly::atom(rebuilt);
    }
    case ExprKind::ArrayMin:
    case ExprKind::ArrayMax:
    case ExprKind::PosInf:
    case ExprKind::NegInf:
      return Poly::atom(e);
  }
  return Poly::atom(e);
}

UPoly upTrim(UPoly p) {
  while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
  return p;
}

int upDegree(const UPoly& p) {
  for (size_t i = p.size(); i > 0; --i)
    if (sgn(p[i - 1]) != 0) return static_cast<int>(i - 1);
  return -1;
}

Rat upEval(const UPoly& p, const Rat& x) {
  Rat acc(0);
  for (size_t i = p.size(); i > 0; --i) acc = acc * x + p[i - 1];
  return acc;
}

UPoly upAdd(const UPoly& a, const UPoly& b) {
  UPoly r(std::max(a.size(), b.size()), Rat(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return upTrim(std::move(r));
}

UPoly upSub(const UPoly& a, const UPoly& b) {
  UPoly r(std::max(a.size(), b.size()), Rat(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  return upTrim(std::move(r));
}

UPoly upMul(const UPoly& a, const UPoly& b) {
  if (a.empty() || b.empty()) return {};
  UPoly r(a.size() + b.size() - 1, Rat(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return upTrim(std::move(r));
}

UPoly upScale(const UPoly& p, const Rat& c) {
  if (sgn(c) == 0) return {};
  UPoly r = p;
  for (Rat& x : r) x *= c;
  return upTrim(std::move(r));
}

UPoly upDerivative(const UPoly& p) {
  if (p.size() <= 1) return {};
  UPoly r(p.size() - 1);
  for (size_t i = 1; i < p.size(); ++i) r[i - 1] = p[i] * Rat(static_cast<long>(i));
  return upTrim(std::move(r));
}

std::pair<UPoly, UPoly> upDivRem(const UPoly& a, const UPoly& b) {
  UPoly rem = upTrim(a);
  UPoly div = upTrim(b);
  if (div.empty()) throw std::invalid_argument("division by zero polynomial");
  int db = upDegree(div);
  UPoly quot;
  while (true) {
    int dr = upDegree(rem);
    if (dr < db) break;
    Rat factor = rem[dr] / div[db];
    size_t shift = static_cast<size_t>(dr - db);
    if (quot.size() <= shift) quot.resize(shift + 1, Rat(0));
    quot[shift] = factor;
    for (size_t i = 0; i < div.size(); ++i)
      rem[i + shift] -= factor * div[i];
    rem = upTrim(std::move(rem));
  }
  return {upTrim(std::move(quot)), rem};
}

UPoly upGcd(UPoly a, UPoly b) {
  a = upTrim(std::move(a));
  b = upTrim(std::move(b));
  while (!b.empty()) {
    UPoly r = upDivRem(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  int d = upDegree(a);
  if (d >= 0 && a[d] != 1) a = upScale(a, Rat(1 / a[d]));
  return a;
}

UPoly upSquareFreePart(const UPoly& p) {
  UPoly g = upGcd(p, upDerivative(p));
  if (upDegree(g) <= 0) return upTrim(p);
  return upDivRem(p, g).first;
}

Rat upCauchyBound(const UPoly& p) {
  int d = upDegree(p);
  if (d <= 0) return Rat(0);
  Rat maxRatio(0);
  for (int i = 0; i < d; ++i) {
    Rat r = abs(p[i] / p[d]);
    if (r > maxRatio) maxRatio = r;
  }
  return Rat(1) + maxRatio;
}

const UPoly& faulhaber(unsigned k) {
  // index 0: m; 1: m(m+1)/2; 2: m(m+1)(2m+1)/6; 3: (m(m+1)/2)^2
  static const std::vector<UPoly> table = [] {
    std::vector<UPoly> t;
    t.push_back({Rat(0), Rat(1)});
    t.push_back({Rat(0), Rat(1, 2), Rat(1, 2)});
    t.push_back({Rat(0), Rat(1, 6), Rat(1, 2), Rat(1, 3)});
    t.push_back({Rat(0), Rat(0), Rat(1, 4), Rat(1, 2), Rat(1, 4)});
    return t;
  }();
  if (k >= table.size())
    throw std::invalid_argument("power-sum degree out of range");
  return table[k];
}

}  // namespace enverify
