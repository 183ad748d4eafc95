#include "enverify/hcir.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <utility>

#include "enverify/costmodel.hpp"
#include "enverify/expr.hpp"

namespace enverify {

namespace {

TermPtr makeTerm(Term&& t) { return std::make_shared<const Term>(std::move(t)); }

constexpr const char* kNilFunctor = "[]";
constexpr const char* kConsFunctor = ".";

}  // namespace

TermPtr Term::var(std::string name) {
  Term t;
  t.kind = TermKind::Var;
  t.name = std::move(name);
  return makeTerm(std::move(t));
}

TermPtr Term::intConst(Int v) {
  Term t;
  t.kind = TermKind::IntConst;
  t.value = std::move(v);
  return makeTerm(std::move(t));
}

TermPtr Term::compound(std::string functor, std::vector<TermPtr> args) {
  Term t;
  t.kind = TermKind::Compound;
  t.name = std::move(functor);
  t.args = std::move(args);
  return makeTerm(std::move(t));
}

TermPtr Term::nil() { return compound(kNilFunctor, {}); }

TermPtr Term::cons(TermPtr head, TermPtr tail) {
  return compound(kConsFunctor, {std::move(head), std::move(tail)});
}

bool isNil(const Term& t) {
  return t.kind == TermKind::Compound && t.name == kNilFunctor &&
         t.args.empty();
}

bool isCons(const Term& t) {
  return t.kind == TermKind::Compound && t.name == kConsFunctor &&
         t.args.size() == 2;
}

bool termEqual(const Term& a, const Term& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case TermKind::Var:
      return a.name == b.name;
    case TermKind::IntConst:
      return a.value == b.value;
    case TermKind::Compound:
      if (a.name != b.name || a.args.size() != b.args.size()) return false;
      for (size_t i = 0; i < a.args.size(); ++i)
        if (!termEqual(*a.args[i], *b.args[i])) return false;
      return true;
  }
  return false;
}

namespace {

bool isArithFunctor(const Term& t) {
  if (t.kind != TermKind::Compound) return false;
  if (t.args.size() == 2)
    return t.name == "+" || t.name == "-" || t.name == "*";
  if (t.args.size() == 1) return t.name == "-";
  return false;
}

void printTerm(std::ostringstream& os, const Term& t);

// Operator terms from is/2 right-hand sides. Additive level 0,
// multiplicative 1, atoms 2; parenthesize when a child binds looser than
// its context requires.
void printArith(std::ostringstream& os, const Term& t, int minLevel) {
  if (t.kind == TermKind::Compound && t.args.size() == 1 && t.name == "-") {
    if (minLevel > 1) os << '(';
    os << '-';
    printArith(os, *t.args[0], 2);
    if (minLevel > 1) os << ')';
    return;
  }
  if (isArithFunctor(t)) {
    int level = t.name == "*" ? 1 : 0;
    if (level < minLevel) os << '(';
    printArith(os, *t.args[0], level);
    os << ' ' << t.name << ' ';
    printArith(os, *t.args[1], level + 1);
    if (level < minLevel) os << ')';
    return;
  }
  if (t.kind == TermKind::IntConst && t.value < 0) {
    if (minLevel > 1) {
      os << '(' << t.value.get_str() << ')';
      return;
    }
  }
  printTerm(os, t);
}

void printTerm(std::ostringstream& os, const Term& t) {
  switch (t.kind) {
    case TermKind::Var:
      os << t.name;
      return;
    case TermKind::IntConst:
      os << t.value.get_str();
      return;
    case TermKind::Compound:
      break;
  }
  if (isNil(t)) {
    os << "[]";
    return;
  }
  if (isCons(t)) {
    os << '[';
    printTerm(os, *t.args[0]);
    const Term* tail = t.args[1].get();
    while (isCons(*tail)) {
      os << ',';
      printTerm(os, *tail->args[0]);
      tail = tail->args[1].get();
    }
    if (!isNil(*tail)) {
      os << '|';
      printTerm(os, *tail);
    }
    os << ']';
    return;
  }
  os << t.name;
  if (!t.args.empty()) {
    os << '(';
    for (size_t i = 0; i < t.args.size(); ++i) {
      if (i) os << ',';
      printTerm(os, *t.args[i]);
    }
    os << ')';
  }
}

}  // namespace

std::string termToString(const Term& t) {
  std::ostringstream os;
  printTerm(os, t);
  return os.str();
}

bool isBuiltinName(const std::string& name, size_t arity) {
  if (arity != 2) return false;
  return name == "is" || name == "=<" || name == "<" || name == ">" ||
         name == ">=" || name == "=" || name == "==";
}

bool isComparisonBuiltin(const std::string& name) {
  return name == "=<" || name == "<" || name == ">" || name == ">=" ||
         name == "==";
}

std::string predIdToString(const PredId& id) {
  return id.name + "/" + std::to_string(id.arity);
}

const std::vector<Clause>* Program::clausesOf(const PredId& id) const {
  auto it = predicates.find(id);
  return it == predicates.end() ? nullptr : &it->second;
}

namespace {

struct HcToken {
  enum class Kind { Atom, Var, Integer, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  Int value;
  int line = 1;
  int column = 1;
};

class HcLexer {
 public:
  explicit HcLexer(const std::string& text) : text_(text) { advance(); }

  const HcToken& peek() const { return current_; }

  HcToken take() {
    HcToken t = current_;
    advance();
    return t;
  }

  bool tryPunct(const std::string& p) {
    if (current_.kind == HcToken::Kind::Punct && current_.text == p) {
      advance();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& message) const {
    std::ostringstream os;
    os << "line " << current_.line << ", column " << current_.column << ": "
       << message;
    if (current_.kind != HcToken::Kind::End)
      os << " (at '" << current_.text << "')";
    else
      os << " (at end of input)";
    throw ParseError(os.str());
  }

  void expectPunct(const std::string& p) {
    if (!tryPunct(p)) fail("expected '" + p + "'");
  }

 private:
  void advance() {
    for (;;) {
      while (pos_ < text_.size() && isSpace(text_[pos_])) bump();
      if (pos_ < text_.size() && text_[pos_] == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
        continue;
      }
      break;
    }
    current_.line = line_;
    current_.column = column_;
    if (pos_ >= text_.size()) {
      current_.kind = HcToken::Kind::End;
      current_.text.clear();
      return;
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits += text_[pos_];
        bump();
      }
      current_.kind = HcToken::Kind::Integer;
      current_.text = digits;
      current_.value = Int(digits);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        word += text_[pos_];
        bump();
      }
      bool variable = std::isupper(static_cast<unsigned char>(word[0])) ||
                      word[0] == '_';
      current_.kind = variable ? HcToken::Kind::Var : HcToken::Kind::Atom;
      current_.text = word;
      return;
    }
    for (const char* op : {":-", "=<", ">=", "=="}) {
      size_t len = 2;
      if (text_.compare(pos_, len, op) == 0) {
        current_.kind = HcToken::Kind::Punct;
        current_.text = op;
        bump();
        bump();
        return;
      }
    }
    current_.kind = HcToken::Kind::Punct;
    current_.text = std::string(1, c);
    bump();
  }

  static bool isSpace(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  HcToken current_;
};

class ProgramParser {
 public:
  explicit ProgramParser(const std::string& text) : lex_(text) {}

  Program parse() {
    Program p;
    bool haveLast = false;
    PredId lastPred;
    while (lex_.peek().kind != HcToken::Kind::End) {
      if (lex_.tryPunct(":-")) {
        parseDirective(p);
        continue;
      }
      Clause c = parseClause();
      PredId id{c.predName, c.headArgs.size()};
      auto it = p.predicates.find(id);
      if (it == p.predicates.end()) {
        p.order.push_back(id);
        it = p.predicates.emplace(id, std::vector<Clause>{}).first;
      } else if (haveLast && !(lastPred == id)) {
        p.warnings.push_back("line " + std::to_string(c.line) +
                             ": clauses for " + predIdToString(id) +
                             " are not contiguous");
      }
      it->second.push_back(std::move(c));
      lastPred = id;
      haveLast = true;
    }
    return p;
  }

 private:
  void parseDirective(Program& p) {
    const HcToken& t = lex_.peek();
    if (t.kind != HcToken::Kind::Atom || t.text != "entry")
      lex_.fail("expected 'entry' directive");
    lex_.take();
    lex_.expectPunct("(");
    HcToken name = lex_.take();
    if (name.kind != HcToken::Kind::Atom)
      lex_.fail("expected predicate name in entry directive");
    lex_.expectPunct("/");
    HcToken arity = lex_.take();
    if (arity.kind != HcToken::Kind::Integer)
      lex_.fail("expected arity in entry directive");
    lex_.expectPunct(")");
    expectClauseEnd();
    p.entries.push_back(
        PredId{name.text, static_cast<size_t>(arity.value.get_ui())});
  }

  Clause parseClause() {
    const HcToken& head = lex_.peek();
    if (head.kind != HcToken::Kind::Atom)
      lex_.fail("expected clause head");
    Clause c;
    c.line = head.line;
    c.predName = lex_.take().text;
    if (lex_.tryPunct("(")) {
      do {
        c.headArgs.push_back(parseTerm());
      } while (lex_.tryPunct(","));
      lex_.expectPunct(")");
    }
    if (lex_.tryPunct(":-")) {
      do {
        c.body.push_back(parseLiteral());
      } while (lex_.tryPunct(","));
    }
    expectClauseEnd();
    return c;
  }

  void expectClauseEnd() {
    if (lex_.peek().kind == HcToken::Kind::End)
      lex_.fail("unterminated clause (missing '.')");
    lex_.expectPunct(".");
  }

  Literal parseLiteral() {
    const HcToken& t = lex_.peek();
    int line = t.line;
    TermPtr lhs = parseTerm();
    const HcToken& op = lex_.peek();
    bool infix = (op.kind == HcToken::Kind::Atom && op.text == "is") ||
                 (op.kind == HcToken::Kind::Punct &&
                  isComparisonBuiltin(op.text)) ||
                 (op.kind == HcToken::Kind::Punct && op.text == "=");
    if (infix) {
      Literal l;
      l.kind = LiteralKind::Builtin;
      l.name = lex_.take().text;
      l.line = line;
      TermPtr rhs = l.name == "is" ? parseArithExpr() : parseTerm();
      l.args = {std::move(lhs), std::move(rhs)};
      return l;
    }
    if (lhs->kind != TermKind::Compound || isNil(*lhs) || isCons(*lhs))
      lex_.fail("expected a call or builtin literal");
    Literal l;
    l.kind = LiteralKind::Call;
    l.name = lhs->name;
    l.args = lhs->args;
    l.line = line;
    return l;
  }

  TermPtr parseTerm() {
    const HcToken& t = lex_.peek();
    switch (t.kind) {
      case HcToken::Kind::Var:
        return Term::var(lex_.take().text);
      case HcToken::Kind::Integer:
        return Term::intConst(lex_.take().value);
      case HcToken::Kind::Atom: {
        std::string functor = lex_.take().text;
        std::vector<TermPtr> args;
        if (lex_.tryPunct("(")) {
          do {
            args.push_back(parseTerm());
          } while (lex_.tryPunct(","));
          lex_.expectPunct(")");
        }
        return Term::compound(std::move(functor), std::move(args));
      }
      case HcToken::Kind::Punct:
        if (t.text == "[") return parseList();
        if (t.text == "-") {
          lex_.take();
          const HcToken& n = lex_.peek();
          if (n.kind != HcToken::Kind::Integer)
            lex_.fail("expected integer after '-'");
          return Term::intConst(-lex_.take().value);
        }
        break;
      case HcToken::Kind::End:
        break;
    }
    lex_.fail("expected a term");
  }

  TermPtr parseList() {
    lex_.expectPunct("[");
    if (lex_.tryPunct("]")) return Term::nil();
    std::vector<TermPtr> elems;
    elems.push_back(parseTerm());
    while (lex_.tryPunct(",")) elems.push_back(parseTerm());
    TermPtr tail = Term::nil();
    if (lex_.tryPunct("|")) tail = parseTerm();
    lex_.expectPunct("]");
    for (auto it = elems.rbegin(); it != elems.rend(); ++it)
      tail = Term::cons(*it, std::move(tail));
    return tail;
  }

  // is/2 right-hand sides: + and - bind loosest, * tighter, unary minus
  // folds into integer literals.
  TermPtr parseArithExpr() {
    TermPtr left = parseArithMult();
    for (;;) {
      if (lex_.tryPunct("+"))
        left = Term::compound("+", {left, parseArithMult()});
      else if (lex_.tryPunct("-"))
        left = Term::compound("-", {left, parseArithMult()});
      else
        return left;
    }
  }

  TermPtr parseArithMult() {
    TermPtr left = parseArithUnary();
    while (lex_.tryPunct("*"))
      left = Term::compound("*", {left, parseArithUnary()});
    return left;
  }

  TermPtr parseArithUnary() {
    if (lex_.tryPunct("-")) {
      TermPtr inner = parseArithUnary();
      if (inner->kind == TermKind::IntConst)
        return Term::intConst(-inner->value);
      return Term::compound("-", {std::move(inner)});
    }
    const HcToken& t = lex_.peek();
    if (t.kind == HcToken::Kind::Integer)
      return Term::intConst(lex_.take().value);
    if (t.kind == HcToken::Kind::Var) return Term::var(lex_.take().text);
    if (lex_.tryPunct("(")) {
      TermPtr e = parseArithExpr();
      lex_.expectPunct(")");
      return e;
    }
    lex_.fail("expected an arithmetic operand");
  }

  HcLexer lex_;
};

}  // namespace

Program parseProgram(const std::string& text) {
  return ProgramParser(text).parse();
}

namespace {

void printLiteral(std::ostringstream& os, const Literal& l) {
  if (l.kind == LiteralKind::Builtin && l.args.size() == 2) {
    printTerm(os, *l.args[0]);
    os << ' ' << l.name << ' ';
    if (l.name == "is")
      printArith(os, *l.args[1], 0);
    else
      printTerm(os, *l.args[1]);
    return;
  }
  os << l.name;
  if (!l.args.empty()) {
    os << '(';
    for (size_t i = 0; i < l.args.size(); ++i) {
      if (i) os << ',';
      printTerm(os, *l.args[i]);
    }
    os << ')';
  }
}

}  // namespace

std::string printProgram(const Program& p) {
  std::ostringstream os;
  for (const PredId& e : p.entries)
    os << ":- entry(" << e.name << '/' << e.arity << ").\n";
  bool firstGroup = p.entries.empty();
  for (const PredId& id : p.order) {
    if (!firstGroup) os << '\n';
    firstGroup = false;
    for (const Clause& c : p.predicates.at(id)) {
      os << c.predName;
      if (!c.headArgs.empty()) {
        os << '(';
        for (size_t i = 0; i < c.headArgs.size(); ++i) {
          if (i) os << ',';
          printTerm(os, *c.headArgs[i]);
        }
        os << ')';
      }
      if (!c.body.empty()) {
        os << " :- ";
        for (size_t i = 0; i < c.body.size(); ++i) {
          if (i) os << ", ";
          printLiteral(os, c.body[i]);
        }
      }
      os << ".\n";
    }
  }
  return os.str();
}

namespace {

bool literalEqual(const Literal& a, const Literal& b) {
  if (a.kind != b.kind || a.name != b.name || a.args.size() != b.args.size())
    return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!termEqual(*a.args[i], *b.args[i])) return false;
  return true;
}

bool clauseEqual(const Clause& a, const Clause& b) {
  if (a.predName != b.predName || a.headArgs.size() != b.headArgs.size() ||
      a.body.size() != b.body.size())
    return false;
  for (size_t i = 0; i < a.headArgs.size(); ++i)
    if (!termEqual(*a.headArgs[i], *b.headArgs[i])) return false;
  for (size_t i = 0; i < a.body.size(); ++i)
    if (!literalEqual(a.body[i], b.body[i])) return false;
  return true;
}

}  // namespace

bool programEqual(const Program& a, const Program& b) {
  if (a.order != b.order || a.entries != b.entries) return false;
  for (const PredId& id : a.order) {
    const auto& ca = a.predicates.at(id);
    const auto* cb = b.clausesOf(id);
    if (!cb || ca.size() != cb->size()) return false;
    for (size_t i = 0; i < ca.size(); ++i)
      if (!clauseEqual(ca[i], (*cb)[i])) return false;
  }
  return true;
}

std::vector<SCC> callGraphSCCs(const Program& p) {
  std::map<PredId, std::set<PredId>> edges;
  for (const auto& [id, clauses] : p.predicates) {
    auto& out = edges[id];
    for (const Clause& c : clauses)
      for (const Literal& l : c.body) {
        if (l.kind != LiteralKind::Call) continue;
        PredId target{l.name, l.args.size()};
        if (p.defines(target)) out.insert(target);
      }
  }

  struct NodeState {
    int index = -1;
    int lowlink = -1;
    bool onStack = false;
  };
  std::map<PredId, NodeState> state;
  std::vector<PredId> stack;
  std::vector<SCC> result;
  int counter = 0;

  // Tarjan; emission order of completed components is callee-first.
  auto strongConnect = [&](auto&& self, const PredId& v) -> void {
    NodeState& sv = state[v];
    sv.index = sv.lowlink = counter++;
    sv.onStack = true;
    stack.push_back(v);
    for (const PredId& w : edges[v]) {
      NodeState& sw = state[w];
      if (sw.index < 0) {
        self(self, w);
        sv.lowlink = std::min(sv.lowlink, state[w].lowlink);
      } else if (sw.onStack) {
        sv.lowlink = std::min(sv.lowlink, sw.index);
      }
    }
    if (sv.lowlink == sv.index) {
      SCC scc;
      for (;;) {
        PredId w = stack.back();
        stack.pop_back();
        state[w].onStack = false;
        scc.members.push_back(w);
        if (w == v) break;
      }
      std::sort(scc.members.begin(), scc.members.end());
      scc.recursive = scc.members.size() > 1 ||
                      edges[scc.members[0]].count(scc.members[0]) > 0;
      result.push_back(std::move(scc));
    }
  };

  for (const PredId& id : p.order)
    if (state[id].index < 0) strongConnect(strongConnect, id);
  return result;
}

std::string diagnosticToString(const Diagnostic& d) {
  std::ostringstream os;
  os << (d.severity == Diagnostic::Severity::Error ? "error" : "warning");
  if (d.line > 0) os << " (line " << d.line << ")";
  os << ": " << d.message;
  return os.str();
}

std::vector<Diagnostic> validate(const Program& p, const EnergyModel& m) {
  std::vector<Diagnostic> out;
  std::set<std::string> definedNames;
  for (const auto& [id, clauses] : p.predicates) definedNames.insert(id.name);

  for (const auto& [id, clauses] : p.predicates) {
    for (const Clause& c : clauses) {
      bool allVars = !c.headArgs.empty();
      std::set<std::string> seen;
      std::string repeated;
      for (const TermPtr& arg : c.headArgs) {
        if (arg->kind != TermKind::Var) {
          allVars = false;
          break;
        }
        if (!seen.insert(arg->name).second && repeated.empty())
          repeated = arg->name;
      }
      if (allVars && !repeated.empty())
        out.push_back({Diagnostic::Severity::Warning,
                       "repeated head parameter " + repeated + " in " +
                           predIdToString(id),
                       c.line});

      for (const Literal& l : c.body) {
        if (l.kind != LiteralKind::Call) continue;
        PredId target{l.name, l.args.size()};
        if (p.defines(target) || m.hasEntry(l.name, l.args.size())) continue;
        if (definedNames.count(l.name) || m.hasName(l.name))
          out.push_back({Diagnostic::Severity::Error,
                         "arity mismatch: no definition of " +
                             predIdToString(target) + " (the name " + l.name +
                             " exists at a different arity)",
                         l.line});
        else
          out.push_back({Diagnostic::Severity::Error,
                         "undefined call target " + predIdToString(target),
                         l.line});
      }
    }
  }
  return out;
}

}  // namespace enverify
