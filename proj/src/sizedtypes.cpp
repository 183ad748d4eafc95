#include "enverify/sizedtypes.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "enverify/expr.hpp"

namespace enverify {

std::string sizeMetricName(SizeMetric m) {
  switch (m) {
    case SizeMetric::IntValue:
      return "value";
    case SizeMetric::ListLength:
      return "length";
    case SizeMetric::TermDepth:
      return "depth";
  }
  return "?";
}

std::vector<size_t> PredicateSignature::inputPositions() const {
  std::vector<size_t> out;
  for (size_t i = 0; i < args.size(); ++i)
    if (args[i].mode == ArgMode::In) out.push_back(i);
  return out;
}

std::optional<size_t> PredicateSignature::outputPosition() const {
  std::optional<size_t> pos;
  for (size_t i = 0; i < args.size(); ++i)
    if (args[i].mode == ArgMode::Out) {
      if (pos) return std::nullopt;
      pos = i;
    }
  return pos;
}

const PredicateSignature* SignatureTable::find(const PredId& id) const {
  auto it = preds.find(id);
  return it == preds.end() ? nullptr : &it->second;
}

namespace {

struct SchemaBuilder {
  const TypeTable& table;
  int counter = 0;
  std::vector<SizedSchema::BoundPair> pairs;

  SizedSchema::BoundPair freshPair(const std::string& role) {
    SizedSchema::BoundPair p;
    p.role = role;
    p.lowerVar = "s" + std::to_string(++counter);
    p.upperVar = "s" + std::to_string(++counter);
    pairs.push_back(p);
    return p;
  }

  std::string walk(const std::string& typeName,
                   std::set<std::string>& onPath) {
    if (TypeTable::isNum(typeName)) {
      SizedSchema::BoundPair p = freshPair("value");
      return "num^(" + p.lowerVar + "," + p.upperVar + ")";
    }
    auto it = table.types.find(typeName);
    if (it == table.types.end())
      throw SizedTypeError("unknown type '" + typeName + "'");
    if (!onPath.insert(typeName).second)
      throw SizedTypeError("mutually recursive type group involving '" +
                           typeName +
                           "' (only direct self-recursion is supported)");
    const RegularType& t = it->second;
    SizedSchema::BoundPair p = freshPair("length");
    std::string text =
        typeName + "^(" + p.lowerVar + "," + p.upperVar + ")";
    if (t.cons) {
      text += "(" + walk(t.cons->elemType, onPath);
      if (t.cons->tailType != typeName) {
        std::set<std::string> tailPath = onPath;
        text += ";" + walk(t.cons->tailType, tailPath);
      }
      text += ")";
    }
    onPath.erase(typeName);
    return text;
  }
};

}  // namespace

SizedSchema deriveSchema(const std::string& typeName,
                         const TypeTable& table) {
  SchemaBuilder b{table, 0, {}};
  std::set<std::string> onPath;
  SizedSchema schema;
  schema.typeName = typeName;
  schema.text = b.walk(typeName, onPath);
  schema.pairs = std::move(b.pairs);
  return schema;
}

namespace {

// Shares the clause-syntax token shapes: idents, integers, ':=', '|',
// brackets, and '%' comments.
class SigLexer {
 public:
  explicit SigLexer(const std::string& text) : text_(text) { advance(); }

  bool atEnd() const { return current_.empty(); }
  const std::string& peek() const { return current_; }

  std::string take() {
    std::string t = current_;
    advance();
    return t;
  }

  bool tryToken(const std::string& t) {
    if (current_ == t) {
      advance();
      return true;
    }
    return false;
  }

  void expect(const std::string& t) {
    if (!tryToken(t)) fail("expected '" + t + "'");
  }

  std::string takeIdent() {
    if (current_.empty() ||
        !(std::isalpha(static_cast<unsigned char>(current_[0])) ||
          current_[0] == '_'))
      fail("expected an identifier");
    return take();
  }

  [[noreturn]] void fail(const std::string& message) const {
    std::ostringstream os;
    os << "line " << line_ << ": " << message;
    if (!current_.empty()) os << " (at '" << current_ << "')";
    throw ParseError(os.str());
  }

  // Well-formed syntax naming something that does not exist or fit.
  [[noreturn]] void failSemantic(const std::string& message) const {
    std::ostringstream os;
    os << "line " << line_ << ": " << message;
    throw SizedTypeError(os.str());
  }

 private:
  void advance() {
    for (;;) {
      while (pos_ < text_.size() &&
             std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        if (text_[pos_] == '\n') ++line_;
        ++pos_;
      }
      if (pos_ < text_.size() && text_[pos_] == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
    current_.clear();
    if (pos_ >= text_.size()) return;
    char c = text_[pos_];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        current_ += text_[pos_++];
      return;
    }
    if (text_.compare(pos_, 2, ":=") == 0) {
      current_ = ":=";
      pos_ += 2;
      return;
    }
    current_ = std::string(1, c);
    ++pos_;
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  std::string current_;
};

SizeMetric parseMetric(SigLexer& lex) {
  std::string word = lex.takeIdent();
  if (word == "value") return SizeMetric::IntValue;
  if (word == "length") return SizeMetric::ListLength;
  if (word == "depth") return SizeMetric::TermDepth;
  lex.failSemantic("unknown size metric '" + word + "'");
}

void checkMetricFitsType(SigLexer& lex, const TypeTable& types,
                         const std::string& typeName, SizeMetric metric) {
  if (!TypeTable::isNum(typeName) && !types.isDeclared(typeName))
    lex.failSemantic("unknown type '" + typeName + "'");
  if (metric == SizeMetric::IntValue && !TypeTable::isNum(typeName))
    lex.failSemantic("metric 'value' needs type num, got '" + typeName + "'");
  if (metric == SizeMetric::ListLength && TypeTable::isNum(typeName))
    lex.failSemantic("metric 'length' needs a list type, got 'num'");
}

void parseTypeDecl(SigLexer& lex, const std::string& name, TypeTable& types) {
  RegularType t;
  t.name = name;
  do {
    lex.expect("[");
    if (lex.tryToken("]")) {
      if (t.hasNil) lex.fail("duplicate [] alternative in type " + name);
      t.hasNil = true;
      continue;
    }
    if (t.cons) lex.fail("duplicate cons alternative in type " + name);
    RegularType::ConsAlt alt;
    alt.elemType = lex.takeIdent();
    lex.expect("|");
    alt.tailType = lex.takeIdent();
    lex.expect("]");
    t.cons = alt;
  } while (lex.tryToken("|"));
  lex.expect(".");
  if (!types.types.emplace(name, std::move(t)).second)
    lex.fail("duplicate type declaration '" + name + "'");
}

void parsePredDecl(SigLexer& lex, SignatureTable& table) {
  PredicateSignature sig;
  sig.predName = lex.takeIdent();
  lex.expect("(");
  std::set<std::string> argNames;
  do {
    SigArg arg;
    arg.name = lex.takeIdent();
    if (!argNames.insert(arg.name).second)
      lex.fail("repeated argument name '" + arg.name + "' in pred " +
               sig.predName);
    lex.expect(":");
    std::string mode = lex.takeIdent();
    if (mode == "in")
      arg.mode = ArgMode::In;
    else if (mode == "out")
      arg.mode = ArgMode::Out;
    else
      lex.fail("argument mode must be 'in' or 'out', got '" + mode + "'");
    arg.typeName = lex.takeIdent();
    arg.metric = parseMetric(lex);
    checkMetricFitsType(lex, table.types, arg.typeName, arg.metric);
    sig.args.push_back(std::move(arg));
  } while (lex.tryToken(","));
  lex.expect(")");
  lex.expect(".");
  PredId id{sig.predName, sig.args.size()};
  if (!table.preds.emplace(id, std::move(sig)).second)
    lex.fail("duplicate signature for " + predIdToString(id));
}

}  // namespace

SignatureTable parseSignatures(const std::string& text) {
  SignatureTable table;
  SigLexer lex(text);
  while (!lex.atEnd()) {
    std::string word = lex.takeIdent();
    if (word == "pred") {
      parsePredDecl(lex, table);
      continue;
    }
    lex.expect(":=");
    parseTypeDecl(lex, word, table.types);
  }
  // Cons alternatives may reference types declared later; check them all
  // once the table is complete.
  for (const auto& [name, t] : table.types.types) {
    if (!t.cons) continue;
    for (const std::string& ref : {t.cons->elemType, t.cons->tailType})
      if (!TypeTable::isNum(ref) && !table.types.isDeclared(ref))
        throw SizedTypeError("type '" + name + "' references unknown type '" +
                             ref + "'");
  }
  return table;
}

namespace {

void requireGround(const Term& t) {
  switch (t.kind) {
    case TermKind::Var:
      throw SizedTypeError("term is not ground (variable " + t.name + ")");
    case TermKind::IntConst:
      return;
    case TermKind::Compound:
      for (const TermPtr& a : t.args) requireGround(*a);
      return;
  }
}

Int depthOf(const Term& t) {
  if (t.kind != TermKind::Compound || t.args.empty()) return Int(1);
  Int best(0);
  for (const TermPtr& a : t.args) {
    Int d = depthOf(*a);
    if (d > best) best = d;
  }
  return Int(best + 1);
}

}  // namespace

Int sizeOf(const Term& t, SizeMetric metric) {
  requireGround(t);
  switch (metric) {
    case SizeMetric::IntValue: {
      if (t.kind != TermKind::IntConst)
        throw SizedTypeError("metric 'value' applies to integers, got " +
                             termToString(t));
      return Int(abs(t.value));
    }
    case SizeMetric::ListLength: {
      Int n(0);
      const Term* cur = &t;
      while (isCons(*cur)) {
        ++n;
        cur = cur->args[1].get();
      }
      if (!isNil(*cur))
        throw SizedTypeError("metric 'length' applies to nil-terminated "
                             "lists, got " +
                             termToString(t));
      return n;
    }
    case SizeMetric::TermDepth:
      return depthOf(t);
  }
  throw SizedTypeError("unknown metric");
}

}  // namespace enverify
