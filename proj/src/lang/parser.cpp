#include "smoothish/lang/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace smoothish::lang {

namespace {

enum class Tok { Ident, Number, Sym, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifiers and symbols are normalized to ASCII
  SourcePos pos;
  bool lineStart = false;
};

struct Spelling {
  const char* utf8;
  const char* ascii;
  bool ident;
};

// Unicode spellings and their ASCII equivalents.
const Spelling kSpellings[] = {
    {"\xCE\xBB", "\\", false},            // lambda
    {"\xE2\x87\x92", "=>", false},        // double arrow
    {"\xE2\x86\x92", "->", false},        // arrow
    {"\xC3\x97", "*", false},             // times
    {"\xC2\xB2", "^2", false},            // superscript two
    {"\xE2\x84\x9D", "R", true},          // double-struck R
    {"\xF0\x9D\x94\x85", "Bool", true},   // fraktur B
    {"\xE2\x88\x92", "-", false},         // minus sign
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;
  bool lineStart = true;
  auto push = [&](Tok k, std::string text, SourcePos pos) {
    out.push_back(Token{k, std::move(text), pos, lineStart});
    lineStart = false;
  };
  while (i < src.size()) {
    char ch = src[i];
    if (ch == '\n') {
      ++i, ++line, col = 1;
      lineStart = true;
      continue;
    }
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++i, ++col;
      continue;
    }
    if ((ch == '-' && i + 1 < src.size() && src[i + 1] == '-') || ch == '!') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    SourcePos pos{line, col};
    bool matched = false;
    for (const auto& sp : kSpellings) {
      size_t n = std::char_traits<char>::length(sp.utf8);
      if (src.compare(i, n, sp.utf8) == 0) {
        if (std::string(sp.ascii) == "^2") {
          push(Tok::Sym, "^", pos);
          lineStart = false;
          out.push_back(Token{Tok::Number, "2", pos, false});
        } else {
          push(sp.ident ? Tok::Ident : Tok::Sym, sp.ascii, pos);
        }
        i += n, ++col;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    auto uc = static_cast<unsigned char>(ch);
    if (std::isalpha(uc) || ch == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\'')) {
        ++j;
      }
      push(Tok::Ident, src.substr(i, j - i), pos);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isdigit(uc)) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        size_t k = j + 1;
        if (k < src.size() && (src[k] == '-' || src[k] == '+')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      push(Tok::Number, src.substr(i, j - i), pos);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    static const char* twoChar[] = {"=>", "->"};
    bool two = false;
    for (const char* s : twoChar) {
      if (src.compare(i, 2, s) == 0) {
        push(Tok::Sym, s, pos);
        i += 2, col += 2;
        two = true;
        break;
      }
    }
    if (two) continue;
    if (std::string("()[],:=+-*/^\\").find(ch) != std::string::npos) {
      push(Tok::Sym, std::string(1, ch), pos);
      ++i, ++col;
      continue;
    }
    if (uc >= 0x80) {
      // skip the whole code point so the column stays meaningful
      size_t j = i + 1;
      while (j < src.size() && (static_cast<unsigned char>(src[j]) & 0xC0) == 0x80) ++j;
      throw LangError(LangError::Kind::Parse, pos, "unexpected character '" + src.substr(i, j - i) + "'");
    }
    throw LangError(LangError::Kind::Parse, pos, std::string("unexpected character '") + ch + "'");
  }
  out.push_back(Token{Tok::End, "", SourcePos{line, col}, true});
  return out;
}

bool isUpperIdent(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

const std::set<std::string> kKeywords = {"let", "in", "type"};

class Parser {
 public:
  Parser(std::vector<Token> toks, bool layout) : toks_(std::move(toks)), layout_(layout) {}

  std::vector<Decl> program() {
    std::vector<Decl> decls;
    while (peek().kind != Tok::End) decls.push_back(decl());
    return decls;
  }

  Line line() {
    Line result;
    if (isSym("let") || isIdent("type") || (peek().kind == Tok::Ident && peekAt(1).text == ":" && peekAt(1).kind == Tok::Sym)) {
      if (isIdent("let")) {
        SourcePos pos = peek().pos;
        Decl d = decl();
        if (isIdent("in")) {
          next();
          ExprP body = expr();
          result = mkLet(d.name, d.type, lambdaOf(d), body, pos);
        } else {
          result = d;
        }
      } else {
        result = decl();
      }
    } else {
      result = expr();
    }
    expectEnd();
    return result;
  }

  ExprP wholeExpr() {
    ExprP e = expr();
    expectEnd();
    return e;
  }

  TypeP wholeType() {
    TypeP t = type();
    expectEnd();
    return t;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& peekAt(size_t k) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
  Token next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

  bool isSym(const std::string& s) const {
    // "let" is an identifier token; accept both kinds for keyword tests
    return (peek().kind == Tok::Sym || peek().kind == Tok::Ident) && peek().text == s && !boundary();
  }
  bool isIdent(const std::string& s) const { return peek().kind == Tok::Ident && peek().text == s; }
  bool isOp(const std::string& s) const { return peek().kind == Tok::Sym && peek().text == s && !boundary(); }

  // In layout mode a token in column 1 starts the next declaration.
  bool boundary() const {
    const Token& t = peek();
    return t.kind == Tok::End || (layout_ && declStarted_ && t.lineStart && t.pos.col == 1);
  }

  [[noreturn]] void fail(const std::string& what, std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    std::string msg = what + ", found " + found;
    if (!expected.empty()) {
      msg += "; expected one of:";
      for (const auto& e : expected) msg += " " + e;
    }
    throw LangError(LangError::Kind::Parse, t.pos, msg, std::move(expected));
  }

  void expectOp(const std::string& s) {
    if (!isOp(s)) fail("unexpected token", {"'" + s + "'"});
    next();
  }

  void expectEnd() {
    if (peek().kind != Tok::End) fail("unexpected trailing input", {"end of input"});
  }

  std::string ident(const char* what) {
    if (peek().kind != Tok::Ident || kKeywords.count(peek().text) != 0 || boundary()) fail(std::string("expected ") + what, {"identifier"});
    return next().text;
  }

  unsigned smallInt() {
    if (peek().kind != Tok::Number || peek().text.find_first_not_of("0123456789") != std::string::npos) {
      fail("expected a natural number", {"integer"});
    }
    return static_cast<unsigned>(std::stoul(next().text));
  }

  // ---- declarations

  Decl decl() {
    declStarted_ = false;
    Decl d;
    d.pos = peek().pos;
    if (isIdent("let")) {
      next();
      declStarted_ = true;
      d.kind = Decl::Kind::Let;
      d.name = ident("a definition name");
      while (peek().kind == Tok::Ident && isUpperIdent(peek().text) && !boundary()) d.typeParams.push_back(next().text);
      while (!boundary()) {
        if (isOp("(")) {
          next();
          std::vector<std::string> names;
          while (peek().kind == Tok::Ident && !boundary()) names.push_back(next().text);
          if (names.empty()) fail("expected binder names", {"identifier"});
          TypeP t;
          if (isOp(":")) {
            next();
            t = type();
          }
          expectOp(")");
          for (auto& n : names) d.binders.push_back(Binder{n, t});
        } else if (peek().kind == Tok::Ident && kKeywords.count(peek().text) == 0) {
          d.binders.push_back(Binder{next().text, nullptr});
        } else {
          break;
        }
      }
      if (isOp(":")) {
        next();
        d.type = type();
      }
      expectOp("=");
      d.body = expr();
    } else if (isIdent("type")) {
      next();
      declStarted_ = true;
      d.kind = Decl::Kind::TypeAlias;
      d.name = ident("a type name");
      while (peek().kind == Tok::Ident && !boundary()) d.typeParams.push_back(next().text);
      expectOp("=");
      d.type = type();
    } else if (peek().kind == Tok::Ident && peekAt(1).kind == Tok::Sym && peekAt(1).text == ":") {
      d.kind = Decl::Kind::Signature;
      d.name = next().text;
      declStarted_ = true;
      next();
      d.type = type();
    } else {
      fail("expected a declaration", {"'let'", "'type'", "signature"});
    }
    declStarted_ = false;
    if (layout_ && peek().kind != Tok::End && !(peek().lineStart && peek().pos.col == 1)) {
      fail("declaration continues on the same line", {"new line"});
    }
    return d;
  }

  static ExprP lambdaOf(const Decl& d) {
    ExprP body = d.body;
    for (auto it = d.binders.rbegin(); it != d.binders.rend(); ++it) body = mkLam(it->name, it->type, body, d.pos);
    return body;
  }

  // ---- types

  TypeP type() {
    TypeP t = prodType();
    if (isOp("->")) {
      next();
      return Type::arrow(t, type());
    }
    return t;
  }

  TypeP prodType() {
    std::vector<TypeP> parts{powType()};
    while (isOp("*")) {
      next();
      parts.push_back(powType());
    }
    return parts.size() == 1 ? parts[0] : Type::prod(parts);
  }

  TypeP powType() {
    TypeP t = atomType(true);
    while (isOp("^")) {
      next();
      unsigned n = smallInt();
      if (n == 1) continue;
      if (n == 0) fail("type power must be positive", {"integer >= 1"});
      t = Type::prod(std::vector<TypeP>(n, t));
    }
    return t;
  }

  TypeP atomType(bool allowArgs) {
    if (boundary()) fail("expected a type", {"type"});
    if (isOp("(")) {
      next();
      if (isOp(")")) {
        next();
        return Type::unit();
      }
      TypeP t = type();
      expectOp(")");
      return t;
    }
    if (peek().kind != Tok::Ident) fail("expected a type", {"'R'", "'unit'", "'Bool'", "type name", "'('"});
    std::string n = next().text;
    if (n == "R" || n == "Real") return Type::real();
    if (n == "unit" || n == "Unit") return Type::unit();
    if (n == "Bool") return Type::boolean();
    std::vector<TypeP> args;
    while (allowArgs && !boundary() && ((peek().kind == Tok::Ident && kKeywords.count(peek().text) == 0) || isOp("("))) {
      args.push_back(atomType(false));
    }
    return Type::named(n, args);
  }

  // ---- expressions

  ExprP expr() {
    if (isOp("\\")) return lambda();
    if (isIdent("let") && !boundary()) return letExpr();
    return additive();
  }

  ExprP lambda() {
    SourcePos pos = next().pos;
    std::vector<Binder> binders;
    if (isOp("(")) {
      while (isOp("(")) {
        next();
        std::vector<std::string> names;
        while (peek().kind == Tok::Ident && !boundary()) names.push_back(next().text);
        if (names.empty()) fail("expected binder names", {"identifier"});
        expectOp(":");
        TypeP t = type();
        expectOp(")");
        for (auto& n : names) binders.push_back(Binder{n, t});
      }
    } else {
      std::vector<std::string> names{ident("a binder")};
      while (peek().kind == Tok::Ident && !boundary()) names.push_back(next().text);
      TypeP t;
      if (isOp(":")) {
        next();
        t = type();
      }
      for (auto& n : names) binders.push_back(Binder{n, t});
    }
    expectOp("=>");
    ExprP body = expr();
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) body = mkLam(it->name, it->type, body, pos);
    return body;
  }

  ExprP letExpr() {
    SourcePos pos = next().pos;
    std::string name = ident("a let-bound name");
    std::vector<Binder> binders;
    while (!boundary()) {
      if (isOp("(")) {
        next();
        std::vector<std::string> names;
        while (peek().kind == Tok::Ident && !boundary()) names.push_back(next().text);
        TypeP t;
        if (isOp(":")) {
          next();
          t = type();
        }
        expectOp(")");
        for (auto& n : names) binders.push_back(Binder{n, t});
      } else if (peek().kind == Tok::Ident && kKeywords.count(peek().text) == 0) {
        binders.push_back(Binder{next().text, nullptr});
      } else {
        break;
      }
    }
    TypeP annot;
    if (isOp(":")) {
      next();
      annot = type();
    }
    expectOp("=");
    ExprP bound = expr();
    if (!isIdent("in") || boundary()) fail("unterminated let", {"'in'"});
    next();
    ExprP body = expr();
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) bound = mkLam(it->name, it->type, bound, pos);
    if (!binders.empty() && annot) {
      // the annotation names the result type of the local function
      TypeP full = annot;
      for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
        if (!it->type) {
          full = nullptr;
          break;
        }
        full = Type::arrow(it->type, full);
      }
      annot = full;
    }
    return mkLet(name, annot, bound, body, pos);
  }

  ExprP additive() {
    ExprP e = multiplicative();
    while (isOp("+") || isOp("-")) {
      Token op = next();
      e = mkBin(op.text[0], e, multiplicative(), op.pos);
    }
    return e;
  }

  ExprP multiplicative() {
    ExprP e = unary();
    while (isOp("*") || isOp("/")) {
      Token op = next();
      e = mkBin(op.text[0], e, unary(), op.pos);
    }
    return e;
  }

  ExprP unary() {
    if (isOp("-")) {
      SourcePos pos = next().pos;
      return mkNeg(unary(), pos);
    }
    return power();
  }

  ExprP power() {
    ExprP e = application();
    while (isOp("^")) {
      SourcePos pos = next().pos;
      e = mkPow(e, smallInt(), pos);
    }
    return e;
  }

  bool atomStart() const {
    if (boundary()) return false;
    const Token& t = peek();
    if (t.kind == Tok::Number) return true;
    if (t.kind == Tok::Ident) return kKeywords.count(t.text) == 0;
    return t.kind == Tok::Sym && t.text == "(";
  }

  ExprP application() {
    ExprP e = postfix();
    while (true) {
      if (atomStart()) {
        SourcePos pos = peek().pos;
        e = mkApp(e, postfix(), pos);
      } else if (isOp("\\")) {
        SourcePos pos = peek().pos;
        e = mkApp(e, lambda(), pos);
        break;
      } else {
        break;
      }
    }
    return e;
  }

  ExprP postfix() {
    ExprP e = atom();
    while (isOp("[")) {
      SourcePos pos = next().pos;
      unsigned idx = smallInt();
      expectOp("]");
      e = mkProj(e, idx, pos);
    }
    return e;
  }

  ExprP atom() {
    const Token& t = peek();
    if (boundary()) fail("unexpected end of expression", {"expression"});
    if (t.kind == Tok::Number) {
      Token n = next();
      return mkNum(parseRational(n.text), n.text, n.pos);
    }
    if (t.kind == Tok::Ident && kKeywords.count(t.text) == 0) {
      Token n = next();
      return mkVar(n.text, n.pos);
    }
    if (isOp("(")) {
      SourcePos pos = next().pos;
      if (isOp(")")) {
        next();
        return mkUnit(pos);
      }
      std::vector<ExprP> parts{expr()};
      while (isOp(",")) {
        next();
        parts.push_back(expr());
      }
      expectOp(")");
      return parts.size() == 1 ? parts[0] : mkTuple(parts, pos);
    }
    fail("expected an expression", {"number", "identifier", "'('", "'\\'"});
  }

  std::vector<Token> toks_;
  size_t i_ = 0;
  bool layout_;
  bool declStarted_ = false;
};

}  // namespace

mpq_class parseRational(const std::string& text) {
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    mpq_class q = parseRational(text.substr(0, slash)) / parseRational(text.substr(slash + 1));
    q.canonicalize();
    return q;
  }
  std::string mant = text;
  long exp10 = 0;
  auto e = text.find_first_of("eE");
  if (e != std::string::npos) {
    mant = text.substr(0, e);
    exp10 = std::stol(text.substr(e + 1));
  }
  bool negative = !mant.empty() && mant[0] == '-';
  if (negative || (!mant.empty() && mant[0] == '+')) mant = mant.substr(1);
  auto dot = mant.find('.');
  if (dot != std::string::npos) {
    exp10 -= static_cast<long>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  if (mant.empty() || mant.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("not a number: " + text);
  }
  mpz_class m(mant, 10), p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  mpq_class q = exp10 < 0 ? mpq_class(m, p) : mpq_class(m * p);
  q.canonicalize();
  return negative ? mpq_class(-q) : q;
}

std::vector<Decl> parseProgram(const std::string& src) { return Parser(lex(src), true).program(); }

Line parseLine(const std::string& src) { return Parser(lex(src), false).line(); }

ExprP parseExpr(const std::string& src) { return Parser(lex(src), false).wholeExpr(); }

TypeP parseType(const std::string& src) { return Parser(lex(src), false).wholeType(); }

}  // namespace smoothish::lang

namespace smoothish::lang {

std::string pretty(const ExprP& e) {
  switch (e->kind) {
    case Expr::Kind::Var:
      return e->name;
    case Expr::Kind::Num: {
      if (!e->text.empty()) return e->text;
      if (e->num.get_den() == 1) return e->num.get_str();
      return "(" + e->num.get_num().get_str() + " / " + e->num.get_den().get_str() + ")";
    }
    case Expr::Kind::Lam:
      return "(\\" + e->name + (e->annot ? " : " + showType(e->annot) : "") + " => " + pretty(e->kids[0]) + ")";
    case Expr::Kind::App:
      return "(" + pretty(e->kids[0]) + " " + pretty(e->kids[1]) + ")";
    case Expr::Kind::Let:
      return "(let " + e->name + (e->annot ? " : " + showType(e->annot) : "") + " = " + pretty(e->kids[0]) + " in " +
             pretty(e->kids[1]) + ")";
    case Expr::Kind::Tuple: {
      std::string s = "(";
      for (size_t i = 0; i < e->kids.size(); ++i) s += (i ? ", " : "") + pretty(e->kids[i]);
      return s + ")";
    }
    case Expr::Kind::Unit:
      return "()";
    case Expr::Kind::Proj:
      return pretty(e->kids[0]) + "[" + std::to_string(e->index) + "]";
    case Expr::Kind::Bin:
      return "(" + pretty(e->kids[0]) + " " + e->op + " " + pretty(e->kids[1]) + ")";
    case Expr::Kind::Neg:
      return "(-" + pretty(e->kids[0]) + ")";
    case Expr::Kind::Pow:
      return "(" + pretty(e->kids[0]) + " ^ " + std::to_string(e->index) + ")";
  }
  return "?";
}

std::string pretty(const Decl& d) {
  std::string params;
  for (const auto& p : d.typeParams) params += " " + p;
  switch (d.kind) {
    case Decl::Kind::Let: {
      std::string s = "let " + d.name + params;
      for (const auto& b : d.binders) s += b.type ? " (" + b.name + " : " + showType(b.type) + ")" : " " + b.name;
      if (d.type) s += " : " + showType(d.type);
      return s + " = " + pretty(d.body);
    }
    case Decl::Kind::TypeAlias:
      return "type " + d.name + params + " = " + showType(d.type);
    case Decl::Kind::Signature:
      return d.name + " : " + showType(d.type);
  }
  return "?";
}

}  // namespace smoothish::lang
