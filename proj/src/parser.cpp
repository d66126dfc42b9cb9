#include "wb/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "wb/syntax.hpp"

namespace wb {

namespace {

struct Token {
  enum class Kind { Ident, Sym, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 0, col = 0;
};

bool ident_start(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
}
bool ident_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ||
         ch == '\'' || ch == '$';
}

std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < src.size()) {
    char ch = src[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    if (ch == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (ident_start(ch)) {
      size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Token::Kind::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    t.kind = Token::Kind::Sym;
    if (ch == '<' && i + 1 < src.size() && src[i + 1] == '+') {
      t.text = "<+";
      advance(2);
    } else if (ch == '>' && i + 1 < src.size() && src[i + 1] == '>') {
      t.text = ">>";
      advance(2);
    } else if (std::string("(){}.+|!?<>:,=&").find(ch) != std::string::npos) {
      t.text = std::string(1, ch);
      advance(1);
    } else {
      throw ParseError(std::string("unexpected character '") + ch + "'", line, col);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

const std::set<std::string> kKeywords = {
    "nu",   "new", "tau",  "if",  "then", "else", "lin", "un",
    "not",  "and", "or",   "true", "false", "rec", "end", "unit", "bool"};

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;
  Calculus calc = Calculus::Pi;

  const Token& peek(size_t ahead = 0) const {
    return toks[std::min(pos + ahead, toks.size() - 1)];
  }
  const Token& next() { return toks[std::min(pos++, toks.size() - 1)]; }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg, t.line, t.col);
  }
  bool at_sym(const std::string& s, size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::Sym && t.text == s;
  }
  bool at_kw(const std::string& s, size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::Ident && t.text == s;
  }
  bool eat_sym(const std::string& s) {
    if (!at_sym(s)) return false;
    ++pos;
    return true;
  }
  void expect_sym(const std::string& s) {
    if (!eat_sym(s)) fail("expected '" + s + "'");
  }
  bool eat_kw(const std::string& s) {
    if (!at_kw(s)) return false;
    ++pos;
    return true;
  }
  void expect_kw(const std::string& s) {
    if (!eat_kw(s)) fail("expected '" + s + "'");
  }

  Name name() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident) fail("expected a name");
    if (kKeywords.count(t.text)) fail("keyword '" + t.text + "' used as a name");
    if (t.text.find('\'') != std::string::npos ||
        t.text.find('$') != std::string::npos)
      fail("name '" + t.text + "' may not contain ' or $");
    ++pos;
    return Name{t.text};
  }

  Label label() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident) fail("expected a label");
    if (kKeywords.count(t.text)) fail("keyword '" + t.text + "' used as a label");
    if (calc != Calculus::Cmv && t.text.find('\'') != std::string::npos)
      fail("primed labels are only available in cmv");
    ++pos;
    return t.text;
  }

  Value value() {
    if (eat_kw("true")) return Value::tru();
    if (eat_kw("false")) return Value::fls();
    if (at_sym("(") && at_sym(")", 1)) {
      pos += 2;
      return Value::unit();
    }
    return Value::of(name());
  }

  // expressions: or < and < not < atom
  ExprPtr expr() { return expr_or(); }
  ExprPtr expr_or() {
    ExprPtr e = expr_and();
    while (eat_kw("or")) e = Expr::mk_or(e, expr_and());
    return e;
  }
  ExprPtr expr_and() {
    ExprPtr e = expr_not();
    while (eat_kw("and")) e = Expr::mk_and(e, expr_not());
    return e;
  }
  ExprPtr expr_not() {
    if (eat_kw("not")) return Expr::mk_not(expr_not());
    return expr_atom();
  }
  ExprPtr expr_atom() {
    if (eat_kw("true")) return Expr::val(Value::tru());
    if (eat_kw("false")) return Expr::val(Value::fls());
    if (at_sym("(")) {
      ++pos;
      ExprPtr e = expr();
      expect_sym(")");
      return e;
    }
    return Expr::val(Value::of(name()));
  }

  // ---- terms -------------------------------------------------------------

  bool term_follows() const {
    // tokens that can never start a term end the current parallel composition
    if (peek().kind == Token::Kind::End) return false;
    if (peek().kind == Token::Kind::Sym)
      return at_sym("(") || at_sym("!");
    return !at_kw("else") && !at_kw("then") && !at_kw("and") && !at_kw("or");
  }

  TermPtr term() { return par(); }

  TermPtr par() {
    std::vector<TermPtr> comps;
    comps.push_back(sum());
    while (eat_sym("|")) comps.push_back(sum());
    return Term::par(std::move(comps));
  }

  TermPtr sum() {
    TermPtr first = prefixed();
    if (!at_sym("+")) return first;
    if (calc != Calculus::Pi) fail("'+' outside a choice");
    std::vector<PiBranch> branches = summands(first);
    while (eat_sym("+")) {
      std::vector<PiBranch> more = summands(prefixed());
      branches.insert(branches.end(), more.begin(), more.end());
    }
    return Term::pi_sum(std::move(branches));
  }

  std::vector<PiBranch> summands(const TermPtr& t) {
    if (t->op != Op::PiSum) fail("summand must be an action prefix");
    return t->pi_branches;
  }

  TermPtr prefixed() {
    if (at_sym("(")) {
      if (at_kw("nu", 1)) {
        if (calc != Calculus::Pi) fail("(nu x) is pi syntax");
        pos += 2;
        Name x = name();
        expect_sym(")");
        return Term::res_pi(std::move(x), par());
      }
      if (at_kw("new", 1)) {
        if (calc == Calculus::Pi) fail("(new x y) is session syntax");
        pos += 2;
        Name a = name(), b = name();
        if (a == b) fail("session endpoints must be distinct");
        std::optional<std::string> annot;
        if (eat_sym(":")) annot = type_text();
        expect_sym(")");
        return Term::res_sess(std::move(a), std::move(b), par(), std::move(annot));
      }
      ++pos;
      TermPtr t = par();
      expect_sym(")");
      return t;
    }
    if (at_sym("!")) {
      if (calc != Calculus::Pi) fail("replication is pi syntax");
      ++pos;
      return Term::bang(prefixed());
    }
    if (at_kw("if")) {
      if (calc == Calculus::Pi) fail("conditionals are session syntax");
      ++pos;
      ExprPtr e = expr();
      expect_kw("then");
      TermPtr thn = par();
      expect_kw("else");
      TermPtr els = par();
      return Term::cond_if(std::move(e), std::move(thn), std::move(els));
    }
    if (at_kw("tau")) {
      if (calc != Calculus::Pi) fail("tau is pi syntax");
      ++pos;
      PiPrefix p;
      p.kind = PiPrefix::Kind::Tau;
      return Term::pi_sum({PiBranch{std::move(p), cont()}});
    }
    if ((at_kw("lin") || at_kw("un")) && calc != Calculus::Pi) {
      Qual q = eat_kw("lin") ? Qual::Lin : (eat_kw("un"), Qual::Un);
      Name subj = name();
      if (calc == Calculus::Cmv) {
        expect_sym("?");
        Name var = name();
        return Term::cmv_in(q, std::move(subj), std::move(var), cont());
      }
      expect_sym("(");
      std::vector<MixBranch> branches;
      // several summands may share a label and polarity; only literally
      // identical summands collapse (a choice is a set of summands)
      std::set<std::string> seen;
      do {
        branches.push_back(mix_branch());
        const MixBranch& b = branches.back();
        std::string key = b.label + to_string(b.pol) + "|";
        if (b.pol == Pol::Send)
          key += std::to_string(static_cast<int>(b.value.kind)) + b.value.name.text;
        else
          key += b.var.text;
        key += "|" + term_key(b.cont, false);
        if (!seen.insert(key).second)
          fail("duplicate branch " + b.label + to_string(b.pol));
      } while (eat_sym("+"));
      expect_sym(")");
      return Term::mix_choice(q, std::move(subj), std::move(branches));
    }
    if (peek().kind == Token::Kind::Ident) {
      if (peek().text == "0" ) {
        ++pos;
        return Term::inact();
      }
      return subject_prefixed();
    }
    fail("expected a process");
  }

  TermPtr subject_prefixed() {
    Name subj = name();
    if (calc == Calculus::Pi) {
      PiPrefix p;
      p.channel = subj;
      if (eat_sym("!")) {
        p.kind = PiPrefix::Kind::Out;
        if (eat_sym("<")) {
          p.arg = name();
          expect_sym(">");
        } else {
          p.arg = subj;
        }
      } else if (eat_sym("?")) {
        p.kind = PiPrefix::Kind::In;
        if (eat_sym("(")) {
          p.arg = name();
          expect_sym(")");
        } else {
          p.arg = Name{"_"};
        }
      } else {
        fail("expected '!' or '?' after channel");
      }
      return Term::pi_sum({PiBranch{std::move(p), cont()}});
    }
    if (calc == Calculus::Cmv) {
      if (eat_sym("!")) {
        Value v = value();
        return Term::cmv_out(std::move(subj), std::move(v), cont());
      }
      if (eat_sym("?")) {
        // unqualified input defaults to lin
        Name var = name();
        return Term::cmv_in(Qual::Lin, std::move(subj), std::move(var), cont());
      }
      if (eat_sym("<+")) {
        Label l = label();
        return Term::cmv_sel(std::move(subj), std::move(l), cont());
      }
      if (eat_sym(">>")) {
        expect_sym("{");
        std::vector<CmvArm> arms;
        std::set<Label> seen;
        do {
          Label l = label();
          if (!seen.insert(l).second) fail("duplicate branch label " + l);
          expect_sym(":");
          arms.push_back(CmvArm{std::move(l), par()});
        } while (eat_sym(","));
        expect_sym("}");
        return Term::cmv_branch(std::move(subj), std::move(arms));
      }
      fail("expected '!', '?', '<+' or '>>' after endpoint");
    }
    fail("expected 'lin' or 'un' before a choice");
  }

  MixBranch mix_branch() {
    MixBranch b;
    b.label = label();
    if (eat_sym("!")) {
      b.pol = Pol::Send;
      b.value = value();
    } else if (eat_sym("?")) {
      b.pol = Pol::Recv;
      expect_sym("(");
      b.var = name();
      expect_sym(")");
    } else {
      fail("expected '!' or '?' after label");
    }
    b.cont = cont();
    return b;
  }

  TermPtr cont() {
    if (eat_sym(".")) return prefixed();
    return Term::inact();
  }

  // ---- types -------------------------------------------------------------

  TypePtr type() {
    if (eat_kw("end")) return TypeNode::end();
    if (eat_kw("unit")) return TypeNode::unit();
    if (eat_kw("bool")) return TypeNode::boolean();
    if (eat_kw("rec")) {
      Name t = name();
      expect_sym(".");
      return TypeNode::rec(std::move(t), type());
    }
    if (at_kw("lin") || at_kw("un")) return qualified_type();
    return TypeNode::var(name());
  }

  TypePtr qualified_type() {
    Qual q = eat_kw("lin") ? Qual::Lin : (eat_kw("un"), Qual::Un);
    if (at_sym("+") || at_sym("&")) {
      View v = at_sym("+") ? View::Internal : View::External;
      ++pos;
      expect_sym("{");
      // Disambiguate mixed branches (l!T.U) from plain branches (l : T).
      bool plain = at_sym(":", 1);
      if (plain) {
        std::vector<std::pair<Label, TypePtr>> arms;
        std::set<Label> seen;
        do {
          Label l = label();
          if (!seen.insert(l).second) fail("duplicate label " + l);
          expect_sym(":");
          arms.push_back({std::move(l), type()});
        } while (eat_sym(","));
        expect_sym("}");
        return TypeNode::plain_choice(q, v, std::move(arms));
      }
      std::vector<MixTBranch> branches;
      std::set<std::pair<Label, Pol>> seen;
      do {
        MixTBranch b;
        b.label = label();
        if (eat_sym("!"))
          b.pol = Pol::Send;
        else if (eat_sym("?"))
          b.pol = Pol::Recv;
        else
          fail("expected '!' or '?' after label");
        if (!seen.insert({b.label, b.pol}).second)
          fail("duplicate branch " + b.label + to_string(b.pol));
        b.payload = type_atom();
        expect_sym(".");
        b.cont = type();
        branches.push_back(std::move(b));
      } while (eat_sym(","));
      expect_sym("}");
      return TypeNode::mix_choice(q, v, std::move(branches));
    }
    Pol p;
    if (eat_sym("!"))
      p = Pol::Send;
    else if (eat_sym("?"))
      p = Pol::Recv;
    else
      fail("expected '+', '&', '!' or '?' after qualifier");
    TypePtr payload = type_atom();
    expect_sym(".");
    return TypeNode::com(q, p, std::move(payload), type());
  }

  TypePtr type_atom() {
    if (eat_kw("end")) return TypeNode::end();
    if (eat_kw("unit")) return TypeNode::unit();
    if (eat_kw("bool")) return TypeNode::boolean();
    if (at_sym("(")) {
      ++pos;
      TypePtr t = type();
      expect_sym(")");
      return t;
    }
    if ((at_kw("lin") || at_kw("un")) && (at_sym("+", 1) || at_sym("&", 1)))
      return qualified_type();
    if (peek().kind == Token::Kind::Ident && !kKeywords.count(peek().text))
      return TypeNode::var(name());
    fail("expected a type (parenthesize compound payload types)");
  }

  // Capture the source text of an annotation type, then re-parse it.
  std::string type_text() {
    size_t start = pos;
    TypePtr t = type();
    (void)t;
    std::string out;
    for (size_t k = start; k < pos; ++k) {
      if (!out.empty()) out += " ";
      out += toks[k].text;
    }
    return out;
  }

  void expect_end() {
    if (peek().kind != Token::Kind::End) fail("trailing input");
  }
};

}  // namespace

TermPtr parse_term(const std::string& src, Calculus c) {
  Parser p;
  p.toks = tokenize(src);
  p.calc = c;
  TermPtr t = p.term();
  p.expect_end();
  return t;
}

ExprPtr parse_expr(const std::string& src) {
  Parser p;
  p.toks = tokenize(src);
  p.calc = Calculus::CmvPlus;
  ExprPtr e = p.expr();
  p.expect_end();
  return e;
}

TypePtr parse_type(const std::string& src) {
  Parser p;
  p.toks = tokenize(src);
  p.calc = Calculus::Cmv;  // permissive label set: types may carry primed labels
  TypePtr t = p.type();
  p.expect_end();
  return t;
}

TermPtr SourceFile::find(const std::string& name) const {
  for (const auto& [n, t] : defs)
    if (n == name) return t;
  return nullptr;
}

TermPtr SourceFile::main() const {
  if (defs.empty()) return nullptr;
  return defs.back().second;
}

SourceFile parse_picl(const std::string& text) {
  SourceFile out;
  bool saw_calculus = false;
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);

  auto strip = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };

  size_t i = 0;
  int defline = 0;
  auto is_directive = [&](const std::string& s) {
    return !s.empty() && s[0] == '#';
  };
  while (i < lines.size()) {
    std::string s = strip(lines[i]);
    if (s.empty() || s.rfind("//", 0) == 0) {
      ++i;
      continue;
    }
    if (!is_directive(s))
      throw ParseError("expected a directive (#calculus, #free, #def)",
                       static_cast<int>(i + 1), 1);
    if (s.rfind("#calculus", 0) == 0) {
      auto c = calculus_from_string(strip(s.substr(9)));
      if (!c)
        throw ParseError("unknown calculus '" + strip(s.substr(9)) + "'",
                         static_cast<int>(i + 1), 1);
      out.calculus = *c;
      saw_calculus = true;
      ++i;
      continue;
    }
    if (s.rfind("#free", 0) == 0) {
      std::string rest = strip(s.substr(5));
      size_t colon = rest.find(':');
      if (colon == std::string::npos)
        throw ParseError("#free expects 'name : type'", static_cast<int>(i + 1), 1);
      Name n{strip(rest.substr(0, colon))};
      out.free_types[n] = parse_type(rest.substr(colon + 1));
      ++i;
      continue;
    }
    if (s.rfind("#def", 0) == 0) {
      std::string rest = strip(s.substr(4));
      size_t eq = rest.find('=');
      if (eq == std::string::npos)
        throw ParseError("#def expects 'NAME = TERM'", static_cast<int>(i + 1), 1);
      std::string dname = strip(rest.substr(0, eq));
      std::string body = rest.substr(eq + 1);
      defline = static_cast<int>(i + 1);
      ++i;
      while (i < lines.size() && !is_directive(strip(lines[i]))) {
        body += "\n" + lines[i];
        ++i;
      }
      if (!saw_calculus)
        throw ParseError("#calculus must precede #def", defline, 1);
      try {
        out.defs.push_back({dname, parse_term(body, out.calculus)});
      } catch (const ParseError& e) {
        throw ParseError(std::string("in #def ") + dname + ": " + e.what(),
                         defline + e.line - 1, e.col);
      }
      continue;
    }
    throw ParseError("unknown directive", static_cast<int>(i + 1), 1);
  }
  if (!saw_calculus)
    throw ParseError("missing #calculus directive", 1, 1);
  return out;
}

}  // namespace wb
