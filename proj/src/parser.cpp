#include "smc/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

#include "smc/rewrite.hpp"

namespace smc {

// ------------------------------------------------------------------ lexer

static bool isPunct(char c) {
  return c == '(' || c == ')' || c == '[' || c == ']' || c == '{' ||
         c == '}' || c == ',';
}

static bool isIntText(const std::string& w) {
  size_t i = (w.size() > 1 && w[0] == '-') ? 1 : 0;
  if (i >= w.size()) return false;
  for (; i < w.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(w[i]))) return false;
  return true;
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0, n = text.size();
  auto advance = [&](size_t k) {
    for (size_t j = 0; j < k && i < n; ++j, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < n) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (text.compare(i, 3, "***") == 0 || text.compare(i, 3, "---") == 0) {
      while (i < n && text[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (isPunct(c)) {
      t.kind = Token::Punct;
      t.text = std::string(1, c);
      advance(1);
      out.push_back(t);
      continue;
    }
    size_t start = i;
    while (i < n && !std::isspace(static_cast<unsigned char>(text[i])) &&
           !isPunct(text[i]))
      advance(1);
    std::string w = text.substr(start, i - start);
    bool dot = false;
    if (w.size() > 1 && w.back() == '.' && w != "s.t.") {
      w.pop_back();
      dot = true;
    }
    t.text = w;
    if (w.size() > 1 && w[0] == '\'') {
      t.kind = Token::Qid;
      t.text = w.substr(1);
    } else if (isIntText(w)) {
      t.kind = Token::Int;
    } else {
      t.kind = Token::Ident;
    }
    out.push_back(t);
    if (dot) {
      Token d;
      d.kind = Token::Ident;
      d.text = ".";
      d.line = line;
      d.col = col - 1;
      out.push_back(d);
    }
  }
  Token end;
  end.kind = Token::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// ------------------------------------------------------------------ parser

namespace {

const std::set<std::string> kReserved = {
    ".", "=", ":=", "=>", ":", "if", "by", "using", "s.t.", "?", "|", ";",
    "<-", "->", "@", "or-else", "is"};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(size_t k = 0) const {
    size_t j = std::min(pos_ + k, toks_.size() - 1);
    return toks_[j];
  }
  bool at(const std::string& text, size_t k = 0) const {
    const Token& t = peek(k);
    return t.kind != Token::End && t.kind != Token::Qid && t.text == text;
  }
  bool atEnd() const { return peek().kind == Token::End; }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  [[noreturn]] void error(const std::string& msg, const Token& t) const {
    std::ostringstream os;
    os << "line " << t.line << ":" << t.col << ": " << msg;
    if (t.kind != Token::End)
      os << " near '" << (t.kind == Token::Qid ? "'" : "") << t.text << "'";
    else
      os << " at end of input";
    fail(ErrorKind::SyntaxError, os.str());
  }
  Token expect(const std::string& text) {
    if (!at(text)) error("expected '" + text + "'", peek());
    return next();
  }
  std::string ident(const char* what) {
    const Token& t = peek();
    if (t.kind != Token::Ident || kReserved.count(t.text))
      error(std::string("expected ") + what, t);
    return next().text;
  }

  // terms -----------------------------------------------------------------

  bool atTermStart() const {
    const Token& t = peek();
    if (t.kind == Token::Int || t.kind == Token::Qid) return true;
    if (t.kind == Token::Punct) return t.text == "[" && at("]", 1);
    if (t.kind != Token::Ident) return false;
    return !kReserved.count(t.text) || at("(", 1);
  }

  RawTerm term() {
    RawTerm r;
    if (!atTermStart()) error("expected a term", peek());
    r.tok = next();
    if (r.tok.kind == Token::Punct) {  // the [] operator
      next();
      r.tok.kind = Token::Ident;
      r.tok.text = "[]";
    }
    if (r.tok.kind == Token::Ident && at("(")) {
      next();
      r.applied = true;
      if (!at(")")) {
        r.args.push_back(term());
        while (at(",")) {
          next();
          r.args.push_back(term());
        }
      }
      expect(")");
    }
    return r;
  }

  RawFrag frag() {
    RawFrag f;
    f.lhs = term();
    if (at("=")) {
      next();
      f.kind = CondFrag::Equal;
      f.rhs = term();
    } else if (at(":=")) {
      next();
      f.kind = CondFrag::Match;
      f.rhs = term();
    } else if (at("=>")) {
      next();
      f.kind = CondFrag::Rewrite;
      f.rhs = term();
    } else if (at(":")) {
      next();
      f.kind = CondFrag::SortTest;
      f.sortName = ident("a sort name");
    } else {
      f.kind = CondFrag::BoolTest;
    }
    return f;
  }

  std::vector<RawFrag> condition() {
    std::vector<RawFrag> c{frag()};
    while (at("/\\")) {
      next();
      c.push_back(frag());
    }
    return c;
  }

  // strategies ------------------------------------------------------------

  static RawStrat node(StratKind k, const Token& t) {
    RawStrat s;
    s.kind = k;
    s.tok = t;
    return s;
  }

  RawStrat strategy() {
    Token start = peek();
    RawStrat a = unionExpr();
    if (at("?")) {
      RawStrat c = node(StratKind::Cond, start);
      next();
      c.subs.push_back(std::move(a));
      c.subs.push_back(unionExpr());
      expect(":");
      c.subs.push_back(condBranch());
      if (at("or-else"))
        error("mixing '? :' and 'or-else' needs parentheses", peek());
      return c;
    }
    if (at("or-else")) {
      std::vector<RawStrat> xs{std::move(a)};
      while (at("or-else")) {
        next();
        xs.push_back(unionExpr());
      }
      if (at("?")) error("mixing '? :' and 'or-else' needs parentheses", peek());
      RawStrat acc = std::move(xs.back());
      for (size_t i = xs.size() - 1; i-- > 0;) {
        RawStrat o = node(StratKind::OrElse, start);
        o.subs.push_back(std::move(xs[i]));
        o.subs.push_back(std::move(acc));
        acc = std::move(o);
      }
      return acc;
    }
    return a;
  }

  RawStrat condBranch() {
    Token start = peek();
    RawStrat a = unionExpr();
    if (!at("?")) return a;
    next();
    RawStrat c = node(StratKind::Cond, start);
    c.subs.push_back(std::move(a));
    c.subs.push_back(unionExpr());
    expect(":");
    c.subs.push_back(condBranch());
    return c;
  }

  RawStrat unionExpr() {
    Token start = peek();
    std::vector<RawStrat> xs{seqExpr()};
    while (at("|")) {
      next();
      xs.push_back(seqExpr());
    }
    if (xs.size() == 1) return std::move(xs[0]);
    RawStrat u = node(StratKind::Union, start);
    u.subs = std::move(xs);
    return u;
  }

  RawStrat seqExpr() {
    Token start = peek();
    std::vector<RawStrat> xs{postfix()};
    while (at(";")) {
      next();
      xs.push_back(postfix());
    }
    if (xs.size() == 1) return std::move(xs[0]);
    RawStrat s = node(StratKind::Seq, start);
    s.subs = std::move(xs);
    return s;
  }

  RawStrat postfix() {
    RawStrat p = primary();
    while (at("*") || at("+") || at("!")) {
      Token t = next();
      StratKind k = t.text == "*" ? StratKind::Star
                    : t.text == "+" ? StratKind::Plus
                                    : StratKind::Norm;
      RawStrat w = node(k, t);
      w.subs.push_back(std::move(p));
      p = std::move(w);
    }
    return p;
  }

  RawStrat primary() {
    const Token t = peek();
    if (at("(")) {
      next();
      RawStrat s = strategy();
      expect(")");
      return s;
    }
    if (t.kind != Token::Ident) error("expected a strategy", t);
    if (t.text == "idle" || t.text == "fail") {
      next();
      return node(t.text == "idle" ? StratKind::Idle : StratKind::Fail, t);
    }
    if (t.text == "all") {
      next();
      RawStrat s = node(StratKind::RuleApp, t);
      s.all = true;
      return s;
    }
    if (t.text == "top" && at("(", 1)) {
      next();
      next();
      RawStrat s = strategy();
      expect(")");
      if (!(s.kind == StratKind::RuleApp ||
            (s.kind == StratKind::Call && !s.applied)))
        error("top applies to rule applications only", t);
      s.top = true;
      return s;
    }
    if ((t.text == "not" || t.text == "try" || t.text == "test") && at("(", 1)) {
      next();
      next();
      RawStrat s = node(t.text == "not"   ? StratKind::Not
                        : t.text == "try" ? StratKind::Try
                                          : StratKind::TestS,
                        t);
      s.subs.push_back(strategy());
      expect(")");
      return s;
    }
    auto mode = [](const std::string& w) {
      return w[0] == 'x' ? PatternMode::Ext
             : w[0] == 'a' ? PatternMode::Anywhere
                           : PatternMode::Top;
    };
    if (t.text == "match" || t.text == "xmatch" || t.text == "amatch") {
      next();
      RawStrat s = node(StratKind::Test, t);
      s.mode = mode(t.text);
      s.pattern = term();
      if (at("s.t.")) {
        next();
        s.cond = condition();
      }
      return s;
    }
    if (t.text == "matchrew" || t.text == "xmatchrew" || t.text == "amatchrew") {
      next();
      RawStrat s = node(StratKind::MatchRew, t);
      s.mode = mode(t.text);
      s.pattern = term();
      if (at("s.t.")) {
        next();
        s.cond = condition();
      }
      expect("by");
      do {
        if (!s.vars.empty()) next();
        s.vars.push_back(term());
        expect("using");
        s.subs.push_back(strategy());
      } while (at(","));
      return s;
    }
    if (kReserved.count(t.text)) error("expected a strategy", t);
    next();
    RawStrat s = node(StratKind::Call, t);
    s.name = t.text;
    if (at("(")) {
      next();
      s.applied = true;
      if (!at(")")) {
        s.args.push_back(term());
        while (at(",")) {
          next();
          s.args.push_back(term());
        }
      }
      expect(")");
      return s;
    }
    if (at("[")) {
      next();
      s.bracketed = true;
      do {
        if (!s.rho.empty()) next();
        std::string v = ident("a variable name");
        expect("<-");
        s.rho.emplace_back(v, term());
      } while (at(","));
      expect("]");
    }
    if (at("{")) {
      next();
      s.bracketed = true;
      s.subs.push_back(strategy());
      while (at(",")) {
        next();
        s.subs.push_back(strategy());
      }
      expect("}");
    }
    return s;
  }

  // formulae --------------------------------------------------------------

  static RawTerm apply(const std::string& op, const Token& at,
                       std::vector<RawTerm> args) {
    RawTerm r;
    r.tok = at;
    r.tok.kind = Token::Ident;
    r.tok.text = op;
    r.applied = !args.empty();
    r.args = std::move(args);
    return r;
  }

  RawTerm formula() {
    RawTerm a = untilF();
    if (at("->")) {
      Token t = next();
      RawTerm b = formula();
      return apply("->", t, {std::move(a), std::move(b)});
    }
    return a;
  }
  RawTerm untilF() {
    RawTerm a = orF();
    if (at("U")) {
      Token t = next();
      RawTerm b = untilF();
      return apply("U", t, {std::move(a), std::move(b)});
    }
    return a;
  }
  RawTerm orF() {
    RawTerm a = andF();
    while (at("\\/")) {
      Token t = next();
      a = apply("\\/", t, {std::move(a), andF()});
    }
    return a;
  }
  RawTerm andF() {
    RawTerm a = unaryF();
    while (at("/\\")) {
      Token t = next();
      a = apply("/\\", t, {std::move(a), unaryF()});
    }
    return a;
  }
  RawTerm unaryF() {
    const Token t = peek();
    if (t.kind == Token::Ident &&
        (t.text == "~" || t.text == "O" || t.text == "<>")) {
      next();
      return apply(t.text, t, {unaryF()});
    }
    if (at("[") && at("]", 1)) {
      next();
      next();
      return apply("[]", t, {unaryF()});
    }
    if (at("(")) {
      next();
      RawTerm f = formula();
      expect(")");
      return f;
    }
    return term();
  }

  // modules ---------------------------------------------------------------

  std::vector<RawModule> file() {
    std::vector<RawModule> mods;
    while (!atEnd()) mods.push_back(module());
    return mods;
  }

  void attrs(RawOp& op) {
    expect("[");
    while (!at("]")) {
      Token t = peek();
      if (t.kind != Token::Ident) error("expected an attribute", t);
      next();
      if (t.text == "assoc") op.assoc = true;
      else if (t.text == "comm") op.comm = true;
      else if (t.text == "ctor") op.ctor = true;
      else if (t.text == "frozen") op.frozen = true;
      else if (t.text == "id" && at("(")) {
        next();
        op.identity = term();
        expect(")");
      } else if (t.text == "id:") {
        op.identity = term();
      } else {
        error("unsupported operator attribute", t);
      }
    }
    expect("]");
  }

  RawModule module() {
    RawModule m;
    Token kw = peek();
    if (!(at("mod") || at("smod") || at("fmod")))
      error("expected 'mod', 'smod' or 'fmod'", kw);
    next();
    m.kind = kw.text;
    m.line = kw.line;
    m.name = ident("a module name");
    expect("is");
    while (true) {
      Token t = peek();
      if (t.kind == Token::End) error("unterminated module " + m.name, t);
      const std::string& w = t.text;
      if (t.kind == Token::Ident && (w == "endm" || w == "endsm" || w == "endfm")) {
        next();
        break;
      }
      next();
      if (w == "protecting" || w == "including" || w == "extending" ||
          w == "pr" || w == "inc" || w == "ex") {
        m.imports.push_back(ident("a module name"));
        expect(".");
      } else if (w == "sort" || w == "sorts") {
        while (!at(".")) m.sorts.push_back(ident("a sort name"));
        next();
      } else if (w == "subsort" || w == "subsorts") {
        std::vector<std::vector<std::string>> chain(1);
        while (!at(".")) {
          if (at("<")) {
            next();
            chain.emplace_back();
            continue;
          }
          chain.back().push_back(ident("a sort name"));
        }
        next();
        if (chain.size() < 2) error("subsort declaration needs '<'", t);
        for (size_t i = 0; i + 1 < chain.size(); ++i)
          for (const auto& a : chain[i])
            for (const auto& b : chain[i + 1]) m.subsorts.emplace_back(a, b);
      } else if (w == "op" || w == "ops") {
        RawOp op;
        op.line = t.line;
        while (!at(":")) {
          if (at("[") && at("]", 1)) {
            next();
            next();
            op.names.push_back("[]");
            continue;
          }
          if (peek().kind != Token::Ident) error("expected an operator name", peek());
          op.names.push_back(next().text);
        }
        next();
        while (!at("->")) op.args.push_back(ident("a sort name"));
        next();
        op.result = ident("a sort name");
        if (at("[")) attrs(op);
        expect(".");
        m.ops.push_back(std::move(op));
      } else if (w == "var" || w == "vars") {
        std::vector<std::string> names;
        while (!at(":")) names.push_back(ident("a variable name"));
        next();
        std::string sort = ident("a sort name");
        expect(".");
        for (auto& n : names) m.vars.emplace_back(n, sort);
      } else if (w == "eq" || w == "ceq") {
        RawModule::Eq e;
        e.lhs = term();
        expect("=");
        e.rhs = term();
        if (at("if")) {
          next();
          e.cond = condition();
        }
        if (at("[")) {
          next();
          while (!at("]")) {
            Token a = next();
            if (a.text == "owise" || a.text == "otherwise") e.owise = true;
            else error("unsupported equation attribute", a);
          }
          next();
        }
        expect(".");
        m.eqs.push_back(std::move(e));
      } else if (w == "rl" || w == "crl") {
        RawModule::Rl r;
        if (at("[")) {
          next();
          r.label = ident("a rule label");
          expect("]");
          expect(":");
        }
        r.lhs = term();
        expect("=>");
        r.rhs = term();
        if (at("if")) {
          next();
          r.cond = condition();
        }
        expect(".");
        m.rules.push_back(std::move(r));
      } else if (w == "strat" || w == "strats") {
        RawModule::SDecl d;
        d.line = t.line;
        while (!at(":") && !at("@")) d.names.push_back(ident("a strategy name"));
        if (at(":")) {
          next();
          while (!at("@")) d.params.push_back(ident("a sort name"));
        }
        next();
        d.subject = ident("a sort name");
        expect(".");
        m.stratDecls.push_back(std::move(d));
      } else if (w == "sd" || w == "csd") {
        RawModule::SDef d;
        if (peek().kind != Token::Ident) error("expected a strategy name", peek());
        d.name = next();
        if (at("(")) {
          next();
          if (!at(")")) {
            d.args.push_back(term());
            while (at(",")) {
              next();
              d.args.push_back(term());
            }
          }
          expect(")");
        }
        expect(":=");
        d.body = strategy();
        if (at("if")) {
          next();
          d.cond = condition();
        }
        expect(".");
        m.stratDefs.push_back(std::move(d));
      } else {
        error("unexpected token in module " + m.name, t);
      }
    }
    return m;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
};

// ------------------------------------------------------------------ resolver

std::string where(const Token& t) {
  return "line " + std::to_string(t.line) + ":" + std::to_string(t.col) + ": ";
}

class Resolver {
 public:
  Resolver(const Module& m, const std::unordered_map<std::string, Term>& vars)
      : m_(m), sig_(*m.sig), vars_(vars) {}

  SortId sort(const std::string& name, const Token& at) const {
    auto s = sig_.sorts.find(name);
    if (!s) fail(ErrorKind::UnknownSort, where(at) + "unknown sort " + name);
    return *s;
  }

  Term term(const RawTerm& r) const {
    const Token& t = r.tok;
    if (t.kind == Token::Int) return sig_.makeInt(std::stoll(t.text));
    if (t.kind == Token::Qid) return sig_.makeQid(t.text);
    const std::string& name = t.text;
    if (r.applied) {
      std::vector<Term> args;
      std::vector<SortId> sorts;
      for (const RawTerm& a : r.args) {
        args.push_back(term(a));
        sorts.push_back(args.back().sort());
      }
      const OpSymbol* f = sig_.findOp(name, args.size());
      if (!f && args.size() > 2) {
        const OpSymbol* g = sig_.findOp(name, 2);
        if (g && g->assoc) f = g;
      }
      if (!f) {
        if (sig_.hasOpNamed(name))
          fail(ErrorKind::UnknownOperator,
               where(t) + "no operator " + name + " with " +
                   std::to_string(args.size()) + " arguments");
        fail(ErrorKind::UnknownOperator, where(t) + "unknown operator " + name);
      }
      std::vector<SortId> cands = sig_.candidateSorts(f, sorts);
      if (cands.empty()) {
        std::string list;
        for (size_t i = 0; i < sorts.size(); ++i)
          list += (i ? ", " : "") + sig_.sorts.name(sorts[i]);
        fail(ErrorKind::NoSort,
             where(t) + "no declaration of " + name + " accepts (" + list + ")");
      }
      if (cands.size() > 1) {
        std::string list;
        for (size_t i = 0; i < cands.size(); ++i)
          list += (i ? ", " : "") + sig_.sorts.name(cands[i]);
        fail(ErrorKind::AmbiguousOverload,
             where(t) + name + " has several least sorts: " + list);
      }
      return sig_.makeApp(f, std::move(args));
    }
    size_t colon = name.rfind(':');
    if (colon != std::string::npos && colon > 0 && colon + 1 < name.size())
      return sig_.makeVar(name.substr(0, colon), sort(name.substr(colon + 1), t));
    if (auto it = vars_.find(name); it != vars_.end()) return it->second;
    if (const OpSymbol* c = sig_.findOp(name, 0)) {
      std::vector<SortId> cands = sig_.candidateSorts(c, {});
      if (cands.size() > 1) {
        std::string list;
        for (size_t i = 0; i < cands.size(); ++i)
          list += (i ? ", " : "") + sig_.sorts.name(cands[i]);
        fail(ErrorKind::AmbiguousOverload,
             where(t) + name + " has several least sorts: " + list);
      }
      return sig_.makeConst(c);
    }
    if (sig_.hasOpNamed(name))
      fail(ErrorKind::UnknownOperator, where(t) + name + " needs arguments");
    fail(ErrorKind::UnknownIdentifier, where(t) + "unknown identifier " + name);
  }

  Condition condition(const std::vector<RawFrag>& raw) const {
    Condition c;
    for (const RawFrag& f : raw) {
      CondFrag cf;
      cf.kind = f.kind;
      cf.lhs = term(f.lhs);
      if (f.kind == CondFrag::SortTest) {
        cf.sort = sort(f.sortName, f.lhs.tok);
        cf.sortName = f.sortName;
      } else if (f.kind != CondFrag::BoolTest) {
        cf.rhs = term(f.rhs);
      }
      c.push_back(std::move(cf));
    }
    return c;
  }

  StratPtr strategy(const RawStrat& r) const {
    auto subs = [&] {
      std::vector<StratPtr> xs;
      for (const RawStrat& s : r.subs) xs.push_back(strategy(s));
      return xs;
    };
    switch (r.kind) {
      case StratKind::Idle: return strat::idle();
      case StratKind::Fail: return strat::fail();
      case StratKind::RuleApp: return strat::all(r.top);
      case StratKind::Test:
        return strat::test(r.mode, term(*r.pattern), condition(r.cond));
      case StratKind::Seq: return strat::seq(subs());
      case StratKind::Union: return strat::alt(subs());
      case StratKind::Star: return strat::star(strategy(r.subs[0]));
      case StratKind::Plus: return strat::plus(strategy(r.subs[0]));
      case StratKind::Norm: return strat::norm(strategy(r.subs[0]));
      case StratKind::Not: return strat::neg(strategy(r.subs[0]));
      case StratKind::Try: return strat::tryS(strategy(r.subs[0]));
      case StratKind::TestS: return strat::testS(strategy(r.subs[0]));
      case StratKind::Cond: {
        auto xs = subs();
        return strat::cond(xs[0], xs[1], xs[2]);
      }
      case StratKind::OrElse: {
        auto xs = subs();
        return strat::orElse(xs[0], xs[1]);
      }
      case StratKind::MatchRew: {
        Term pat = term(*r.pattern);
        std::vector<Term> patVars;
        collectVars(pat, patVars);
        std::vector<Term> vars;
        for (const RawTerm& v : r.vars) {
          Term x = term(v);
          if (!x.isVar() ||
              std::find(patVars.begin(), patVars.end(), x) == patVars.end())
            fail(ErrorKind::SyntaxError,
                 where(v.tok) + "matchrew target " + toString(x) +
                     " is not a variable of the pattern");
          vars.push_back(x);
        }
        return strat::matchrew(r.mode, pat, condition(r.cond), vars, subs());
      }
      case StratKind::Call: {
        const std::string& n = r.name;
        if (r.applied) {
          if (!m_.findStrategy(n, r.args.size()))
            fail(ErrorKind::UnknownStrategy,
                 where(r.tok) + "unknown strategy " + n + "/" +
                     std::to_string(r.args.size()));
          std::vector<Term> args;
          for (const RawTerm& a : r.args) args.push_back(term(a));
          return strat::call(n, std::move(args));
        }
        bool isRule = m_.hasRuleLabel(n);
        if (!r.bracketed && !r.top && m_.findStrategy(n, 0))
          return strat::call(n, {});
        if (!isRule) {
          if (r.bracketed || r.top)
            fail(ErrorKind::UnknownRuleLabel, where(r.tok) + "no rule labeled " + n);
          fail(ErrorKind::UnknownStrategy,
               where(r.tok) + "no strategy or rule named " + n);
        }
        std::vector<std::pair<std::string, Term>> rho;
        for (const auto& [v, t] : r.rho) rho.emplace_back(v, term(t));
        return strat::rule(n, std::move(rho), subs(), r.top);
      }
    }
    fail(ErrorKind::SyntaxError, "unsupported strategy form");
  }

 private:
  const Module& m_;
  const Signature& sig_;
  const std::unordered_map<std::string, Term>& vars_;
};

void importClosure(const std::string& name,
                   const std::map<std::string, const RawModule*>& byName,
                   std::vector<std::string>& stack,
                   std::vector<const RawModule*>& out) {
  if (std::find(stack.begin(), stack.end(), name) != stack.end()) {
    std::string cycle;
    for (const auto& s : stack) cycle += s + " -> ";
    fail(ErrorKind::CyclicImport, "cyclic import: " + cycle + name);
  }
  auto it = byName.find(name);
  if (it == byName.end())
    fail(ErrorKind::MissingModule, "module " + name + " is not defined");
  for (const RawModule* m : out)
    if (m == it->second) return;
  stack.push_back(name);
  for (const std::string& imp : it->second->imports)
    importClosure(imp, byName, stack, out);
  stack.pop_back();
  out.push_back(it->second);
}

}  // namespace

// ------------------------------------------------------------------ flatten

std::shared_ptr<Module> flatten(const std::string& name,
                                const std::vector<RawModule>& modules) {
  std::map<std::string, const RawModule*> byName;
  for (const RawModule& m : modules) {
    if (byName.count(m.name))
      fail(ErrorKind::DuplicateDeclaration, "module " + m.name + " defined twice");
    byName[m.name] = &m;
  }
  std::vector<std::string> stack;
  std::vector<const RawModule*> order;
  importClosure(name, byName, stack, order);

  auto mod = std::make_shared<Module>();
  mod->name = name;
  Signature& sig = *mod->sig;
  for (const RawModule* rm : order) mod->included.push_back(rm->name);

  Token none;
  for (const RawModule* rm : order)
    for (const std::string& s : rm->sorts) sig.sorts.add(s);

  std::unordered_map<std::string, Term> noVars;
  Resolver base(*mod, noVars);
  for (const RawModule* rm : order)
    for (const auto& [a, b] : rm->subsorts) {
      Token at;
      at.line = rm->line;
      sig.sorts.addSubsort(base.sort(a, at), base.sort(b, at));
    }

  std::vector<std::pair<OpSymbol*, const RawOp*>> withIdentity;
  for (const RawModule* rm : order)
    for (const RawOp& op : rm->ops) {
      Token at;
      at.line = op.line;
      at.col = 1;
      std::vector<SortId> args;
      for (const std::string& s : op.args) args.push_back(base.sort(s, at));
      SortId result = base.sort(op.result, at);
      if ((op.assoc || op.comm) && args.size() != 2)
        fail(ErrorKind::SyntaxError,
             where(at) + "assoc and comm need a binary operator");
      for (const std::string& n : op.names) {
        OpSymbol* existing = sig.findOp(n, args.size());
        if (existing) {
          for (const OpDecl& d : existing->decls)
            if (d.args == args && d.result == result)
              fail(ErrorKind::DuplicateDeclaration,
                   where(at) + "operator " + n + " declared twice");
          if (existing->assoc != op.assoc || existing->comm != op.comm)
            fail(ErrorKind::DuplicateDeclaration,
                 where(at) + "overloads of " + n + " disagree on attributes");
        }
        OpSymbol* s = sig.declareOp(n, args, result);
        s->assoc = op.assoc;
        s->comm = op.comm;
        s->ctor = s->ctor || op.ctor;
        s->frozen = s->frozen || op.frozen;
        if (op.identity) withIdentity.emplace_back(s, &op);
      }
    }
  for (auto& [s, op] : withIdentity) {
    Term id = base.term(*op->identity);
    if (!id.ground())
      fail(ErrorKind::SyntaxError, "identity of " + s->name + " must be ground");
    s->identity = id.node();
  }

  for (const RawModule* rm : order) {
    std::unordered_map<std::string, Term> vars;
    for (const auto& [v, s] : rm->vars) {
      Token at;
      at.line = rm->line;
      if (vars.count(v))
        fail(ErrorKind::DuplicateDeclaration,
             "variable " + v + " declared twice in " + rm->name);
      vars[v] = sig.makeVar(v, base.sort(s, at));
    }
    if (rm->name == name) mod->vars = vars;
    Resolver res(*mod, vars);
    for (const auto& e : rm->eqs) {
      Equation eq;
      eq.lhs = res.term(e.lhs);
      eq.rhs = res.term(e.rhs);
      eq.cond = res.condition(e.cond);
      eq.owise = e.owise;
      if (!eq.lhs.isApp())
        fail(ErrorKind::SyntaxError,
             where(e.lhs.tok) + "equation left-hand side must be an application");
      if (countRewriteFrags(eq.cond))
        fail(ErrorKind::SyntaxError,
             where(e.lhs.tok) + "equations cannot have rewriting conditions");
      mod->equations.push_back(std::move(eq));
    }
    for (const auto& r : rm->rules) {
      Rule rl;
      rl.label = r.label;
      rl.lhs = res.term(r.lhs);
      rl.rhs = res.term(r.rhs);
      rl.cond = res.condition(r.cond);
      mod->rules.push_back(std::move(rl));
    }
  }

  for (const RawModule* rm : order)
    for (const auto& d : rm->stratDecls) {
      Token at;
      at.line = d.line;
      for (const std::string& n : d.names) {
        StratDecl sd;
        sd.name = n;
        for (const std::string& p : d.params) sd.params.push_back(base.sort(p, at));
        sd.subject = base.sort(d.subject, at);
        for (const StratDecl& o : mod->stratDecls)
          if (o.name == n && o.params == sd.params)
            fail(ErrorKind::DuplicateDeclaration,
                 where(at) + "strategy " + n + " declared twice");
        mod->stratDecls.push_back(std::move(sd));
      }
    }

  for (const RawModule* rm : order) {
    std::unordered_map<std::string, Term> vars;
    for (const auto& [v, s] : rm->vars) vars[v] = sig.makeVar(v, *sig.sorts.find(s));
    Resolver res(*mod, vars);
    for (const auto& d : rm->stratDefs) {
      if (!mod->findStrategy(d.name.text, d.args.size()))
        fail(ErrorKind::UnknownStrategy,
             where(d.name) + "definition of undeclared strategy " + d.name.text);
      StratDef def;
      def.name = d.name.text;
      for (const RawTerm& a : d.args) def.lhs.push_back(res.term(a));
      def.body = desugar(res.strategy(d.body));
      def.cond = res.condition(d.cond);
      for (const StratDef& o : mod->stratDefs)
        if (o.name == def.name && o.lhs == def.lhs && stratEqual(o.body, def.body))
          fail(ErrorKind::DuplicateDeclaration,
               where(d.name) + "duplicate definition of " + def.name);
      mod->stratDefs.push_back(std::move(def));
    }
  }
  mod->finalize();
  return mod;
}

// ------------------------------------------------------------------ entry points

std::shared_ptr<Module> SpecFile::module(const std::string& name) const {
  const std::string& n = name.empty() ? defaultModule : name;
  auto it = modules.find(n);
  if (it == modules.end())
    fail(ErrorKind::MissingModule, "module " + n + " is not defined");
  return it->second;
}

SpecFile parseFile(const std::string& text) {
  Parser p(tokenize(text));
  SpecFile f;
  f.raw = p.file();
  std::vector<RawModule> sofar;
  for (const RawModule& m : f.raw) {
    sofar.push_back(m);
    f.modules[m.name] = flatten(m.name, sofar);
    f.defaultModule = m.name;
  }
  if (f.raw.empty()) fail(ErrorKind::SyntaxError, "no module in input");
  return f;
}

SpecFile loadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parseFile(ss.str());
}

Term parseTerm(const std::string& text, const Module& m, bool reduced) {
  Parser p(tokenize(text));
  RawTerm r = p.term();
  if (!p.atEnd()) p.error("trailing input after term", p.peek());
  Resolver res(m, m.vars);
  Term t = res.term(r);
  if (t.sort() == kNoSort)
    fail(ErrorKind::NoSort, "term has no sort: " + toString(t));
  return reduced ? reduce(m, t) : t;
}

StratPtr parseStrategyExpr(const std::string& text, const Module& m) {
  Parser p(tokenize(text));
  RawStrat r = p.strategy();
  if (!p.atEnd()) p.error("trailing input after strategy", p.peek());
  Resolver res(m, m.vars);
  return res.strategy(r);
}

Term parseFormulaTerm(const std::string& text, const Module& m) {
  Parser p(tokenize(text));
  RawTerm r = p.formula();
  if (!p.atEnd()) p.error("trailing input after formula", p.peek());
  Resolver res(m, m.vars);
  Term t;
  try {
    t = res.term(r);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NoSort)
      fail(ErrorKind::PropSortMismatch, e.what());
    throw;
  }
  if (!m.sig->sorts.leq(t.sort(), m.sig->formulaSort))
    fail(ErrorKind::PropSortMismatch,
         "not a formula: " + toString(t) + " has sort " +
             m.sig->sorts.name(t.sort()));
  if (!t.ground())
    fail(ErrorKind::UnboundVariable, "formula has variables: " + toString(t));
  return t;
}

FormulaPtr parseFormula(const std::string& text, const Module& m) {
  Term t = reduce(m, parseFormulaTerm(text, m));
  return formulaFromTerm(*m.sig, t);
}

}  // namespace smc
