#include "smc/strategy.hpp"

#include <functional>
#include <sstream>

namespace smc {

size_t countRewriteFrags(const Condition& c) {
  size_t n = 0;
  for (const CondFrag& f : c)
    if (f.kind == CondFrag::Rewrite) ++n;
  return n;
}

std::string toString(const CondFrag& f) {
  switch (f.kind) {
    case CondFrag::Equal: return toString(f.lhs) + " = " + toString(f.rhs);
    case CondFrag::Match: return toString(f.lhs) + " := " + toString(f.rhs);
    case CondFrag::SortTest: return toString(f.lhs) + " : " + f.sortName;
    case CondFrag::Rewrite: return toString(f.lhs) + " => " + toString(f.rhs);
    case CondFrag::BoolTest: return toString(f.lhs);
  }
  return "";
}

std::string toString(const Condition& c) {
  std::string out;
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) out += " /\\ ";
    out += toString(c[i]);
  }
  return out;
}

Condition substitute(const Signature& sig, const Condition& c,
                     const Substitution& s) {
  Condition out = c;
  for (CondFrag& f : out) {
    if (f.lhs) f.lhs = substitute(sig, f.lhs, s);
    if (f.rhs) f.rhs = substitute(sig, f.rhs, s);
  }
  return out;
}

static size_t condHash(const Condition& c) {
  size_t h = 0xc0d;
  for (const CondFrag& f : c) {
    h = hashCombine(h, static_cast<size_t>(f.kind));
    if (f.lhs) h = hashCombine(h, f.lhs.hash());
    if (f.rhs) h = hashCombine(h, f.rhs.hash());
    h = hashCombine(h, static_cast<size_t>(f.sort + 7));
  }
  return h;
}

static StratPtr finish(Strat s) {
  size_t h = hashCombine(0x57a7, static_cast<size_t>(s.kind));
  h = hashCombine(h, std::hash<std::string>()(s.name));
  h = hashCombine(h, (s.all ? 2 : 0) | (s.top ? 1 : 0));
  for (const auto& [v, t] : s.rho)
    h = hashCombine(hashCombine(h, std::hash<std::string>()(v)), t.hash());
  for (const StratPtr& x : s.subs) h = hashCombine(h, x->hash);
  h = hashCombine(h, static_cast<size_t>(s.mode));
  if (s.pattern) h = hashCombine(h, s.pattern.hash());
  h = hashCombine(h, condHash(s.cond));
  for (const Term& v : s.vars) h = hashCombine(h, v.hash());
  for (const Term& a : s.args) h = hashCombine(h, a.hash());
  s.hash = h;
  return std::make_shared<const Strat>(std::move(s));
}

namespace strat {

static Strat make(StratKind k) {
  Strat s;
  s.kind = k;
  return s;
}

StratPtr idle() {
  static StratPtr p = finish(make(StratKind::Idle));
  return p;
}
StratPtr fail() {
  static StratPtr p = finish(make(StratKind::Fail));
  return p;
}
StratPtr all(bool top) {
  Strat s = make(StratKind::RuleApp);
  s.all = true;
  s.top = top;
  return finish(std::move(s));
}
StratPtr rule(std::string label, std::vector<std::pair<std::string, Term>> rho,
              std::vector<StratPtr> subs, bool top) {
  Strat s = make(StratKind::RuleApp);
  s.name = std::move(label);
  s.rho = std::move(rho);
  s.subs = std::move(subs);
  s.top = top;
  return finish(std::move(s));
}
StratPtr test(PatternMode mode, Term pattern, Condition cond) {
  Strat s = make(StratKind::Test);
  s.mode = mode;
  s.pattern = std::move(pattern);
  s.cond = std::move(cond);
  return finish(std::move(s));
}
static StratPtr nary(StratKind k, std::vector<StratPtr> xs) {
  if (xs.size() == 1) return xs[0];
  Strat s = make(k);
  for (StratPtr& x : xs) {
    if (x->kind == k)
      for (const StratPtr& y : x->subs) s.subs.push_back(y);
    else
      s.subs.push_back(std::move(x));
  }
  return finish(std::move(s));
}
StratPtr seq(std::vector<StratPtr> xs) { return nary(StratKind::Seq, std::move(xs)); }
StratPtr alt(std::vector<StratPtr> xs) { return nary(StratKind::Union, std::move(xs)); }
static StratPtr unary(StratKind k, StratPtr a) {
  Strat s = make(k);
  s.subs.push_back(std::move(a));
  return finish(std::move(s));
}
StratPtr star(StratPtr a) { return unary(StratKind::Star, std::move(a)); }
StratPtr plus(StratPtr a) { return unary(StratKind::Plus, std::move(a)); }
StratPtr norm(StratPtr a) { return unary(StratKind::Norm, std::move(a)); }
StratPtr neg(StratPtr a) { return unary(StratKind::Not, std::move(a)); }
StratPtr tryS(StratPtr a) { return unary(StratKind::Try, std::move(a)); }
StratPtr testS(StratPtr a) { return unary(StratKind::TestS, std::move(a)); }
StratPtr cond(StratPtr a, StratPtr b, StratPtr c) {
  Strat s = make(StratKind::Cond);
  s.subs = {std::move(a), std::move(b), std::move(c)};
  return finish(std::move(s));
}
StratPtr orElse(StratPtr a, StratPtr b) {
  Strat s = make(StratKind::OrElse);
  s.subs = {std::move(a), std::move(b)};
  return finish(std::move(s));
}
StratPtr matchrew(PatternMode mode, Term pattern, Condition cond,
                  std::vector<Term> vars, std::vector<StratPtr> subs) {
  Strat s = make(StratKind::MatchRew);
  s.mode = mode;
  s.pattern = std::move(pattern);
  s.cond = std::move(cond);
  s.vars = std::move(vars);
  s.subs = std::move(subs);
  return finish(std::move(s));
}
StratPtr call(std::string name, std::vector<Term> args) {
  Strat s = make(StratKind::Call);
  s.name = std::move(name);
  s.args = std::move(args);
  return finish(std::move(s));
}

}  // namespace strat

static bool condEqual(const Condition& a, const Condition& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].kind != b[i].kind || a[i].sort != b[i].sort) return false;
    if (a[i].lhs != b[i].lhs) return false;
    if (static_cast<bool>(a[i].rhs) != static_cast<bool>(b[i].rhs)) return false;
    if (a[i].rhs && a[i].rhs != b[i].rhs) return false;
  }
  return true;
}

bool stratEqual(const StratPtr& a, const StratPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->hash != b->hash || a->kind != b->kind) return false;
  if (a->name != b->name || a->all != b->all || a->top != b->top ||
      a->mode != b->mode)
    return false;
  if (a->rho.size() != b->rho.size() || a->subs.size() != b->subs.size() ||
      a->vars != b->vars || a->args != b->args)
    return false;
  for (size_t i = 0; i < a->rho.size(); ++i)
    if (a->rho[i].first != b->rho[i].first || a->rho[i].second != b->rho[i].second)
      return false;
  if (static_cast<bool>(a->pattern) != static_cast<bool>(b->pattern)) return false;
  if (a->pattern && a->pattern != b->pattern) return false;
  if (!condEqual(a->cond, b->cond)) return false;
  for (size_t i = 0; i < a->subs.size(); ++i)
    if (!stratEqual(a->subs[i], b->subs[i])) return false;
  return true;
}

static bool atomic(const StratPtr& s) {
  switch (s->kind) {
    case StratKind::Idle:
    case StratKind::Fail:
    case StratKind::RuleApp:
    case StratKind::Call:
    case StratKind::Not:
    case StratKind::Try:
    case StratKind::TestS:
      return true;
    default:
      return false;
  }
}

static const char* modeKeyword(PatternMode m, bool rew) {
  switch (m) {
    case PatternMode::Top: return rew ? "matchrew" : "match";
    case PatternMode::Ext: return rew ? "xmatchrew" : "xmatch";
    case PatternMode::Anywhere: return rew ? "amatchrew" : "amatch";
  }
  return "match";
}

static void printStrat(std::ostringstream& os, const StratPtr& s);

static void printSub(std::ostringstream& os, const StratPtr& s) {
  if (atomic(s)) {
    printStrat(os, s);
  } else {
    os << '(';
    printStrat(os, s);
    os << ')';
  }
}

static void printStrat(std::ostringstream& os, const StratPtr& s) {
  switch (s->kind) {
    case StratKind::Idle: os << "idle"; break;
    case StratKind::Fail: os << "fail"; break;
    case StratKind::RuleApp: {
      if (s->top) os << "top(";
      if (s->all) {
        os << "all";
      } else {
        os << s->name;
        if (!s->rho.empty()) {
          os << '[';
          for (size_t i = 0; i < s->rho.size(); ++i) {
            if (i) os << ", ";
            os << s->rho[i].first << " <- " << toString(s->rho[i].second);
          }
          os << ']';
        }
        if (!s->subs.empty()) {
          os << '{';
          for (size_t i = 0; i < s->subs.size(); ++i) {
            if (i) os << ", ";
            printStrat(os, s->subs[i]);
          }
          os << '}';
        }
      }
      if (s->top) os << ')';
      break;
    }
    case StratKind::Test:
      os << modeKeyword(s->mode, false) << ' ' << toString(s->pattern);
      if (!s->cond.empty()) os << " s.t. " << toString(s->cond);
      break;
    case StratKind::Seq:
    case StratKind::Union:
      for (size_t i = 0; i < s->subs.size(); ++i) {
        if (i) os << (s->kind == StratKind::Seq ? " ; " : " | ");
        printSub(os, s->subs[i]);
      }
      break;
    case StratKind::Star: printSub(os, s->subs[0]); os << " *"; break;
    case StratKind::Plus: printSub(os, s->subs[0]); os << " +"; break;
    case StratKind::Norm: printSub(os, s->subs[0]); os << " !"; break;
    case StratKind::Cond:
      printSub(os, s->subs[0]);
      os << " ? ";
      printSub(os, s->subs[1]);
      os << " : ";
      printSub(os, s->subs[2]);
      break;
    case StratKind::OrElse:
      printSub(os, s->subs[0]);
      os << " or-else ";
      printSub(os, s->subs[1]);
      break;
    case StratKind::Not: os << "not("; printStrat(os, s->subs[0]); os << ')'; break;
    case StratKind::Try: os << "try("; printStrat(os, s->subs[0]); os << ')'; break;
    case StratKind::TestS: os << "test("; printStrat(os, s->subs[0]); os << ')'; break;
    case StratKind::MatchRew:
      os << modeKeyword(s->mode, true) << ' ' << toString(s->pattern);
      if (!s->cond.empty()) os << " s.t. " << toString(s->cond);
      os << " by ";
      for (size_t i = 0; i < s->vars.size(); ++i) {
        if (i) os << ", ";
        os << toString(s->vars[i]) << " using ";
        printSub(os, s->subs[i]);
      }
      break;
    case StratKind::Call:
      os << s->name;
      if (!s->args.empty()) {
        os << '(';
        for (size_t i = 0; i < s->args.size(); ++i) {
          if (i) os << ", ";
          os << toString(s->args[i]);
        }
        os << ')';
      }
      break;
  }
}

std::string toString(const StratPtr& s) {
  std::ostringstream os;
  printStrat(os, s);
  return os.str();
}

static void printAst(std::ostringstream& os, const StratPtr& s) {
  auto list = [&](const char* head) {
    os << head << '(';
    for (size_t i = 0; i < s->subs.size(); ++i) {
      if (i) os << ", ";
      printAst(os, s->subs[i]);
    }
    os << ')';
  };
  switch (s->kind) {
    case StratKind::Seq: list("seq"); break;
    case StratKind::Union: list("union"); break;
    case StratKind::Star: list("star"); break;
    case StratKind::Plus: list("plus"); break;
    case StratKind::Norm: list("norm"); break;
    case StratKind::Cond: list("cond"); break;
    case StratKind::OrElse: list("orelse"); break;
    case StratKind::Not: list("not"); break;
    case StratKind::Try: list("try"); break;
    case StratKind::TestS: list("test"); break;
    default: printStrat(os, s); break;
  }
}

std::string astString(const StratPtr& s) {
  std::ostringstream os;
  printAst(os, s);
  return os.str();
}

StratPtr desugar(const StratPtr& s) {
  using namespace strat;
  auto d = [](const StratPtr& x) { return desugar(x); };
  auto negate = [](const StratPtr& x) { return cond(x, fail(), idle()); };
  switch (s->kind) {
    case StratKind::Idle:
    case StratKind::Fail:
    case StratKind::Test:
    case StratKind::Call:
      return s;
    case StratKind::RuleApp: {
      if (s->subs.empty()) return s;
      std::vector<StratPtr> subs;
      for (const StratPtr& x : s->subs) subs.push_back(d(x));
      return rule(s->name, s->rho, std::move(subs), s->top);
    }
    case StratKind::Seq: {
      std::vector<StratPtr> xs;
      for (const StratPtr& x : s->subs) xs.push_back(d(x));
      return seq(std::move(xs));
    }
    case StratKind::Union: {
      std::vector<StratPtr> xs;
      for (const StratPtr& x : s->subs) xs.push_back(d(x));
      return alt(std::move(xs));
    }
    case StratKind::Star: return star(d(s->subs[0]));
    case StratKind::Cond: return cond(d(s->subs[0]), d(s->subs[1]), d(s->subs[2]));
    case StratKind::MatchRew: {
      std::vector<StratPtr> xs;
      for (const StratPtr& x : s->subs) xs.push_back(d(x));
      return matchrew(s->mode, s->pattern, s->cond, s->vars, std::move(xs));
    }
    case StratKind::Plus: {
      StratPtr a = d(s->subs[0]);
      return seq({a, star(a)});
    }
    case StratKind::Norm: {
      StratPtr a = d(s->subs[0]);
      return seq({star(a), negate(a)});
    }
    case StratKind::OrElse: return cond(d(s->subs[0]), idle(), d(s->subs[1]));
    case StratKind::Not: return negate(d(s->subs[0]));
    case StratKind::Try: {
      StratPtr a = d(s->subs[0]);
      return cond(a, idle(), idle());
    }
    case StratKind::TestS: return negate(negate(d(s->subs[0])));
  }
  return s;
}

}  // namespace smc
