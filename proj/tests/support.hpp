// Shared helpers for the unit tests and the acceptance runner: corpus access,
// random micro-modules, and oracles written independently of the engine.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "smc/engine.hpp"
#include "smc/ltl.hpp"
#include "smc/model_graph.hpp"
#include "smc/parser.hpp"
#include "smc/rewrite.hpp"

// doctest cannot stringify terms through smc::toString, so term equality
// goes through this
#define CHECK_TERM(a, b) \
  CHECK_MESSAGE(((a) == (b)), smc::toString(a) << " != " << smc::toString(b))

namespace ts {

using namespace smc;

inline std::string corpusPath(const std::string& file) {
  return std::string(SMC_CORPUS_DIR) + "/" + file;
}

inline const SpecFile& corpusFile(const std::string& file) {
  static std::map<std::string, SpecFile> cache;
  auto it = cache.find(file);
  if (it == cache.end()) it = cache.emplace(file, loadFile(corpusPath(file))).first;
  return it->second;
}

inline std::shared_ptr<Module> philosophers() {
  return corpusFile("philosophers.rwspec").module("DINNER-SCHECK");
}
// the module declaring the rule variables Id, X and L
inline std::shared_ptr<Module> dinnerRules() {
  return corpusFile("philosophers.rwspec").module("PHILOSOPHERS-DINNER");
}
inline std::shared_ptr<Module> scheduling() {
  return corpusFile("scheduling.rwspec").module("SCHEDULER-STRAT");
}

inline Term term(const Module& m, const std::string& s) { return parseTerm(s, m, true); }
inline StratPtr strategy(const Module& m, const std::string& s) {
  return parseStrategyExpr(s, m);
}
inline FormulaPtr formula(const Module& m, const std::string& s) {
  return parseFormula(s, m);
}

inline std::set<Term> asSet(const std::vector<Term>& v) { return {v.begin(), v.end()}; }

// ------------------------------------------------------------------ micro-modules
//
// One sort S, constants c0..c4, a free binary f. Rules never grow terms, so
// from f(ci, cj) at most 30 terms are reachable.

struct Pat {
  enum Kind { Const, Var, F } kind = Const;
  int c = 0;
  std::string var;
  std::vector<Pat> kids;

  static Pat cst(int i) { return {Const, i, "", {}}; }
  static Pat v(std::string n) { return {Var, 0, std::move(n), {}}; }
  static Pat f(Pat a, Pat b) { return {F, 0, "", {std::move(a), std::move(b)}}; }

  std::string str() const {
    switch (kind) {
      case Const: return "c" + std::to_string(c);
      case Var: return var;
      case F: return "f(" + kids[0].str() + ", " + kids[1].str() + ")";
    }
    return "";
  }
  void vars(std::set<std::string>& out) const {
    if (kind == Var) out.insert(var);
    for (const Pat& k : kids) k.vars(out);
  }
  Pat bind(const std::string& x, int value) const {
    if (kind == Var && var == x) return cst(value);
    Pat p = *this;
    for (Pat& k : p.kids) k = k.bind(x, value);
    return p;
  }
};

struct MicroRule {
  std::string label;
  Pat lhs, rhs;
  bool conditional = false;  // f(X, Y) => f(Z, Y) if X => Z
};

struct MStrat;
using MS = std::shared_ptr<const MStrat>;
struct MStrat {
  enum Kind {
    Idle, Fail, Rule, All, Match, AMatch, Seq, Union, Star, Cond,
    MatchRew, AMatchRew, Call, OrElse, Not, Try, Test, Plus, Norm
  } kind = Idle;
  std::string label;
  bool top = false;
  std::string rhoVar;
  int rhoValue = -1;
  Pat pattern;
  std::vector<std::string> mvars;
  std::vector<MS> subs;
};

inline std::string print(const MS& s) {
  auto p = [](const MS& x) { return "(" + print(x) + ")"; };
  switch (s->kind) {
    case MStrat::Idle: return "idle";
    case MStrat::Fail: return "fail";
    case MStrat::All: return "all";
    case MStrat::Rule: {
      std::string r = s->label;
      if (s->rhoValue >= 0) r += "[" + s->rhoVar + " <- c" + std::to_string(s->rhoValue) + "]";
      if (!s->subs.empty()) r += "{" + print(s->subs[0]) + "}";
      return s->top ? "top(" + r + ")" : r;
    }
    case MStrat::Match: return "match " + s->pattern.str();
    case MStrat::AMatch: return "amatch " + s->pattern.str();
    case MStrat::Seq: return p(s->subs[0]) + " ; " + p(s->subs[1]);
    case MStrat::Union: return p(s->subs[0]) + " | " + p(s->subs[1]);
    case MStrat::Star: return p(s->subs[0]) + " *";
    case MStrat::Plus: return p(s->subs[0]) + " +";
    case MStrat::Norm: return p(s->subs[0]) + " !";
    case MStrat::Cond:
      return p(s->subs[0]) + " ? " + p(s->subs[1]) + " : " + p(s->subs[2]);
    case MStrat::OrElse: return p(s->subs[0]) + " or-else " + p(s->subs[1]);
    case MStrat::Not: return "not(" + print(s->subs[0]) + ")";
    case MStrat::Try: return "try(" + print(s->subs[0]) + ")";
    case MStrat::Test: return "test(" + print(s->subs[0]) + ")";
    case MStrat::MatchRew:
    case MStrat::AMatchRew: {
      std::string r = s->kind == MStrat::MatchRew ? "matchrew " : "amatchrew ";
      r += s->pattern.str() + " by ";
      for (size_t i = 0; i < s->mvars.size(); ++i) {
        if (i) r += ", ";
        r += s->mvars[i] + " using " + p(s->subs[i]);
      }
      return r;
    }
    case MStrat::Call: return "rec";
  }
  return "";
}

struct MicroModule {
  std::vector<MicroRule> rules;
  MS recBody;  // tail-recursive definition of rec
  std::string text;
  std::shared_ptr<Module> module;
};

class MicroGen {
 public:
  explicit MicroGen(uint64_t seed) : rng_(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  MicroModule module() {
    MicroModule mm;
    int plain = 1 + pick(3);
    for (int i = 0; i < plain; ++i) mm.rules.push_back(plainRule());
    if (coin()) mm.rules.push_back({"c", Pat::f(Pat::v("X"), Pat::v("Y")),
                                    Pat::f(Pat::v("Z"), Pat::v("Y")), true});
    rules_ = &mm.rules;
    mm.recBody = strat(3, true);
    mm.text = render(mm);
    mm.module = parseFile(mm.text).module("MICRO-STRAT");
    return mm;
  }

  MS strategy(const MicroModule& mm, int depth = 3) {
    rules_ = &mm.rules;
    return strat(depth, true);
  }

  std::string initialTerm() {
    if (coin(0.2)) return "c" + std::to_string(pick(5));
    return "f(c" + std::to_string(pick(5)) + ", c" + std::to_string(pick(5)) + ")";
  }

 private:
  Pat arg(const std::string& var) { return coin(0.6) ? Pat::v(var) : Pat::cst(pick(5)); }

  MicroRule plainRule() {
    MicroRule r;
    r.label = coin() ? "a" : "b";
    if (coin(0.4)) {
      r.lhs = Pat::cst(pick(5));
      r.rhs = Pat::cst(pick(5));
      return r;
    }
    r.lhs = Pat::f(arg("X"), arg("Y"));
    std::set<std::string> vs;
    r.lhs.vars(vs);
    std::vector<std::string> avail(vs.begin(), vs.end());
    std::shuffle(avail.begin(), avail.end(), rng_);
    auto leaf = [&]() {
      if (!avail.empty() && coin(0.6)) {
        Pat p = Pat::v(avail.back());
        avail.pop_back();
        return p;
      }
      return Pat::cst(pick(5));
    };
    int shape = pick(3);
    if (shape == 0) {
      r.rhs = leaf();
    } else {
      Pat a = leaf();
      Pat b = leaf();
      r.rhs = Pat::f(a, b);
    }
    return r;
  }

  bool hasCond() const {
    for (const MicroRule& r : *rules_)
      if (r.conditional) return true;
    return false;
  }

  // variables every plain rule with this label contains
  std::vector<std::string> rhoCandidates(const std::string& label) const {
    std::vector<std::string> out;
    for (const std::string x : {"X", "Y"}) {
      bool ok = false, all = true;
      for (const MicroRule& r : *rules_) {
        if (r.label != label) continue;
        std::set<std::string> vs;
        r.lhs.vars(vs);
        ok = true;
        all = all && vs.count(x);
      }
      if (ok && all) out.push_back(x);
    }
    return out;
  }

  std::string plainLabel() {
    std::vector<std::string> ls;
    for (const MicroRule& r : *rules_)
      if (!r.conditional) ls.push_back(r.label);
    return ls[pick(static_cast<int>(ls.size()))];
  }

  Pat testPattern() {
    switch (pick(5)) {
      case 0: return Pat::v("W");
      case 1: return Pat::cst(pick(5));
      case 2: return Pat::f(Pat::v("W"), Pat::cst(pick(5)));
      case 3: return Pat::f(Pat::cst(pick(5)), Pat::v("V"));
      default: return Pat::f(Pat::v("W"), Pat::v("V"));
    }
  }

  MS make(MStrat s) { return std::make_shared<const MStrat>(std::move(s)); }

  MS leaf(bool tail) {
    MStrat s;
    int k = pick(tail ? 9 : 8);
    switch (k) {
      case 0: s.kind = MStrat::Idle; break;
      case 1: s.kind = MStrat::Fail; break;
      case 2: s.kind = MStrat::All; break;
      case 3:
      case 4: {
        s.kind = MStrat::Rule;
        s.label = plainLabel();
        s.top = coin(0.25);
        auto cands = rhoCandidates(s.label);
        if (!cands.empty() && coin(0.3)) {
          s.rhoVar = cands[pick(static_cast<int>(cands.size()))];
          s.rhoValue = pick(5);
        }
        break;
      }
      case 5:
        if (hasCond()) {
          s.kind = MStrat::Rule;
          s.label = "c";
          s.subs.push_back(strat(1, false));
        } else {
          s.kind = MStrat::Idle;
        }
        break;
      case 6: s.kind = MStrat::Match; s.pattern = testPattern(); break;
      case 7: s.kind = MStrat::AMatch; s.pattern = testPattern(); break;
      default: s.kind = MStrat::Call; break;
    }
    return make(std::move(s));
  }

  // rec only occurs where its solutions are those of the whole expression
  MS strat(int depth, bool tail) {
    if (depth <= 0 || coin(0.3)) return leaf(tail);
    MStrat s;
    switch (pick(13)) {
      case 0: s.kind = MStrat::Seq; s.subs = {strat(depth - 1, false), strat(depth - 1, tail)}; break;
      case 1:
      case 2: s.kind = MStrat::Union; s.subs = {strat(depth - 1, tail), strat(depth - 1, tail)}; break;
      case 3: s.kind = MStrat::Star; s.subs = {strat(depth - 1, false)}; break;
      case 4:
        s.kind = MStrat::Cond;
        s.subs = {strat(depth - 1, false), strat(depth - 1, tail), strat(depth - 1, tail)};
        break;
      case 5:
      case 6: {
        s.kind = coin() ? MStrat::MatchRew : MStrat::AMatchRew;
        int shape = pick(3);
        s.pattern = shape == 0   ? Pat::f(Pat::v("X"), Pat::v("Y"))
                    : shape == 1 ? Pat::f(Pat::v("X"), Pat::cst(pick(5)))
                                 : Pat::f(Pat::cst(pick(5)), Pat::v("Y"));
        if (shape != 2) s.mvars.push_back("X");
        if (shape != 1 && (shape == 2 || coin())) s.mvars.push_back("Y");
        for (size_t i = 0; i < s.mvars.size(); ++i) s.subs.push_back(strat(depth - 1, false));
        break;
      }
      case 7: s.kind = MStrat::OrElse; s.subs = {strat(depth - 1, false), strat(depth - 1, tail)}; break;
      case 8: s.kind = MStrat::Not; s.subs = {strat(depth - 1, false)}; break;
      case 9: s.kind = MStrat::Try; s.subs = {strat(depth - 1, false)}; break;
      case 10: s.kind = MStrat::Test; s.subs = {strat(depth - 1, false)}; break;
      case 11: s.kind = MStrat::Plus; s.subs = {strat(depth - 1, false)}; break;
      default: s.kind = MStrat::Norm; s.subs = {strat(depth - 1, false)}; break;
    }
    return make(std::move(s));
  }

  static std::string render(const MicroModule& mm) {
    std::ostringstream os;
    os << "mod MICRO is\n  sort S .\n  ops c0 c1 c2 c3 c4 : -> S [ctor] .\n"
       << "  op f : S S -> S [ctor] .\n  vars X Y Z W V : S .\n";
    for (const MicroRule& r : mm.rules) {
      if (r.conditional)
        os << "  crl [c] : f(X, Y) => f(Z, Y) if X => Z .\n";
      else
        os << "  rl [" << r.label << "] : " << r.lhs.str() << " => " << r.rhs.str() << " .\n";
    }
    os << "endm\n\nsmod MICRO-STRAT is\n  protecting MICRO .\n  vars X Y Z W V : S .\n  strat rec @ S .\n"
       << "  sd rec := " << print(mm.recBody) << " .\nendsm\n";
    return os.str();
  }

  std::mt19937_64 rng_;
  const std::vector<MicroRule>* rules_ = nullptr;
};

// ------------------------------------------------------------------ denotational oracle
//
// Solutions of a strategy as a set of terms, computed structurally over free
// terms. rec is the least fixpoint, reached by Kleene iteration.

class Denotation {
 public:
  Denotation(const MicroModule& mm) : mm_(mm), sig_(*mm.module->sig) {
    f_ = sig_.findOp("f", 2);
    for (int i = 0; i < 5; ++i) c_[i] = sig_.findOp("c" + std::to_string(i), 0);
  }

  std::set<Term> solutions(const MS& s, const Term& t) {
    // iterate until the rec table is stable
    for (;;) {
      changed_ = false;
      std::set<Term> r = eval(s, t);
      if (!changed_) return r;
    }
  }

 private:
  using Binding = std::map<std::string, Term>;

  Term build(const Pat& p, const Binding& b) const {
    switch (p.kind) {
      case Pat::Const: return sig_.makeConst(c_[p.c]);
      case Pat::Var: return b.at(p.var);
      case Pat::F: return sig_.makeApp(f_, {build(p.kids[0], b), build(p.kids[1], b)});
    }
    return {};
  }

  bool match(const Pat& p, const Term& t, Binding& b) const {
    switch (p.kind) {
      case Pat::Const: return t.isApp() && t.sym() == c_[p.c];
      case Pat::Var: {
        auto it = b.find(p.var);
        if (it != b.end()) return it->second == t;
        b[p.var] = t;
        return true;
      }
      case Pat::F:
        return t.isApp() && t.sym() == f_ && match(p.kids[0], t.args()[0], b) &&
               match(p.kids[1], t.args()[1], b);
    }
    return false;
  }

  // applies fn at the root and, unless top, at every inner position
  void everywhere(const Term& t, bool top, const std::function<void(const Term&, std::vector<Term>&)>& fn,
                  std::vector<Term>& out) const {
    fn(t, out);
    if (top || !(t.isApp() && t.sym() == f_)) return;
    for (int i = 0; i < 2; ++i) {
      std::vector<Term> inner;
      everywhere(t.args()[i], false, fn, inner);
      for (const Term& x : inner) {
        std::vector<Term> args = t.args();
        args[i] = x;
        out.push_back(sig_.makeApp(f_, args));
      }
    }
  }

  std::set<Term> ruleApp(const MStrat& s, const Term& t) {
    std::vector<Term> out;
    for (const MicroRule& r : mm_.rules) {
      if (s.kind == MStrat::All ? r.conditional : r.label != s.label) continue;
      Pat lhs = r.lhs, rhs = r.rhs;
      if (s.rhoValue >= 0) {
        lhs = lhs.bind(s.rhoVar, s.rhoValue);
        rhs = rhs.bind(s.rhoVar, s.rhoValue);
      }
      everywhere(t, s.top, [&](const Term& u, std::vector<Term>& acc) {
        Binding b;
        if (!match(lhs, u, b)) return;
        if (!r.conditional) {
          acc.push_back(build(rhs, b));
          return;
        }
        for (const Term& z : eval(s.subs[0], b.at("X")))
          acc.push_back(sig_.makeApp(f_, {z, b.at("Y")}));
      }, out);
    }
    return {out.begin(), out.end()};
  }

  std::set<Term> eval(const MS& sp, const Term& t) {
    const MStrat& s = *sp;
    auto then = [&](const std::set<Term>& from, const MS& b) {
      std::set<Term> out;
      for (const Term& u : from) {
        auto r = eval(b, u);
        out.insert(r.begin(), r.end());
      }
      return out;
    };
    auto closure = [&](const MS& a, std::set<Term> seed) {
      std::vector<Term> work(seed.begin(), seed.end());
      while (!work.empty()) {
        Term u = work.back();
        work.pop_back();
        for (const Term& v : eval(a, u))
          if (seed.insert(v).second) work.push_back(v);
      }
      return seed;
    };
    switch (s.kind) {
      case MStrat::Idle: return {t};
      case MStrat::Fail: return {};
      case MStrat::Rule:
      case MStrat::All: return ruleApp(s, t);
      case MStrat::Match:
      case MStrat::AMatch: {
        std::vector<Term> hit;
        everywhere(t, s.kind == MStrat::Match, [&](const Term& u, std::vector<Term>& acc) {
          Binding b;
          if (match(s.pattern, u, b)) acc.push_back(u);
        }, hit);
        if (hit.empty()) return {};
        return {t};
      }
      case MStrat::Seq: return then(eval(s.subs[0], t), s.subs[1]);
      case MStrat::Union: {
        auto a = eval(s.subs[0], t);
        auto b = eval(s.subs[1], t);
        a.insert(b.begin(), b.end());
        return a;
      }
      case MStrat::Star: return closure(s.subs[0], {t});
      case MStrat::Plus: return closure(s.subs[0], eval(s.subs[0], t));
      case MStrat::Norm: {
        std::set<Term> out;
        for (const Term& u : closure(s.subs[0], {t}))
          if (eval(s.subs[0], u).empty()) out.insert(u);
        return out;
      }
      case MStrat::Cond: {
        auto a = eval(s.subs[0], t);
        return a.empty() ? eval(s.subs[2], t) : then(a, s.subs[1]);
      }
      case MStrat::OrElse: {
        auto a = eval(s.subs[0], t);
        return a.empty() ? eval(s.subs[1], t) : a;
      }
      case MStrat::Not: return eval(s.subs[0], t).empty() ? std::set<Term>{t} : std::set<Term>{};
      case MStrat::Test: return eval(s.subs[0], t).empty() ? std::set<Term>{} : std::set<Term>{t};
      case MStrat::Try: {
        auto a = eval(s.subs[0], t);
        return a.empty() ? std::set<Term>{t} : a;
      }
      case MStrat::MatchRew:
      case MStrat::AMatchRew: {
        std::vector<Term> out;
        everywhere(t, s.kind == MStrat::MatchRew, [&](const Term& u, std::vector<Term>& acc) {
          Binding b;
          if (!match(s.pattern, u, b)) return;
          std::vector<Binding> combos{b};
          for (size_t i = 0; i < s.mvars.size(); ++i) {
            std::vector<Binding> next;
            for (const Term& v : eval(s.subs[i], b.at(s.mvars[i])))
              for (Binding c : combos) {
                c[s.mvars[i]] = v;
                next.push_back(std::move(c));
              }
            combos = std::move(next);
          }
          for (const Binding& c : combos) acc.push_back(build(s.pattern, c));
        }, out);
        return {out.begin(), out.end()};
      }
      case MStrat::Call: {
        auto it = rec_.find(t);
        if (it == rec_.end()) {
          it = rec_.emplace(t, std::set<Term>{}).first;
          changed_ = true;
        }
        if (active_.insert(t).second) {
          std::set<Term> now = eval(mm_.recBody, t);
          active_.erase(t);
          std::set<Term>& cur = rec_[t];
          size_t before = cur.size();
          cur.insert(now.begin(), now.end());
          if (cur.size() != before) changed_ = true;
        }
        return rec_[t];
      }
    }
    return {};
  }

  const MicroModule& mm_;
  const Signature& sig_;
  const OpSymbol* f_;
  const OpSymbol* c_[5];
  std::map<Term, std::set<Term>> rec_;
  std::set<Term> active_;
  bool changed_ = false;
};

// ------------------------------------------------------------------ bounded words
//
// Letter-labeled transition systems compared on their words of a fixed length:
// words(S, r) = the letter sequences of length r readable from state set S.

class WordSystem {
 public:
  virtual ~WordSystem() = default;
  virtual size_t start() = 0;
  virtual Term letter(size_t node) = 0;
  virtual std::vector<size_t> next(size_t node) = 0;
};

class ModelWords : public WordSystem {
 public:
  explicit ModelWords(KripkeStructure& g) : g_(g) {}
  size_t start() override { return g_.initialState(); }
  Term letter(size_t n) override { return g_.stateTerm(n); }
  std::vector<size_t> next(size_t n) override {
    std::vector<size_t> out;
    for (const Edge& e : g_.expand(n)) out.push_back(e.to);
    return out;
  }

 private:
  KripkeStructure& g_;
};

// Direct unfolding of control and system steps: closures are recomputed for
// every state, targets are not compacted, and solution states stutter.
class RawUnfolding : public WordSystem {
 public:
  RawUnfolding(const Module& m, const Term& t, const StratPtr& alpha, bool biased = false)
      : engine_(m, EngineOptions{{}, biased, 2000000}) {
    intern(engine_.initial(t, alpha), false);
  }
  size_t start() override { return 0; }
  Term letter(size_t n) override { return engine_.cterm(nodes_[n].first); }
  std::vector<size_t> next(size_t n) override {
    auto [q, stutter] = nodes_[n];
    if (stutter) return {n};
    std::vector<QPtr> closure{q};
    std::set<std::string> seen{canonicalKey(q)};
    for (size_t i = 0; i < closure.size(); ++i)
      for (QPtr& r : engine_.controlSteps(closure[i]))
        if (seen.insert(canonicalKey(r)).second) closure.push_back(std::move(r));
    std::vector<size_t> out;
    bool solution = false;
    for (const QPtr& r : closure) {
      solution = solution || isSolution(r);
      for (Transition& tr : engine_.systemSteps(r)) out.push_back(intern(tr.target, false));
    }
    if (solution) out.push_back(intern(q, true));
    return out;
  }
  size_t size() const { return nodes_.size(); }

 private:
  size_t intern(const QPtr& q, bool stutter) {
    std::string k = (stutter ? "1" : "0") + canonicalKey(q);
    auto [it, fresh] = ids_.emplace(k, nodes_.size());
    if (fresh) nodes_.emplace_back(q, stutter);
    return it->second;
  }
  Engine engine_;
  std::vector<std::pair<QPtr, bool>> nodes_;
  std::map<std::string, size_t> ids_;
};

// Are the words of length `length` (counted in states) from a's start also
// words from b's start? Reports a distinguishing word through `witness`.
class WordInclusion {
 public:
  WordInclusion(WordSystem& a, WordSystem& b) : a_(a), b_(b) {}

  bool check(size_t length, std::vector<Term>* witness = nullptr) {
    std::vector<size_t> sa{a_.start()}, sb{b_.start()};
    Term l = a_.letter(sa[0]);
    if (l != b_.letter(sb[0])) sb.clear();
    std::vector<Term> word{l};
    bool ok = sub(sa, sb, length - 1, word);
    if (!ok && witness) *witness = word;
    return ok;
  }

 private:
  using Set = std::vector<size_t>;

  std::map<Term, Set> step(WordSystem& w, std::map<size_t, std::vector<size_t>>& cache,
                           const Set& s) {
    std::map<Term, Set> out;
    for (size_t n : s) {
      auto it = cache.find(n);
      if (it == cache.end()) it = cache.emplace(n, w.next(n)).first;
      for (size_t m : it->second) out[w.letter(m)].push_back(m);
    }
    for (auto& [_, v] : out) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return out;
  }

  bool sub(const Set& sa, const Set& sb, size_t r, std::vector<Term>& word) {
    if (sa.empty()) return true;
    if (r == 0) return !sb.empty();
    std::ostringstream key;
    for (size_t x : sa) key << x << ',';
    key << '|';
    for (size_t x : sb) key << x << ',';
    key << '|' << r;
    if (memo_.count(key.str())) return true;
    auto na = step(a_, ca_, sa);
    auto nb = step(b_, cb_, sb);
    for (auto& [l, ta] : na) {
      auto it = nb.find(l);
      word.push_back(l);
      if (!sub(ta, it == nb.end() ? Set{} : it->second, r - 1, word)) return false;
      word.pop_back();
    }
    memo_.insert(key.str());
    return true;
  }

  WordSystem& a_;
  WordSystem& b_;
  std::map<size_t, std::vector<size_t>> ca_, cb_;
  std::set<std::string> memo_;
};

// ------------------------------------------------------------------ formulas

// All formulas of exactly the given size over the atoms, with True/False.
inline std::vector<std::vector<FormulaPtr>> formulasUpTo(size_t maxSize,
                                                          const std::vector<Term>& atoms) {
  using namespace ltl;
  std::vector<std::vector<FormulaPtr>> by(maxSize + 1);
  by[1] = {tt(), ff()};
  for (const Term& a : atoms) by[1].push_back(atom(a));
  for (size_t n = 2; n <= maxSize; ++n) {
    for (const FormulaPtr& x : by[n - 1]) {
      by[n].push_back(neg(x));
      by[n].push_back(next(x));
      by[n].push_back(eventually(x));
      by[n].push_back(always(x));
    }
    for (size_t k = 1; k + 1 < n; ++k)
      for (const FormulaPtr& x : by[k])
        for (const FormulaPtr& y : by[n - 1 - k]) {
          by[n].push_back(conj(x, y));
          by[n].push_back(disj(x, y));
          by[n].push_back(implies(x, y));
          by[n].push_back(until(x, y));
        }
  }
  return by;
}

}  // namespace ts
