// Strategy expressions.
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "smc/term.hpp"

namespace smc {

struct CondFrag {
  enum Kind { Equal, Match, SortTest, Rewrite, BoolTest };
  Kind kind = Equal;
  Term lhs;  // pattern for Match, source for Rewrite
  Term rhs;  // subject for Match, target pattern for Rewrite
  SortId sort = kNoSort;
  std::string sortName;
};
using Condition = std::vector<CondFrag>;

size_t countRewriteFrags(const Condition& c);
std::string toString(const CondFrag& f);
std::string toString(const Condition& c);
Condition substitute(const Signature& sig, const Condition& c,
                     const Substitution& s);

enum class StratKind {
  Idle,
  Fail,
  RuleApp,  // label[rho]{subs}, `all`, optionally top(...)
  Test,     // match / xmatch / amatch
  Seq,
  Union,
  Star,
  Cond,     // subs = {alpha, beta, gamma}
  MatchRew, // subs paired with vars
  Call,
  // derived forms, removed by desugar
  Plus,
  Norm,
  OrElse,
  Not,
  Try,
  TestS,
};

enum class PatternMode { Top, Ext, Anywhere };

struct Strat;
using StratPtr = std::shared_ptr<const Strat>;

struct Strat {
  StratKind kind = StratKind::Idle;
  std::string name;  // rule label or strategy name
  bool all = false;
  bool top = false;
  std::vector<std::pair<std::string, Term>> rho;
  std::vector<StratPtr> subs;
  PatternMode mode = PatternMode::Top;
  Term pattern;
  Condition cond;
  std::vector<Term> vars;
  std::vector<Term> args;
  size_t hash = 0;
};

namespace strat {
StratPtr idle();
StratPtr fail();
StratPtr all(bool top = false);
StratPtr rule(std::string label, std::vector<std::pair<std::string, Term>> rho = {},
              std::vector<StratPtr> subs = {}, bool top = false);
StratPtr test(PatternMode mode, Term pattern, Condition cond = {});
StratPtr seq(std::vector<StratPtr> xs);
StratPtr alt(std::vector<StratPtr> xs);
StratPtr star(StratPtr a);
StratPtr plus(StratPtr a);
StratPtr norm(StratPtr a);
StratPtr cond(StratPtr a, StratPtr b, StratPtr c);
StratPtr orElse(StratPtr a, StratPtr b);
StratPtr neg(StratPtr a);
StratPtr tryS(StratPtr a);
StratPtr testS(StratPtr a);
StratPtr matchrew(PatternMode mode, Term pattern, Condition cond,
                  std::vector<Term> vars, std::vector<StratPtr> subs);
StratPtr call(std::string name, std::vector<Term> args);
}  // namespace strat

bool stratEqual(const StratPtr& a, const StratPtr& b);
/// Surface syntax, parseable back.
std::string toString(const StratPtr& s);
/// Constructor-style tree, e.g. union(seq(a, b), c).
std::string astString(const StratPtr& s);

/// Rewrites derived combinators into the core ones.
StratPtr desugar(const StratPtr& s);

}  // namespace smc
