#include "smc/rewrite.hpp"

#include <deque>
#include <optional>
#include <unordered_set>

namespace smc {

namespace {

constexpr int kMaxDepth = 2500;
constexpr size_t kCacheCap = 2000000;

class Reducer {
 public:
  explicit Reducer(const Module& m) : m_(m), sig_(*m.sig) {}

  Term norm(const Term& t, int depth) {
    if (!t.isApp()) return t;
    auto& cache = m_.reduceCache;
    if (auto it = cache.find(t); it != cache.end()) return it->second;
    if (depth > kMaxDepth)
      fail(ErrorKind::NonTermination,
           "equational reduction nests too deeply at " + headOf(t));
    Term u = normArgs(t, depth);
    // top-level steps are iterated so long chains do not nest
    while (u.isApp()) {
      std::optional<Term> r = topStep(u, depth);
      if (!r) break;
      if (++steps_ > m_.reduceLimit)
        fail(ErrorKind::NonTermination,
             "more than " + std::to_string(m_.reduceLimit) +
                 " equation applications in one reduction");
      if (auto it = cache.find(*r); it != cache.end()) {
        u = it->second;
        break;
      }
      u = normArgs(*r, depth);
    }
    if (cache.size() > kCacheCap) cache.clear();
    cache.emplace(t, u);
    if (u.get() != t.get()) cache.emplace(u, u);
    return u;
  }

  // Normalizes the arguments; a head that changes on rebuilding is
  // normalized again.
  Term normArgs(const Term& t, int depth) {
    if (t.args().empty()) return t;
    std::vector<Term> args;
    args.reserve(t.args().size());
    bool changed = false;
    for (const Term& a : t.args()) {
      Term b = norm(a, depth + 1);
      changed = changed || b.get() != a.get();
      args.push_back(std::move(b));
    }
    if (!changed) return t;
    Term u = sig_.makeApp(t.sym(), std::move(args));
    if (u.isApp() && u.sym() != t.sym()) return norm(u, depth + 1);
    return u;
  }

  // Equational fragments only; rewriting fragments stop the scan.
  void solve(const Condition& c, size_t i, const Substitution& s,
             std::vector<CondProgress>& out, bool firstOnly, int depth) {
    if (firstOnly && !out.empty()) return;
    if (i == c.size() || c[i].kind == CondFrag::Rewrite) {
      out.push_back(CondProgress{s, i});
      return;
    }
    const CondFrag& f = c[i];
    auto ground = [&](const Term& x) {
      Term y = substitute(sig_, x, s);
      if (!y.ground())
        fail(ErrorKind::UnboundVariable,
             "unbound variable in condition fragment " + toString(f));
      return norm(y, depth + 1);
    };
    switch (f.kind) {
      case CondFrag::Equal:
        if (ground(f.lhs) == ground(f.rhs)) solve(c, i + 1, s, out, firstOnly, depth);
        break;
      case CondFrag::BoolTest:
        if (ground(f.lhs) == sig_.makeBool(true)) solve(c, i + 1, s, out, firstOnly, depth);
        break;
      case CondFrag::SortTest:
        if (sig_.sorts.leq(ground(f.lhs).sort(), f.sort))
          solve(c, i + 1, s, out, firstOnly, depth);
        break;
      case CondFrag::Match: {
        Term subject = ground(f.rhs);
        Term pat = substitute(sig_, f.lhs, s);
        for (const Substitution& ext : m_.matcher().matchSubst(pat, subject)) {
          Substitution s2 = s;
          for (const auto& [v, val] : ext.bindings()) s2.bind(v, val);
          solve(c, i + 1, s2, out, firstOnly, depth);
          if (firstOnly && !out.empty()) return;
        }
        break;
      }
      case CondFrag::Rewrite:
        break;
    }
  }

 private:
  static std::string headOf(const Term& t) {
    return t.isApp() ? t.sym()->name : toString(t);
  }

  std::optional<Term> builtin(const Term& u) {
    const OpSymbol* f = u.sym();
    const auto& a = u.args();
    auto isTrue = [&](const Term& x) { return x.isApp() && x.sym() == sig_.trueOp; };
    auto isFalse = [&](const Term& x) { return x.isApp() && x.sym() == sig_.falseOp; };
    switch (f->builtin) {
      case Builtin::Not:
        if (isTrue(a[0])) return sig_.makeBool(false);
        if (isFalse(a[0])) return sig_.makeBool(true);
        return std::nullopt;
      case Builtin::And:
        if (isTrue(a[0])) return a[1];
        if (isTrue(a[1])) return a[0];
        if (isFalse(a[0]) || isFalse(a[1])) return sig_.makeBool(false);
        return std::nullopt;
      case Builtin::Or:
        if (isFalse(a[0])) return a[1];
        if (isFalse(a[1])) return a[0];
        if (isTrue(a[0]) || isTrue(a[1])) return sig_.makeBool(true);
        return std::nullopt;
      default:
        break;
    }
    if (a.size() != 2 || !a[0].isInt() || !a[1].isInt()) return std::nullopt;
    int64_t x = a[0]->ival, y = a[1]->ival;
    switch (f->builtin) {
      case Builtin::Add: return sig_.makeInt(x + y);
      case Builtin::Sub: return sig_.makeInt(x - y);
      case Builtin::Mul: return sig_.makeInt(x * y);
      case Builtin::Quo:
        if (y == 0) return std::nullopt;
        return sig_.makeInt(x / y);
      case Builtin::Rem:
        if (y == 0) return std::nullopt;
        return sig_.makeInt(x % y);
      case Builtin::Divides:
        if (x == 0) return std::nullopt;
        return sig_.makeBool(y % x == 0);
      case Builtin::Lt: return sig_.makeBool(x < y);
      case Builtin::Le: return sig_.makeBool(x <= y);
      case Builtin::Gt: return sig_.makeBool(x > y);
      case Builtin::Ge: return sig_.makeBool(x >= y);
      case Builtin::Min: return sig_.makeInt(std::min(x, y));
      case Builtin::Max: return sig_.makeInt(std::max(x, y));
      default: return std::nullopt;
    }
  }

  std::optional<Term> topStep(const Term& u, int depth) {
    if (u.sym()->builtin != Builtin::None)
      if (std::optional<Term> r = builtin(u)) return r;
    for (size_t idx : m_.equationsFor(u.sym())) {
      const Equation& e = m_.equations[idx];
      bool ext = e.lhs.sym()->assoc;
      for (const MatchResult& mr : m_.matcher().matchTop(e.lhs, u, ext)) {
        Substitution s = mr.subst;
        if (!e.cond.empty()) {
          std::vector<CondProgress> sols;
          solve(e.cond, 0, s, sols, true, depth);
          if (sols.empty()) continue;
          s = sols[0].sigma;
        }
        Term rhs = substitute(sig_, e.rhs, s);
        if (!rhs.ground() && u.ground())
          fail(ErrorKind::UnboundVariable,
               "equation right-hand side has unbound variables: " +
                   toString(e.rhs));
        return mr.context.isTop() ? rhs : mr.context.plug(sig_, rhs);
      }
    }
    return std::nullopt;
  }

  const Module& m_;
  const Signature& sig_;
  size_t steps_ = 0;
};

}  // namespace

Term reduce(const Module& m, const Term& t) {
  Reducer r(m);
  return r.norm(t, 0);
}

std::vector<CondProgress> advanceCondition(const Module& m, const Condition& c,
                                           size_t from,
                                           const Substitution& sigma) {
  Reducer r(m);
  std::vector<CondProgress> out;
  r.solve(c, from, sigma, out, false, 0);
  return out;
}

std::vector<Substitution> checkEqCondition(const Module& m, const Condition& c,
                                           const Substitution& sigma) {
  if (countRewriteFrags(c) > 0)
    fail(ErrorKind::ArityMismatch,
         "rewriting fragment in an equational condition: " + toString(c));
  std::vector<Substitution> out;
  for (CondProgress& p : advanceCondition(m, c, 0, sigma))
    out.push_back(std::move(p.sigma));
  return out;
}

std::vector<MatchResult> matchWithCondition(const Module& m, const Term& p,
                                            const Term& t, const Condition& c,
                                            MatchMode mode, bool ext) {
  std::vector<MatchResult> out;
  for (MatchResult& mr : m.matcher().match(p, t, mode, ext)) {
    if (c.empty()) {
      out.push_back(std::move(mr));
      continue;
    }
    for (Substitution& s : checkEqCondition(m, c, mr.subst))
      out.push_back(MatchResult{std::move(s), mr.context});
  }
  // distinct contexts may carry the same binding after the condition
  std::vector<MatchResult> dedup;
  for (MatchResult& r : out) {
    bool dup = false;
    for (const MatchResult& d : dedup)
      if (d.subst == r.subst && d.context == r.context) dup = true;
    if (!dup) dedup.push_back(std::move(r));
  }
  return dedup;
}

static void varsOfCond(const Condition& c, std::vector<Term>& out) {
  for (const CondFrag& f : c) {
    if (f.lhs) collectVars(f.lhs, out);
    if (f.rhs) collectVars(f.rhs, out);
  }
}

InstRule instantiateRule(const Module& m, size_t ruleIndex,
                         const std::vector<std::pair<std::string, Term>>& rho) {
  const Rule& r = m.rules[ruleIndex];
  InstRule ir;
  ir.index = ruleIndex;
  ir.label = r.label;
  ir.lhs = r.lhs;
  ir.rhs = r.rhs;
  ir.cond = r.cond;
  if (rho.empty()) return ir;
  std::vector<Term> vars;
  collectVars(r.lhs, vars);
  collectVars(r.rhs, vars);
  varsOfCond(r.cond, vars);
  Substitution s;
  for (const auto& [name, value] : rho) {
    bool found = false;
    for (const Term& v : vars) {
      if (v->name != name) continue;
      found = true;
      if (!m.sig->sorts.leq(value.sort(), v.sort())) ir.viable = false;
      s.bind(v, value);
    }
    if (!found)
      fail(ErrorKind::ArityMismatch, "rule " + ruleLabelOrUnlabeled(r.label) +
                                         " has no variable named " + name);
  }
  const Signature& sig = *m.sig;
  ir.lhs = substitute(sig, r.lhs, s);
  ir.rhs = substitute(sig, r.rhs, s);
  ir.cond = substitute(sig, r.cond, s);
  return ir;
}

Term completeRewrite(const Module& m, const InstRule& r,
                     const Substitution& sigma, const Context& ctx) {
  Term rhs = applySubstitution(*m.sig, r.rhs, sigma);
  if (!rhs.ground())
    fail(ErrorKind::UnboundVariable, "rule " + ruleLabelOrUnlabeled(r.label) +
                                         " leaves variables unbound");
  Term whole = ctx.isTop() ? rhs : ctx.plug(*m.sig, rhs);
  return reduce(m, whole);
}

std::vector<PendingRewrite> ruleMatches(const Module& m, const Term& t,
                                        const InstRule& r, bool topOnly) {
  std::vector<PendingRewrite> out;
  if (!r.viable) return out;
  std::vector<MatchResult> ms =
      topOnly ? m.matcher().matchTop(r.lhs, t, r.lhs.isApp() && r.lhs.sym()->assoc)
              : m.matcher().matchAnywhere(r.lhs, t);
  for (MatchResult& mr : ms) {
    for (CondProgress& p : advanceCondition(m, r.cond, 0, mr.subst)) {
      PendingRewrite pr;
      pr.sigma = std::move(p.sigma);
      pr.context = mr.context;
      pr.nextFrag = p.next;
      pr.complete = p.next == r.cond.size();
      if (pr.complete) pr.result = completeRewrite(m, r, pr.sigma, pr.context);
      out.push_back(std::move(pr));
    }
  }
  return out;
}

std::string ruleLabelOrUnlabeled(const std::string& label) {
  return label.empty() ? "unlabeled" : label;
}

namespace {

constexpr size_t kConditionSearchLimit = 100000;

std::vector<Term> reachableFrom(const Module& m, const Term& src, int depth);

// Finishes a rule application whose fragments from `from` on are unsolved,
// searching rewriting fragments without restriction.
void finishUncontrolled(const Module& m, const InstRule& r,
                        const Substitution& sigma, size_t from,
                        const Context& ctx, std::vector<Term>& out, int depth) {
  for (CondProgress& p : advanceCondition(m, r.cond, from, sigma)) {
    if (p.next == r.cond.size()) {
      out.push_back(completeRewrite(m, r, p.sigma, ctx));
      continue;
    }
    const CondFrag& f = r.cond[p.next];
    Term src = substitute(*m.sig, f.lhs, p.sigma);
    if (!src.ground())
      fail(ErrorKind::UnboundVariable, "unbound variable in " + toString(f));
    Term pat = substitute(*m.sig, f.rhs, p.sigma);
    for (const Term& u : reachableFrom(m, reduce(m, src), depth + 1))
      for (const Substitution& ext : m.matcher().matchSubst(pat, u)) {
        Substitution s2 = p.sigma;
        for (const auto& [v, val] : ext.bindings()) s2.bind(v, val);
        finishUncontrolled(m, r, s2, p.next + 1, ctx, out, depth);
      }
  }
}

std::vector<Step> stepsOf(const Module& m, const Term& t, int depth) {
  if (depth > 16)
    fail(ErrorKind::StateSpaceCeiling, "rewriting conditions nest too deeply");
  std::vector<Step> out;
  for (size_t i = 0; i < m.rules.size(); ++i) {
    InstRule r = instantiateRule(m, i, {});
    for (PendingRewrite& p : ruleMatches(m, t, r, false)) {
      std::vector<Term> results;
      if (p.complete)
        results.push_back(p.result);
      else
        finishUncontrolled(m, r, p.sigma, p.nextFrag, p.context, results, depth);
      for (Term& u : results) {
        bool dup = false;
        for (const Step& s : out)
          if (s.label == r.label && s.term == u) dup = true;
        if (!dup) out.push_back(Step{std::move(u), r.label});
      }
    }
  }
  return out;
}

std::vector<Term> reachableFrom(const Module& m, const Term& src, int depth) {
  std::vector<Term> order{src};
  std::unordered_set<Term, TermHash> seen{src};
  for (size_t i = 0; i < order.size(); ++i) {
    for (Step& s : stepsOf(m, order[i], depth))
      if (seen.insert(s.term).second) {
        order.push_back(s.term);
        if (order.size() > kConditionSearchLimit)
          fail(ErrorKind::StateSpaceCeiling,
               "rewriting condition search exceeded its bound");
      }
  }
  return order;
}

}  // namespace

std::vector<Step> oneStepRewrites(const Module& m, const Term& t) {
  return stepsOf(m, t, 0);
}

std::vector<Term> naiveOneStep(const Module& m, const Term& t,
                               const std::string& label) {
  std::vector<Term> out;
  const Signature& sig = *m.sig;
  std::vector<Context> positions = explicitPositions(sig, t);
  for (size_t i = 0; i < m.rules.size(); ++i) {
    if (m.rules[i].label != label) continue;
    InstRule r = instantiateRule(m, i, {});
    for (const Context& ctx : positions) {
      Term sub = ctx.hole(sig);
      for (const Substitution& s : m.matcher().matchSubst(r.lhs, sub)) {
        std::vector<Term> results;
        finishUncontrolled(m, r, s, 0, ctx, results, 0);
        for (Term& u : results) {
          bool dup = false;
          for (const Term& o : out) dup = dup || o == u;
          if (!dup) out.push_back(std::move(u));
        }
      }
    }
  }
  return out;
}

}  // namespace smc
