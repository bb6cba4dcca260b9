#include "smc/engine.hpp"

#include <deque>
#include <sstream>

namespace smc {

// ------------------------------------------------------------------ stacks

Stack push(StratPtr s, Stack rest) {
  auto n = std::make_shared<StackNode>();
  n->hash = hashCombine(s->hash * 31 + 7, stackHash(rest));
  n->depth = rest ? rest->depth + 1 : 1;
  n->strat = std::move(s);
  n->next = std::move(rest);
  return n;
}

Stack pushFrame(Substitution theta, Stack rest) {
  auto n = std::make_shared<StackNode>();
  n->hash = hashCombine(theta.hash() ^ 0xf4a3e1ULL, stackHash(rest));
  n->depth = rest ? rest->depth + 1 : 1;
  n->frame = std::move(theta);
  n->next = std::move(rest);
  return n;
}

bool stackEqual(const Stack& a, const Stack& b) {
  const StackNode* x = a.get();
  const StackNode* y = b.get();
  while (x && y) {
    if (x == y) return true;
    if (x->hash != y->hash || x->depth != y->depth) return false;
    if (x->isFrame() != y->isFrame()) return false;
    if (x->isFrame() ? x->frame != y->frame : !stratEqual(x->strat, y->strat))
      return false;
    x = x->next.get();
    y = y->next.get();
  }
  return x == y;
}

const Substitution& vctx(const Stack& s) {
  static const Substitution id;
  for (const StackNode* n = s.get(); n; n = n->next.get())
    if (n->isFrame()) return n->frame;
  return id;
}

static Stack envStack(const StratPtr& a, const Substitution& theta) {
  return push(a, theta.empty() ? nullptr : pushFrame(theta, nullptr));
}

// ------------------------------------------------------------------ states

static size_t rehash(const QNode& q) {
  size_t h = hashCombine(static_cast<size_t>(q.kind) + 1, q.term.hash());
  h = hashCombine(h, stackHash(q.stack));
  for (const QPtr& p : q.parts) h = hashCombine(h, p->hash);
  if (q.kind == QKind::Rewc) {
    h = hashCombine(h, q.rule);
    h = hashCombine(h, q.app->hash);
    h = hashCombine(h, q.theta.hash());
    h = hashCombine(h, q.sigma.hash());
    h = hashCombine(h, q.frag * 131 + q.stratIndex);
    h = hashCombine(h, q.ctx.hash());
    h = hashCombine(h, q.inner->hash);
  }
  return h;
}

QPtr termState(Term t, Stack s) {
  auto q = std::make_shared<QNode>();
  q->kind = QKind::Term;
  q->term = std::move(t);
  q->stack = std::move(s);
  q->hash = rehash(*q);
  return q;
}

QPtr subtermState(std::vector<Term> vars, std::vector<QPtr> parts, Term shell,
                  Stack s) {
  auto q = std::make_shared<QNode>();
  q->kind = QKind::Subterm;
  q->term = std::move(shell);
  q->stack = std::move(s);
  q->vars = std::move(vars);
  q->parts = std::move(parts);
  q->hash = rehash(*q);
  return q;
}

bool stateEqual(const QPtr& a, const QPtr& b) {
  if (a == b) return true;
  if (a->hash != b->hash || a->kind != b->kind) return false;
  if (a->term != b->term || !stackEqual(a->stack, b->stack)) return false;
  switch (a->kind) {
    case QKind::Term:
      return true;
    case QKind::Subterm:
      if (a->parts.size() != b->parts.size() || a->vars != b->vars) return false;
      for (size_t i = 0; i < a->parts.size(); ++i)
        if (!stateEqual(a->parts[i], b->parts[i])) return false;
      return true;
    case QKind::Rewc:
      return a->rule == b->rule && a->frag == b->frag &&
             a->stratIndex == b->stratIndex && a->theta == b->theta &&
             a->sigma == b->sigma && a->ctx == b->ctx &&
             stratEqual(a->app, b->app) && stateEqual(a->inner, b->inner);
  }
  return false;
}

std::string toString(const Stack& s) {
  if (!s) return "eps";
  std::string out;
  for (const StackNode* n = s.get(); n; n = n->next.get()) {
    if (!out.empty()) out += " . ";
    out += n->isFrame() ? "{" + toString(n->frame) + "}" : "<" + toString(n->strat) + ">";
  }
  return out;
}

std::string toString(const QPtr& q) {
  switch (q->kind) {
    case QKind::Term:
      return toString(q->term) + " @ " + toString(q->stack);
    case QKind::Subterm: {
      std::string out = "subterm(";
      for (size_t i = 0; i < q->parts.size(); ++i)
        out += toString(q->vars[i]) + ": " + toString(q->parts[i]) + ", ";
      return out + toString(q->term) + ") @ " + toString(q->stack);
    }
    case QKind::Rewc: {
      std::ostringstream os;
      os << "rewc(" << toString(q->inner) << "; rule " << q->rule << "; "
         << toString(q->app) << "; frag " << q->frag << "/" << q->stratIndex
         << "; {" << toString(q->sigma) << "}; {" << toString(q->theta)
         << "}; ctx " << q->ctx.hash() << "; " << toString(q->term) << ") @ "
         << toString(q->stack);
      return os.str();
    }
  }
  return "?";
}

std::string canonicalKey(const QPtr& q) { return toString(q); }

// ------------------------------------------------------------------ engine

Engine::Engine(const Module& m, EngineOptions opts) : m_(m), opts_(std::move(opts)) {}

QPtr Engine::initial(const Term& t, const StratPtr& alpha) const {
  return termState(reduce(m_, t), push(desugar(alpha), nullptr));
}

Term Engine::inst(const Term& t, const Substitution& theta) const {
  if (theta.empty() || t.ground()) return t;
  return substitute(*m_.sig, t, theta);
}

Term Engine::cterm(const QPtr& q) {
  if (q->kind != QKind::Subterm) return q->term;
  if (auto it = ctermMemo_.find(q); it != ctermMemo_.end()) return it->second;
  Substitution s;
  for (size_t i = 0; i < q->parts.size(); ++i) s.bind(q->vars[i], cterm(q->parts[i]));
  Term t = reduce(m_, substitute(*m_.sig, q->term, s));
  ctermMemo_.emplace(q, t);
  return t;
}

QPtr Engine::withInner(const QPtr& q, QPtr inner) const {
  auto n = std::make_shared<QNode>(*q);
  n->inner = std::move(inner);
  n->hash = rehash(*n);
  return n;
}

QPtr Engine::withPart(const QPtr& q, size_t i, QPtr part) const {
  auto n = std::make_shared<QNode>(*q);
  n->parts[i] = std::move(part);
  n->hash = rehash(*n);
  return n;
}

std::vector<size_t> Engine::activeParts(const QPtr& q) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < q->parts.size(); ++i) {
    if (opts_.biased && isSolution(q->parts[i])) continue;
    out.push_back(i);
    if (opts_.biased) break;
  }
  return out;
}

bool Engine::isOpaqueCall(const QPtr& q) const {
  if (q->kind != QKind::Term || !q->stack || q->stack->isFrame()) return false;
  const Strat& a = *q->stack->strat;
  return a.kind == StratKind::Call && opts_.opaque.count(a.name);
}

std::vector<QPtr> Engine::controlSteps(const QPtr& q) {
  std::vector<QPtr> out;
  switch (q->kind) {
    case QKind::Term:
      controlTerm(q, out);
      break;
    case QKind::Subterm: {
      bool done = true;
      for (const QPtr& p : q->parts) done = done && isSolution(p);
      if (done) {
        Substitution s;
        for (size_t i = 0; i < q->parts.size(); ++i) s.bind(q->vars[i], q->parts[i]->term);
        out.push_back(termState(reduce(m_, substitute(*m_.sig, q->term, s)), q->stack));
        break;
      }
      for (size_t i : activeParts(q))
        for (QPtr& p : controlSteps(q->parts[i])) out.push_back(withPart(q, i, std::move(p)));
      break;
    }
    case QKind::Rewc:
      for (QPtr& p : controlSteps(q->inner)) out.push_back(withInner(q, std::move(p)));
      for (Transition& tr : systemSteps(q->inner))
        out.push_back(withInner(q, std::move(tr.target)));
      if (isSolution(q->inner)) rewcFinish(q, &out, nullptr);
      break;
  }
  return out;
}

std::vector<Transition> Engine::systemSteps(const QPtr& q) {
  std::vector<Transition> out;
  switch (q->kind) {
    case QKind::Term:
      systemTerm(q, out);
      break;
    case QKind::Subterm:
      for (size_t i : activeParts(q))
        for (Transition& tr : systemSteps(q->parts[i]))
          out.push_back({withPart(q, i, std::move(tr.target)), std::move(tr.label)});
      break;
    case QKind::Rewc:
      if (isSolution(q->inner)) rewcFinish(q, nullptr, &out);
      break;
  }
  return out;
}

std::vector<Substitution> Engine::callMatches(const StratDef& d,
                                              const std::vector<Term>& args) {
  std::vector<Substitution> cur{Substitution{}};
  for (size_t i = 0; i < args.size() && !cur.empty(); ++i) {
    std::vector<Substitution> next;
    for (const Substitution& s : cur) {
      Term p = s.empty() ? d.lhs[i] : substitute(*m_.sig, d.lhs[i], s);
      for (const Substitution& tau : m_.matcher().matchSubst(p, args[i])) {
        Substitution u = s;
        for (const auto& [v, val] : tau.bindings()) u.bind(v, val);
        next.push_back(std::move(u));
      }
    }
    cur = std::move(next);
  }
  if (d.cond.empty()) return cur;
  std::vector<Substitution> out;
  for (const Substitution& s : cur)
    for (Substitution& u : checkEqCondition(m_, d.cond, s)) out.push_back(std::move(u));
  return out;
}

void Engine::controlTerm(const QPtr& q, std::vector<QPtr>& out) {
  const Term& t = q->term;
  const Stack& s = q->stack;
  if (!s) return;
  const Stack& rest = s->next;
  if (s->isFrame()) {
    out.push_back(termState(t, rest));
    return;
  }
  const StratPtr& a = s->strat;
  const Substitution& theta = vctx(rest);
  switch (a->kind) {
    case StratKind::Idle:
      out.push_back(termState(t, rest));
      return;
    case StratKind::Fail:
      return;
    case StratKind::RuleApp:
      ruleApp(q, a, &out, nullptr);
      return;
    case StratKind::Test: {
      Term p = inst(a->pattern, theta);
      Condition c = theta.empty() ? a->cond : substitute(*m_.sig, a->cond, theta);
      MatchMode mode = a->mode == PatternMode::Anywhere ? MatchMode::Anywhere : MatchMode::Top;
      if (!matchWithCondition(m_, p, t, c, mode, a->mode == PatternMode::Ext).empty())
        out.push_back(termState(t, rest));
      return;
    }
    case StratKind::Seq: {
      Stack n = rest;
      for (size_t i = a->subs.size(); i-- > 0;) n = push(a->subs[i], n);
      out.push_back(termState(t, n));
      return;
    }
    case StratKind::Union:
      for (const StratPtr& b : a->subs) out.push_back(termState(t, push(b, rest)));
      return;
    case StratKind::Star:
      out.push_back(termState(t, rest));
      out.push_back(termState(t, push(a->subs[0], s)));
      return;
    case StratKind::Cond:
      out.push_back(termState(t, push(a->subs[0], push(a->subs[1], rest))));
      if (elseHolds(t, a->subs[0], theta)) out.push_back(termState(t, push(a->subs[2], rest)));
      return;
    case StratKind::MatchRew: {
      Substitution env;
      for (const auto& [v, val] : theta.bindings()) {
        bool shadowed = false;
        for (const Term& x : a->vars) shadowed = shadowed || x->name == v->name;
        if (!shadowed) env.bind(v, val);
      }
      Term p = inst(a->pattern, env);
      Condition c = env.empty() ? a->cond : substitute(*m_.sig, a->cond, env);
      MatchMode mode = a->mode == PatternMode::Anywhere ? MatchMode::Anywhere : MatchMode::Top;
      for (const MatchResult& mr : matchWithCondition(m_, p, t, c, mode, a->mode == PatternMode::Ext)) {
        Substitution frame = env;
        Substitution outer;  // bindings of the pattern except the targets
        for (const auto& [v, val] : mr.subst.bindings()) {
          frame.bind(v, val);
          bool target = false;
          for (const Term& x : a->vars) target = target || x == v;
          if (!target) outer.bind(v, val);
        }
        std::vector<QPtr> parts;
        for (size_t i = 0; i < a->vars.size(); ++i) {
          const Term* val = mr.subst.find(a->vars[i]);
          if (!val)
            fail(ErrorKind::UnboundVariable,
                 "matchrew variable " + toString(a->vars[i]) + " is not bound");
          parts.push_back(termState(*val, envStack(a->subs[i], frame)));
        }
        Term shell = substitute(*m_.sig, p, outer);
        if (!mr.context.isTop()) shell = mr.context.plug(*m_.sig, shell);
        out.push_back(subtermState(a->vars, std::move(parts), shell, rest));
      }
      return;
    }
    case StratKind::Call: {
      if (opts_.opaque.count(a->name)) return;
      std::vector<Term> args;
      for (const Term& x : a->args) args.push_back(reduce(m_, inst(x, theta)));
      Stack base = rest && rest->isFrame() ? rest->next : rest;
      for (const StratDef& d : m_.stratDefs) {
        if (d.name != a->name || d.lhs.size() != args.size()) continue;
        for (Substitution& sigma : callMatches(d, args)) {
          Stack n = !base && sigma.empty() ? push(d.body, nullptr)
                                           : push(d.body, pushFrame(std::move(sigma), base));
          out.push_back(termState(t, n));
        }
      }
      return;
    }
    default:
      fail(ErrorKind::SyntaxError, "strategy not desugared: " + toString(a));
  }
}

void Engine::systemTerm(const QPtr& q, std::vector<Transition>& out) {
  const Stack& s = q->stack;
  if (!s || s->isFrame()) return;
  const StratPtr& a = s->strat;
  if (a->kind == StratKind::RuleApp) {
    ruleApp(q, a, nullptr, &out);
  } else if (a->kind == StratKind::Call && opts_.opaque.count(a->name)) {
    for (Term& r : opaqueResults(q->term, a, vctx(s->next)))
      out.push_back({termState(std::move(r), s->next), "opaque(" + a->name + ")"});
  }
}

std::shared_ptr<const InstRule> Engine::instRule(size_t rule, const StratPtr& app,
                                                 const Substitution& theta) {
  std::vector<std::pair<std::string, Term>> rho;
  for (const auto& [v, val] : app->rho) rho.emplace_back(v, reduce(m_, inst(val, theta)));
  for (const auto& [v, val] : rho)
    if (!val.ground())
      fail(ErrorKind::UnboundVariable,
           "value for " + v + " in " + toString(app) + " has unbound variables");
  return std::make_shared<InstRule>(instantiateRule(m_, rule, rho));
}

void Engine::ruleApp(const QPtr& q, const StratPtr& a, std::vector<QPtr>* ctrl,
                     std::vector<Transition>* sys) {
  const Term& t = q->term;
  const Stack& rest = q->stack->next;
  const Substitution& theta = vctx(rest);
  for (size_t i = 0; i < m_.rules.size(); ++i) {
    const Rule& r = m_.rules[i];
    size_t nrw = countRewriteFrags(r.cond);
    if (a->all) {
      if (nrw > 0 || !sys) continue;
    } else {
      if (r.label != a->name) continue;
      if (nrw != a->subs.size())
        fail(ErrorKind::ArityMismatch,
             "rule " + r.label + " has " + std::to_string(nrw) +
                 " rewriting conditions but " + std::to_string(a->subs.size()) +
                 " strategies were given");
      if (nrw == 0 && !sys) continue;
      if (nrw > 0 && !ctrl) continue;
    }
    auto ir = a->rho.empty() ? std::make_shared<InstRule>(instantiateRule(m_, i, {}))
                             : instRule(i, a, theta);
    if (!ir->viable) continue;
    for (PendingRewrite& pr : ruleMatches(m_, t, *ir, a->top)) {
      if (pr.complete) {
        ++rewrites_;
        sys->push_back({termState(pr.result, rest), ruleLabelOrUnlabeled(r.label)});
        continue;
      }
      auto n = std::make_shared<QNode>();
      n->kind = QKind::Rewc;
      n->term = t;
      n->stack = rest;
      n->rule = i;
      n->app = a;
      n->theta = theta;
      n->inst = ir;
      n->sigma = pr.sigma;
      n->frag = pr.nextFrag;
      n->stratIndex = 0;
      n->ctx = pr.context;
      Term src = reduce(m_, applySubstitution(*m_.sig, ir->cond[pr.nextFrag].lhs, pr.sigma));
      n->inner = termState(src, envStack(a->subs[0], theta));
      n->hash = rehash(*n);
      ctrl->push_back(n);
    }
  }
}

void Engine::rewcFinish(const QPtr& q, std::vector<QPtr>* ctrl,
                        std::vector<Transition>* sys) {
  const InstRule& ir = *q->inst;
  const CondFrag& f = ir.cond[q->frag];
  Term pattern = substitute(*m_.sig, f.rhs, q->sigma);
  for (const Substitution& tau : m_.matcher().matchSubst(pattern, q->inner->term)) {
    Substitution merged = q->sigma;
    for (const auto& [v, val] : tau.bindings()) merged.bind(v, val);
    for (CondProgress& p : advanceCondition(m_, ir.cond, q->frag + 1, merged)) {
      if (p.next == ir.cond.size()) {
        if (!sys) continue;
        ++rewrites_;
        sys->push_back({termState(completeRewrite(m_, ir, p.sigma, q->ctx), q->stack),
                        ruleLabelOrUnlabeled(ir.label)});
      } else if (ctrl) {
        auto n = std::make_shared<QNode>(*q);
        n->sigma = p.sigma;
        n->frag = p.next;
        n->stratIndex = q->stratIndex + 1;
        Term src = reduce(m_, applySubstitution(*m_.sig, ir.cond[p.next].lhs, p.sigma));
        n->inner = termState(src, envStack(q->app->subs[n->stratIndex], q->theta));
        n->hash = rehash(*n);
        ctrl->push_back(n);
      }
    }
  }
}

bool Engine::elseHolds(const Term& t, const StratPtr& a, const Substitution& theta) {
  ElseKey key{t, a, theta};
  if (auto it = elseMemo_.find(key); it != elseMemo_.end()) return it->second;
  QPtr start = termState(t, envStack(a, theta));
  QMap<bool> seen;
  std::deque<QPtr> work{start};
  seen.emplace(start, true);
  bool found = false;
  while (!work.empty() && !found) {
    QPtr q = work.front();
    work.pop_front();
    if (isSolution(q)) {
      found = true;
      break;
    }
    auto visit = [&](QPtr n) {
      if (seen.emplace(n, true).second) {
        if (seen.size() > opts_.searchCeiling)
          fail(ErrorKind::StateSpaceCeiling,
               "search for the condition of a conditional strategy exceeded " +
                   std::to_string(opts_.searchCeiling) + " states");
        work.push_back(std::move(n));
      }
    };
    for (QPtr& n : controlSteps(q)) visit(std::move(n));
    for (Transition& tr : systemSteps(q)) visit(std::move(tr.target));
  }
  elseMemo_.emplace(key, !found);
  return !found;
}

std::vector<Term> Engine::opaqueResults(const Term& t, const StratPtr& call,
                                        const Substitution& theta) {
  ElseKey key{t, call, theta};
  if (auto it = opaqueMemo_.find(key); it != opaqueMemo_.end()) return it->second;
  // expand the call itself, everything below runs through the usual rules
  std::vector<QPtr> first;
  {
    std::set<std::string> saved;
    saved.swap(opts_.opaque);
    try {
      controlTerm(termState(t, envStack(call, theta)), first);
    } catch (...) {
      saved.swap(opts_.opaque);
      throw;
    }
    saved.swap(opts_.opaque);
  }
  QMap<bool> seen;
  std::deque<QPtr> work;
  std::vector<Term> results;
  std::unordered_map<Term, bool, TermHash> have;
  for (QPtr& q : first)
    if (seen.emplace(q, true).second) work.push_back(q);
  while (!work.empty()) {
    QPtr q = work.front();
    work.pop_front();
    if (isSolution(q)) {
      if (have.emplace(q->term, true).second) results.push_back(q->term);
      continue;
    }
    auto visit = [&](QPtr n) {
      if (seen.emplace(n, true).second) {
        if (seen.size() > opts_.searchCeiling)
          fail(ErrorKind::StateSpaceCeiling,
               "opaque strategy " + call->name + " exceeded " +
                   std::to_string(opts_.searchCeiling) + " states");
        work.push_back(std::move(n));
      }
    };
    for (QPtr& n : controlSteps(q)) visit(std::move(n));
    for (Transition& tr : systemSteps(q)) visit(std::move(tr.target));
  }
  opaqueMemo_.emplace(key, results);
  return results;
}

bool Engine::solutionReachable(const QPtr& q) {
  if (isSolution(q)) return true;
  if (auto it = solMemo_.find(q); it != solMemo_.end()) return it->second;
  QMap<bool> seen;
  std::deque<QPtr> work{q};
  seen.emplace(q, true);
  bool found = false;
  while (!work.empty() && !found) {
    QPtr r = work.front();
    work.pop_front();
    for (QPtr& n : controlSteps(r)) {
      if (isSolution(n)) {
        found = true;
        break;
      }
      if (seen.emplace(n, true).second) {
        if (seen.size() > opts_.searchCeiling)
          fail(ErrorKind::StateSpaceCeiling, "solution search exceeded the state bound");
        work.push_back(std::move(n));
      }
    }
  }
  solMemo_.emplace(q, found);
  return found;
}

std::vector<Transition> Engine::successors(const QPtr& q) {
  QMap<bool> seen;
  std::vector<QPtr> closure{q};
  seen.emplace(q, true);
  for (size_t i = 0; i < closure.size(); ++i) {
    for (QPtr& n : controlSteps(closure[i])) {
      if (seen.emplace(n, true).second) {
        if (seen.size() > opts_.searchCeiling)
          fail(ErrorKind::StateSpaceCeiling, "control closure exceeded the state bound");
        closure.push_back(std::move(n));
      }
    }
  }
  std::vector<Transition> out;
  QMap<std::vector<std::string>> have;
  for (const QPtr& r : closure) {
    for (Transition& tr : systemSteps(r)) {
      QPtr target = compact(tr.target);
      auto& labels = have[target];
      bool dup = false;
      for (const std::string& l : labels) dup = dup || l == tr.label;
      if (dup) continue;
      labels.push_back(tr.label);
      out.push_back({std::move(target), std::move(tr.label)});
    }
  }
  return out;
}

QPtr Engine::compact(const QPtr& q) {
  switch (q->kind) {
    case QKind::Term: {
      Stack s = q->stack;
      while (s && (s->isFrame() || s->strat->kind == StratKind::Idle)) s = s->next;
      return s == q->stack ? q : termState(q->term, s);
    }
    case QKind::Subterm: {
      std::vector<QPtr> parts;
      bool changed = false, done = true;
      for (const QPtr& p : q->parts) {
        parts.push_back(compact(p));
        changed = changed || parts.back() != p;
        done = done && isSolution(parts.back());
      }
      if (done) {
        Substitution s;
        for (size_t i = 0; i < parts.size(); ++i) s.bind(q->vars[i], parts[i]->term);
        return compact(termState(reduce(m_, substitute(*m_.sig, q->term, s)), q->stack));
      }
      if (!changed) return q;
      return subtermState(q->vars, std::move(parts), q->term, q->stack);
    }
    case QKind::Rewc: {
      QPtr inner = compact(q->inner);
      return inner == q->inner ? q : withInner(q, inner);
    }
  }
  return q;
}

std::vector<Term> Engine::srewrite(const Term& t, const StratPtr& alpha,
                                   bool depthFirst, size_t limit,
                                   SRewriteStats* stats) {
  size_t before = rewrites_;
  QPtr start = initial(t, alpha);
  QMap<bool> seen;
  std::deque<QPtr> work{start};
  seen.emplace(start, true);
  std::vector<Term> out;
  std::unordered_map<Term, bool, TermHash> have;
  while (!work.empty()) {
    QPtr q;
    if (depthFirst) {
      q = work.back();
      work.pop_back();
    } else {
      q = work.front();
      work.pop_front();
    }
    if (isSolution(q)) {
      if (have.emplace(q->term, true).second) {
        out.push_back(q->term);
        if (limit && out.size() >= limit) break;
      }
      continue;
    }
    std::vector<QPtr> next = controlSteps(q);
    for (Transition& tr : systemSteps(q)) next.push_back(std::move(tr.target));
    if (depthFirst) std::reverse(next.begin(), next.end());
    for (QPtr& n : next) {
      if (seen.emplace(n, true).second) {
        if (seen.size() > opts_.searchCeiling)
          fail(ErrorKind::StateSpaceCeiling,
               "srewrite exceeded " + std::to_string(opts_.searchCeiling) + " states");
        work.push_back(std::move(n));
      }
    }
  }
  if (stats) {
    stats->states = seen.size();
    stats->rewrites = rewrites_ - before;
  }
  return out;
}

}  // namespace smc
