#include "smc/formula.hpp"

#include <functional>

namespace smc {

namespace {

FormulaPtr make(FKind k, Term atom, FormulaPtr a, FormulaPtr b) {
  auto n = std::make_shared<FNode>();
  n->kind = k;
  n->atom = std::move(atom);
  size_t h = std::hash<int>()(static_cast<int>(k)) * 0x100000001b3ULL;
  if (n->atom) h = hashCombine(h, n->atom.hash());
  if (a) {
    h = hashCombine(h, a->hash);
    n->size += a->size;
  }
  if (b) {
    h = hashCombine(h, b->hash);
    n->size += b->size;
  }
  n->hash = h;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

}  // namespace

namespace ltl {
FormulaPtr tt() {
  static const FormulaPtr t = make(FKind::True, {}, nullptr, nullptr);
  return t;
}
FormulaPtr ff() {
  static const FormulaPtr f = make(FKind::False, {}, nullptr, nullptr);
  return f;
}
FormulaPtr atom(Term p) { return make(FKind::Atom, std::move(p), nullptr, nullptr); }
FormulaPtr neg(FormulaPtr a) { return make(FKind::Not, {}, std::move(a), nullptr); }
FormulaPtr conj(FormulaPtr a, FormulaPtr b) {
  return make(FKind::And, {}, std::move(a), std::move(b));
}
FormulaPtr disj(FormulaPtr a, FormulaPtr b) {
  return make(FKind::Or, {}, std::move(a), std::move(b));
}
FormulaPtr implies(FormulaPtr a, FormulaPtr b) {
  return make(FKind::Implies, {}, std::move(a), std::move(b));
}
FormulaPtr next(FormulaPtr a) { return make(FKind::Next, {}, std::move(a), nullptr); }
FormulaPtr eventually(FormulaPtr a) {
  return make(FKind::Eventually, {}, std::move(a), nullptr);
}
FormulaPtr always(FormulaPtr a) {
  return make(FKind::Always, {}, std::move(a), nullptr);
}
FormulaPtr until(FormulaPtr a, FormulaPtr b) {
  return make(FKind::Until, {}, std::move(a), std::move(b));
}
FormulaPtr release(FormulaPtr a, FormulaPtr b) {
  return make(FKind::Release, {}, std::move(a), std::move(b));
}
}  // namespace ltl

bool formulaEqual(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->kind != b->kind || a->size != b->size)
    return false;
  if (a->kind == FKind::Atom) return a->atom == b->atom;
  return formulaEqual(a->a, b->a) && formulaEqual(a->b, b->b);
}

std::string toString(const FormulaPtr& f) {
  switch (f->kind) {
    case FKind::True: return "True";
    case FKind::False: return "False";
    case FKind::Atom: return toString(f->atom);
    case FKind::Not: return "~ " + toString(f->a);
    case FKind::Next: return "O " + toString(f->a);
    case FKind::Eventually: return "<> " + toString(f->a);
    case FKind::Always: return "[] " + toString(f->a);
    case FKind::And: return "(" + toString(f->a) + " /\\ " + toString(f->b) + ")";
    case FKind::Or: return "(" + toString(f->a) + " \\/ " + toString(f->b) + ")";
    case FKind::Implies:
      return "(" + toString(f->a) + " -> " + toString(f->b) + ")";
    case FKind::Until: return "(" + toString(f->a) + " U " + toString(f->b) + ")";
    case FKind::Release:
      return "(" + toString(f->a) + " R " + toString(f->b) + ")";
  }
  return "?";
}

std::vector<Term> atomsOf(const FormulaPtr& f) {
  std::vector<Term> out;
  std::function<void(const FormulaPtr&)> walk = [&](const FormulaPtr& g) {
    if (!g) return;
    if (g->kind == FKind::Atom) {
      for (const Term& t : out)
        if (t == g->atom) return;
      out.push_back(g->atom);
      return;
    }
    walk(g->a);
    walk(g->b);
  };
  walk(f);
  return out;
}

FormulaPtr formulaFromTerm(const Signature& sig, const Term& t) {
  if (t.isApp()) {
    const OpSymbol* f = t.sym();
    bool temporal = false;
    for (const OpDecl& d : f->decls)
      if (d.result == sig.formulaSort) temporal = true;
    if (temporal) {
      const auto& a = t.args();
      const std::string& n = f->name;
      auto sub = [&](size_t i) { return formulaFromTerm(sig, a[i]); };
      if (a.empty()) {
        if (n == "True") return ltl::tt();
        if (n == "False") return ltl::ff();
      } else if (a.size() == 1) {
        if (n == "~") return ltl::neg(sub(0));
        if (n == "O") return ltl::next(sub(0));
        if (n == "<>") return ltl::eventually(sub(0));
        if (n == "[]") return ltl::always(sub(0));
      } else {
        // assoc flattening may leave more than two arguments
        auto fold = [&](auto mk) {
          FormulaPtr acc = sub(a.size() - 1);
          for (size_t i = a.size() - 1; i-- > 0;) acc = mk(sub(i), acc);
          return acc;
        };
        if (n == "/\\") return fold(ltl::conj);
        if (n == "\\/") return fold(ltl::disj);
        if (a.size() == 2) {
          if (n == "->") return ltl::implies(sub(0), sub(1));
          if (n == "U") return ltl::until(sub(0), sub(1));
          if (n == "R") return ltl::release(sub(0), sub(1));
        }
      }
    }
  }
  if (!sig.sorts.leq(t.sort(), sig.propSort))
    fail(ErrorKind::PropSortMismatch,
         "not a proposition: " + toString(t) + " has sort " +
             sortName(sig, t.sort()));
  if (!t.ground())
    fail(ErrorKind::UnboundVariable, "proposition has variables: " + toString(t));
  return ltl::atom(t);
}

}  // namespace smc
