#include "smc/ltl.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "smc/rewrite.hpp"

namespace smc {

// ------------------------------------------------------------------ NNF

static FormulaPtr nnf(const FormulaPtr& f, bool pos) {
  using namespace ltl;
  switch (f->kind) {
    case FKind::True: return pos ? tt() : ff();
    case FKind::False: return pos ? ff() : tt();
    case FKind::Atom: return pos ? f : neg(f);
    case FKind::Not: return nnf(f->a, !pos);
    case FKind::And:
      return pos ? conj(nnf(f->a, true), nnf(f->b, true))
                 : disj(nnf(f->a, false), nnf(f->b, false));
    case FKind::Or:
      return pos ? disj(nnf(f->a, true), nnf(f->b, true))
                 : conj(nnf(f->a, false), nnf(f->b, false));
    case FKind::Implies:
      return pos ? disj(nnf(f->a, false), nnf(f->b, true))
                 : conj(nnf(f->a, true), nnf(f->b, false));
    case FKind::Next: return next(nnf(f->a, pos));
    case FKind::Eventually:
      return pos ? until(tt(), nnf(f->a, true)) : release(ff(), nnf(f->a, false));
    case FKind::Always:
      return pos ? release(ff(), nnf(f->a, true)) : until(tt(), nnf(f->a, false));
    case FKind::Until:
      return pos ? until(nnf(f->a, true), nnf(f->b, true))
                 : release(nnf(f->a, false), nnf(f->b, false));
    case FKind::Release:
      return pos ? release(nnf(f->a, true), nnf(f->b, true))
                 : until(nnf(f->a, false), nnf(f->b, false));
  }
  return f;
}

FormulaPtr toNNF(const FormulaPtr& f) { return nnf(f, true); }
FormulaPtr negateAndNormalize(const FormulaPtr& f) { return nnf(f, false); }

// ------------------------------------------------------------------ tableau

namespace {

struct FHash {
  size_t operator()(const FormulaPtr& f) const { return f->hash; }
};
struct FEq {
  bool operator()(const FormulaPtr& a, const FormulaPtr& b) const { return formulaEqual(a, b); }
};

class Closure {
 public:
  int id(const FormulaPtr& f) {
    auto [it, fresh] = ids_.emplace(f, static_cast<int>(table.size()));
    if (fresh) table.push_back(f);
    return it->second;
  }
  std::vector<FormulaPtr> table;

 private:
  std::unordered_map<FormulaPtr, int, FHash, FEq> ids_;
};

struct GNode {
  std::set<size_t> incoming;
  std::set<int> fresh, old, next;
};

constexpr size_t kInit = static_cast<size_t>(-1);

}  // namespace

bool guardHolds(const std::vector<Literal>& guard, uint64_t labels) {
  for (const Literal& l : guard)
    if (((labels >> l.atom) & 1) != static_cast<uint64_t>(l.positive)) return false;
  return true;
}

BuchiAutomaton toBuchi(const FormulaPtr& phi, std::vector<Term> atoms) {
  if (atoms.empty()) atoms = atomsOf(phi);
  for (const Term& a : atomsOf(phi))
    if (std::find(atoms.begin(), atoms.end(), a) == atoms.end())
      fail(ErrorKind::UndefinedProposition, "atom order misses " + toString(a));
  if (atoms.size() > 64)
    fail(ErrorKind::StateSpaceCeiling, "more than 64 propositions in one formula");
  auto atomIndex = [&](const Term& t) {
    return static_cast<size_t>(std::find(atoms.begin(), atoms.end(), t) - atoms.begin());
  };

  Closure cl;
  std::vector<GNode> done;
  std::vector<GNode> work;
  {
    GNode start;
    start.incoming.insert(kInit);
    start.fresh.insert(cl.id(phi));
    work.push_back(std::move(start));
  }
  while (!work.empty()) {
    GNode n = std::move(work.back());
    work.pop_back();
    if (n.fresh.empty()) {
      bool merged = false;
      for (GNode& d : done) {
        if (d.old == n.old && d.next == n.next) {
          d.incoming.insert(n.incoming.begin(), n.incoming.end());
          merged = true;
          break;
        }
      }
      if (merged) continue;
      GNode succ;
      succ.incoming.insert(done.size());
      succ.fresh = n.next;
      done.push_back(std::move(n));
      work.push_back(std::move(succ));
      continue;
    }
    int eta = *n.fresh.begin();
    n.fresh.erase(n.fresh.begin());
    if (n.old.count(eta)) {
      work.push_back(std::move(n));
      continue;
    }
    FormulaPtr f = cl.table[eta];
    auto add = [&](GNode& g, const FormulaPtr& x) {
      int i = cl.id(x);
      if (!g.old.count(i)) g.fresh.insert(i);
    };
    switch (f->kind) {
      case FKind::False:
        break;
      case FKind::True:
        work.push_back(std::move(n));
        break;
      case FKind::Atom:
      case FKind::Not: {
        FormulaPtr opposite = f->kind == FKind::Atom ? ltl::neg(f) : f->a;
        if (n.old.count(cl.id(opposite))) break;
        n.old.insert(eta);
        work.push_back(std::move(n));
        break;
      }
      case FKind::And:
        add(n, f->a);
        add(n, f->b);
        n.old.insert(eta);
        work.push_back(std::move(n));
        break;
      case FKind::Next:
        n.old.insert(eta);
        n.next.insert(cl.id(f->a));
        work.push_back(std::move(n));
        break;
      case FKind::Or:
      case FKind::Until:
      case FKind::Release: {
        GNode n1 = n, n2 = n;
        n1.old.insert(eta);
        n2.old.insert(eta);
        if (f->kind == FKind::Or) {
          add(n1, f->a);
          add(n2, f->b);
        } else if (f->kind == FKind::Until) {
          add(n1, f->a);
          n1.next.insert(eta);
          add(n2, f->b);
        } else {
          add(n1, f->b);
          n1.next.insert(eta);
          add(n2, f->a);
          add(n2, f->b);
        }
        // explore n1 first
        work.push_back(std::move(n2));
        work.push_back(std::move(n1));
        break;
      }
      default:
        fail(ErrorKind::SyntaxError, "formula not in negation normal form: " + toString(f));
    }
  }

  // generalized acceptance: one set per until subformula
  std::vector<int> untils;
  for (size_t i = 0; i < cl.table.size(); ++i)
    if (cl.table[i]->kind == FKind::Until) untils.push_back(static_cast<int>(i));
  const size_t k = untils.size();
  auto inSet = [&](size_t node, size_t c) {
    const GNode& g = done[node];
    int u = untils[c];
    const FormulaPtr& rhs = cl.table[u]->b;
    return !g.old.count(u) || rhs->kind == FKind::True || g.old.count(cl.id(rhs));
  };
  std::vector<std::vector<Literal>> guards(done.size());
  for (size_t i = 0; i < done.size(); ++i)
    for (int j : done[i].old) {
      const FormulaPtr& f = cl.table[j];
      if (f->kind == FKind::Atom) guards[i].push_back({atomIndex(f->atom), true});
      if (f->kind == FKind::Not) guards[i].push_back({atomIndex(f->a->atom), false});
    }
  std::vector<std::vector<size_t>> out(done.size());
  std::vector<size_t> initials;
  for (size_t j = 0; j < done.size(); ++j)
    for (size_t i : done[j].incoming) (i == kInit ? initials : out[i]).push_back(j);

  // degeneralize with a counter, keeping only reachable copies
  BuchiAutomaton b;
  b.atoms = atoms;
  const size_t levels = std::max<size_t>(k, 1);
  std::map<std::pair<size_t, size_t>, size_t> ids;
  std::vector<std::pair<size_t, size_t>> pending;
  auto state = [&](size_t node, size_t c) {
    auto [it, fresh] = ids.emplace(std::make_pair(node, c), b.trans.size());
    if (fresh) {
      b.trans.emplace_back();
      b.accepting.push_back(k == 0 || (c == k - 1 && inSet(node, c)));
      pending.emplace_back(node, c);
    }
    return it->second;
  };
  for (size_t j : initials) {
    size_t s = state(j, 0);
    b.initial.push_back({s, guards[j]});
  }
  for (size_t p = 0; p < pending.size(); ++p) {
    auto [node, c] = pending[p];
    size_t from = ids[{node, c}];
    size_t c2 = k == 0 ? 0 : (inSet(node, c) ? (c + 1) % levels : c);
    for (size_t j : out[node]) {
      size_t s = state(j, c2);
      b.trans[from].push_back({s, guards[j]});
    }
  }
  return b;
}

// ------------------------------------------------------------------ lassos

std::vector<uint64_t> evalLTLOnLassos(
    const FormulaPtr& f, const std::vector<Term>& atoms, size_t prefixLen,
    size_t cycleLen, const std::vector<std::vector<std::vector<uint64_t>>>& atomBits,
    size_t count) {
  const size_t n = prefixLen + cycleLen;
  const size_t words = (count + 63) / 64;
  using Bits = std::vector<uint64_t>;
  using Vals = std::vector<Bits>;
  auto succ = [&](size_t j) { return j + 1 < n ? j + 1 : prefixLen; };
  auto filled = [&](uint64_t v) { return Vals(n, Bits(words, v)); };

  std::function<Vals(const FormulaPtr&)> eval = [&](const FormulaPtr& g) -> Vals {
    switch (g->kind) {
      case FKind::True: return filled(~0ULL);
      case FKind::False: return filled(0);
      case FKind::Atom: {
        size_t a = std::find(atoms.begin(), atoms.end(), g->atom) - atoms.begin();
        if (a == atoms.size()) return filled(0);
        Vals v(n);
        for (size_t j = 0; j < n; ++j) v[j] = atomBits[j][a];
        return v;
      }
      case FKind::Not: {
        Vals v = eval(g->a);
        for (Bits& x : v)
          for (uint64_t& w : x) w = ~w;
        return v;
      }
      case FKind::And:
      case FKind::Or:
      case FKind::Implies: {
        Vals x = eval(g->a), y = eval(g->b);
        for (size_t j = 0; j < n; ++j)
          for (size_t w = 0; w < words; ++w) {
            if (g->kind == FKind::And) x[j][w] &= y[j][w];
            else if (g->kind == FKind::Or) x[j][w] |= y[j][w];
            else x[j][w] = ~x[j][w] | y[j][w];
          }
        return x;
      }
      case FKind::Next: {
        Vals x = eval(g->a), v(n);
        for (size_t j = 0; j < n; ++j) v[j] = x[succ(j)];
        return v;
      }
      default:
        break;
    }
    // fixpoints: U and <> least, R and [] greatest
    bool least = g->kind == FKind::Until || g->kind == FKind::Eventually;
    Vals a, b;
    if (g->kind == FKind::Until || g->kind == FKind::Release) {
      a = eval(g->a);
      b = eval(g->b);
    } else {
      a = filled(g->kind == FKind::Eventually ? ~0ULL : 0);
      b = eval(g->a);
    }
    Vals v = filled(least ? 0 : ~0ULL);
    for (bool changed = true; changed;) {
      changed = false;
      for (size_t j = n; j-- > 0;) {
        const Bits& nx = v[succ(j)];
        for (size_t w = 0; w < words; ++w) {
          uint64_t val = least ? (b[j][w] | (a[j][w] & nx[w]))
                               : (b[j][w] & (a[j][w] | nx[w]));
          if (val != v[j][w]) {
            v[j][w] = val;
            changed = true;
          }
        }
      }
    }
    return v;
  };
  Bits r = eval(f)[0];
  if (count % 64) r.back() &= (1ULL << (count % 64)) - 1;
  return r;
}

bool evalLTLOnLasso(const FormulaPtr& f, const std::vector<Term>& atoms,
                    const std::vector<uint64_t>& prefix,
                    const std::vector<uint64_t>& cycle) {
  if (cycle.empty()) fail(ErrorKind::SyntaxError, "a lasso needs a nonempty cycle");
  std::vector<std::vector<std::vector<uint64_t>>> bits;
  for (const auto* part : {&prefix, &cycle})
    for (uint64_t m : *part) {
      std::vector<std::vector<uint64_t>> pos;
      for (size_t a = 0; a < atoms.size(); ++a) pos.push_back({(m >> a) & 1});
      bits.push_back(std::move(pos));
    }
  return evalLTLOnLassos(f, atoms, prefix.size(), cycle.size(), bits, 1)[0] & 1;
}

LassoAcceptor::LassoAcceptor(const BuchiAutomaton& b)
    : b_(b), start_(b.size()), words_((b.size() + 64) / 64) {}

const std::vector<BuchiAutomaton::Trans>& LassoAcceptor::out(size_t q) const {
  return q == start_ ? b_.initial : b_.trans[q];
}

static bool has(const LassoAcceptor::Set& s, size_t i) { return (s[i / 64] >> (i % 64)) & 1; }
static void put(LassoAcceptor::Set& s, size_t i) { s[i / 64] |= 1ULL << (i % 64); }

LassoAcceptor::Set LassoAcceptor::initialSet() const {
  Set s(words_, 0);
  put(s, start_);
  return s;
}

LassoAcceptor::Set LassoAcceptor::step(const Set& from, uint64_t letter) const {
  Set s(words_, 0);
  for (size_t q = 0; q <= start_; ++q)
    if (has(from, q))
      for (const auto& t : out(q))
        if (guardHolds(t.guard, letter)) put(s, t.to);
  return s;
}

LassoAcceptor::Set LassoAcceptor::afterPrefix(const std::vector<uint64_t>& prefix) const {
  Set s = initialSet();
  for (uint64_t l : prefix) s = step(s, l);
  return s;
}

bool LassoAcceptor::intersects(const Set& a, const Set& b) {
  for (size_t i = 0; i < a.size() && i < b.size(); ++i)
    if (a[i] & b[i]) return true;
  return false;
}

LassoAcceptor::Set LassoAcceptor::goodForCycle(const std::vector<uint64_t>& cycle) const {
  const size_t n = start_ + 1;
  // block graph: q -> q' when the cycle word leads from q to q'; acc marks
  // runs through an accepting state
  std::vector<std::vector<std::pair<size_t, bool>>> edges(n);
  for (size_t q = 0; q < n; ++q) {
    Set plain(words_, 0), acc(words_, 0);
    put(plain, q);
    for (uint64_t l : cycle) {
      Set np(words_, 0), na(words_, 0);
      for (size_t s = 0; s < n; ++s) {
        bool p = has(plain, s), a = has(acc, s);
        if (!p && !a) continue;
        for (const auto& t : out(s)) {
          if (!guardHolds(t.guard, l)) continue;
          if (a || b_.accepting[t.to]) put(na, t.to);
          else put(np, t.to);
        }
      }
      plain = std::move(np);
      acc = std::move(na);
    }
    for (size_t s = 0; s < n; ++s) {
      if (has(acc, s)) edges[q].push_back({s, true});
      else if (has(plain, s)) edges[q].push_back({s, false});
    }
  }
  // q is good when it sits on or reaches a cycle through an accepting edge:
  // an acc edge u -> v lies on a cycle iff u is reachable from v
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (size_t q = 0; q < n; ++q) {
    std::vector<size_t> st{q};
    reach[q][q] = true;
    while (!st.empty()) {
      size_t u = st.back();
      st.pop_back();
      for (auto [v, a] : edges[u])
        if (!reach[q][v]) {
          reach[q][v] = true;
          st.push_back(v);
        }
    }
  }
  std::vector<bool> core(n, false);
  for (size_t u = 0; u < n; ++u)
    for (auto [v, a] : edges[u])
      if (a && reach[v][u]) core[u] = true;
  Set good(words_, 0);
  for (size_t q = 0; q < n; ++q)
    for (size_t c = 0; c < n; ++c)
      if (core[c] && reach[q][c]) {
        put(good, q);
        break;
      }
  return good;
}

bool acceptsLasso(const BuchiAutomaton& b, const std::vector<uint64_t>& prefix,
                  const std::vector<uint64_t>& cycle) {
  LassoAcceptor acc(b);
  return LassoAcceptor::intersects(acc.afterPrefix(prefix), acc.goodForCycle(cycle));
}

// ------------------------------------------------------------------ NDFS

namespace {

class Product {
 public:
  Product(KripkeStructure& g, const BuchiAutomaton& b) : g_(g), b_(b) {}

  using Key = uint64_t;
  struct Succ {
    Key key;
    const std::string* label;
  };

  Key key(size_t m, size_t q) const { return static_cast<Key>(m) * b_.size() + q; }
  size_t model(Key k) const { return k / b_.size(); }
  size_t buchi(Key k) const { return k % b_.size(); }
  bool accepting(Key k) const { return b_.accepting[buchi(k)]; }

  uint64_t labels(size_t m) {
    if (m >= labels_.size()) labels_.resize(m + 1, kUnknown);
    if (labels_[m] == kUnknown) {
      uint64_t mask = 0;
      for (size_t a = 0; a < b_.atoms.size(); ++a)
        if (g_.holds(m, b_.atoms[a])) mask |= 1ULL << a;
      labels_[m] = mask;
    }
    return labels_[m];
  }

  std::vector<Key> initial() {
    std::vector<Key> out;
    size_t m0 = g_.initialState();
    for (const auto& t : b_.initial)
      if (guardHolds(t.guard, labels(m0))) out.push_back(key(m0, t.to));
    return out;
  }

  std::vector<Succ> successors(Key k) {
    std::vector<Succ> out;
    size_t q = buchi(k);
    // copy: expand may grow the state store
    std::vector<Edge> edges = g_.expand(model(k));
    for (const Edge& e : edges) {
      uint64_t l = labels(e.to);
      for (const auto& t : b_.trans[q])
        if (guardHolds(t.guard, l)) out.push_back({key(e.to, t.to), intern(e.label)});
    }
    return out;
  }

 private:
  const std::string* intern(const std::string& s) { return &*labelPool_.insert(s).first; }
  static constexpr uint64_t kUnknown = ~0ULL;
  KripkeStructure& g_;
  const BuchiAutomaton& b_;
  std::vector<uint64_t> labels_;
  std::set<std::string> labelPool_;
};

struct Frame {
  Product::Key key;
  std::vector<Product::Succ> succ;
  size_t next = 0;
  const std::string* via = nullptr;  // label of the edge into this state
};

}  // namespace

CheckResult emptinessCheck(KripkeStructure& g, const BuchiAutomaton& b) {
  Product p(g, b);
  std::unordered_set<Product::Key> blue, red;
  CheckResult res;
  auto finish = [&](std::vector<Frame>& outer, std::vector<Frame>& inner,
                    const std::string* closing) {
    Counterexample ce;
    for (size_t i = 0; i + 1 < outer.size(); ++i) {
      size_t m = p.model(outer[i].key);
      ce.prefix.push_back({m, g.stateTerm(m), *outer[i + 1].via});
    }
    for (size_t i = 0; i < inner.size(); ++i) {
      size_t m = p.model(inner[i].key);
      const std::string* l = i + 1 < inner.size() ? inner[i + 1].via : closing;
      ce.cycle.push_back({m, g.stateTerm(m), *l});
    }
    res.holds = false;
    res.counterexample = std::move(ce);
  };

  for (Product::Key root : p.initial()) {
    if (blue.count(root)) continue;
    std::vector<Frame> outer;
    blue.insert(root);
    outer.push_back({root, p.successors(root), 0, nullptr});
    while (!outer.empty()) {
      Frame& f = outer.back();
      if (f.next < f.succ.size()) {
        Product::Succ s = f.succ[f.next++];
        if (blue.insert(s.key).second) outer.push_back({s.key, p.successors(s.key), 0, s.label});
        continue;
      }
      if (p.accepting(f.key)) {
        // nested search for a cycle back to the seed
        Product::Key seed = f.key;
        std::vector<Frame> inner;
        inner.push_back({seed, p.successors(seed), 0, nullptr});
        while (!inner.empty()) {
          Frame& h = inner.back();
          if (h.next < h.succ.size()) {
            Product::Succ s = h.succ[h.next++];
            if (s.key == seed) {
              finish(outer, inner, s.label);
              res.states = g.stateCount();
              return res;
            }
            if (red.insert(s.key).second) inner.push_back({s.key, p.successors(s.key), 0, s.label});
            continue;
          }
          inner.pop_back();
        }
      }
      outer.pop_back();
    }
  }
  res.holds = true;
  res.states = g.stateCount();
  return res;
}

CheckResult modelCheck(KripkeStructure& g, const FormulaPtr& phi) {
  BuchiAutomaton b = toBuchi(negateAndNormalize(phi));
  return emptinessCheck(g, b);
}

CheckResult modelCheck(const Module& m, const Term& t, const FormulaPtr& phi,
                       const StratPtr& alpha, const ModelConfig& cfg) {
  ModelGraph g(m, t, alpha, cfg);
  return modelCheck(g, phi);
}

// ------------------------------------------------------------------ output

std::string toString(const Counterexample& ce) {
  auto elem = [](const CeStep& s) { return "{" + toString(s.term) + ", " + s.label + "}"; };
  std::string prefix, cycle;
  for (const CeStep& s : ce.prefix) {
    if (s.label == "solution") continue;
    prefix += (prefix.empty() ? "" : " ") + elem(s);
  }
  for (const CeStep& s : ce.cycle) cycle += (cycle.empty() ? "" : " ") + elem(s);
  return "counterexample(" + (prefix.empty() ? "nil" : prefix) + ", " + cycle + ")";
}

Validation validateCounterexample(const Counterexample& ce, const FormulaPtr& phi,
                                  KripkeStructure& g) {
  Validation v;
  std::vector<const CeStep*> steps;
  for (const CeStep& s : ce.prefix) steps.push_back(&s);
  for (const CeStep& s : ce.cycle) steps.push_back(&s);
  if (ce.cycle.empty()) return {false, 'b', 0, "empty cycle"};
  const size_t n = steps.size();
  auto nextOf = [&](size_t i) { return i + 1 < n ? i + 1 : ce.prefix.size(); };
  auto failAt = [&](char which, size_t i, std::string msg) {
    return Validation{false, which, i, std::move(msg)};
  };
  for (size_t i = 0; i < n; ++i) {
    const CeStep& s = *steps[i];
    const CeStep& t = *steps[nextOf(i)];
    if (s.label == "solution" || s.label == "deadlock") {
      if (s.term != t.term) return failAt('a', i, "stuttering step changes the term");
    } else if (s.label.rfind("opaque(", 0) != 0) {
      auto rs = naiveOneStep(g.module(), s.term, s.label == "unlabeled" ? "" : s.label);
      if (std::find(rs.begin(), rs.end(), t.term) == rs.end())
        return failAt('a', i, "not a one-step rewrite with " + s.label + ": " +
                                  toString(s.term) + " to " + toString(t.term));
    }
  }
  for (size_t i = 0; i < n; ++i) {
    const CeStep& s = *steps[i];
    const CeStep& t = *steps[nextOf(i)];
    if (i == 0 && s.id != g.initialState()) return failAt('b', 0, "does not start at the initial state");
    if (s.id >= g.stateCount() || g.stateTerm(s.id) != s.term)
      return failAt('b', i, "term does not match graph state");
    bool found = false;
    for (const Edge& e : g.expand(s.id)) found = found || (e.to == t.id && e.label == s.label);
    if (!found) return failAt('b', i, "no graph edge with label " + s.label);
  }
  std::vector<Term> atoms = atomsOf(phi);
  std::vector<uint64_t> prefix, cycle;
  auto mask = [&](const CeStep& s) {
    uint64_t m = 0;
    for (size_t a = 0; a < atoms.size(); ++a)
      if (g.holds(s.id, atoms[a])) m |= 1ULL << a;
    return m;
  };
  for (const CeStep& s : ce.prefix) prefix.push_back(mask(s));
  for (const CeStep& s : ce.cycle) cycle.push_back(mask(s));
  if (evalLTLOnLasso(phi, atoms, prefix, cycle))
    return failAt('c', 0, "the formula holds on the lasso");
  return v;
}

}  // namespace smc
