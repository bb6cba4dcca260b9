#include "smc/match.hpp"

#include <algorithm>
#include <unordered_set>

namespace smc {

namespace {

using Cont = std::function<void()>;

class Engine {
 public:
  explicit Engine(const Signature& sig) : sig(sig) {}

  const Signature& sig;
  std::vector<std::pair<Term, Term>> binds;
  // extension bookkeeping for the top-level AC case
  std::vector<char>* acUsed = nullptr;

  const Term* lookup(const Term& v) const {
    for (const auto& b : binds)
      if (b.first == v) return &b.second;
    return nullptr;
  }

  Substitution snapshot() const {
    Substitution s;
    for (const auto& b : binds) s.bind(b.first, b.second);
    return s;
  }

  bool fits(const Term& value, const Term& var) const {
    return sig.sorts.leq(value.sort(), var.sort());
  }

  void bindThen(const Term& var, const Term& value, const Cont& k) {
    if (const Term* old = lookup(var)) {
      if (*old == value) k();
      return;
    }
    if (!fits(value, var)) return;
    binds.emplace_back(var, value);
    k();
    binds.pop_back();
  }

  void m(const Term& p, const Term& t, const Cont& k) {
    if (p.ground()) {
      if (p == t) k();
      return;
    }
    if (p.isVar()) {
      bindThen(p, t, k);
      return;
    }
    const OpSymbol* f = p.sym();
    if (f->builtin == Builtin::Succ && t.isInt()) {
      if (t->ival > 0) m(p.args()[0], sig.makeInt(t->ival - 1), k);
      return;
    }
    if (f->assoc) {
      std::vector<Term> elems = sig.elementsOf(f, t);
      if (t.isApp() && t.sym() != f && !f->identity) return;
      if (f->comm) {
        std::vector<char> used(elems.size(), 0);
        std::vector<Term> ps = orderAC(p.args());
        mAC(f, ps, 0, elems, used, false, k);
      } else {
        mSeq(f, p.args(), 0, elems, 0, elems.size(), k);
      }
      return;
    }
    if (!t.isApp() || t.sym() != f || t.args().size() != p.args().size())
      return;
    if (f->comm && p.args().size() == 2) {
      const auto& ps = p.args();
      const auto& ts = t.args();
      m(ps[0], ts[0], [&] { m(ps[1], ts[1], k); });
      if (!(ts[0] == ts[1])) m(ps[0], ts[1], [&] { m(ps[1], ts[0], k); });
      return;
    }
    mArgs(p.args(), t.args(), 0, k);
  }

  void mArgs(const std::vector<Term>& ps, const std::vector<Term>& ts, size_t i,
             const Cont& k) {
    if (i == ps.size()) {
      k();
      return;
    }
    m(ps[i], ts[i], [&] { mArgs(ps, ts, i + 1, k); });
  }

  bool identityFits(const OpSymbol* f, const Term& var) const {
    return f->identity && fits(Term(f->identity), var);
  }

  Term segment(const OpSymbol* f, const std::vector<Term>& elems, size_t lo,
               size_t len) const {
    if (len == 0) return Term(f->identity);
    if (len == 1) return elems[lo];
    return sig.makeApp(f, std::vector<Term>(elems.begin() + lo,
                                            elems.begin() + lo + len));
  }

  void mSeq(const OpSymbol* f, const std::vector<Term>& ps, size_t i,
            const std::vector<Term>& elems, size_t lo, size_t hi,
            const Cont& k) {
    if (i == ps.size()) {
      if (lo == hi) k();
      return;
    }
    const Term& pi = ps[i];
    if (!pi.isVar()) {
      if (lo < hi) m(pi, elems[lo], [&] { mSeq(f, ps, i + 1, elems, lo + 1, hi, k); });
      return;
    }
    if (const Term* v = lookup(pi)) {
      std::vector<Term> ve = sig.elementsOf(f, *v);
      if (lo + ve.size() > hi) return;
      for (size_t j = 0; j < ve.size(); ++j)
        if (!(elems[lo + j] == ve[j])) return;
      mSeq(f, ps, i + 1, elems, lo + ve.size(), hi, k);
      return;
    }
    size_t rest = 0;
    for (size_t j = i + 1; j < ps.size(); ++j)
      if (!ps[j].isVar()) ++rest;
    size_t avail = hi - lo;
    if (avail < rest) return;
    size_t minLen = identityFits(f, pi) ? 0 : 1;
    size_t maxLen = avail - rest;
    if (i + 1 == ps.size()) minLen = maxLen;
    for (size_t len = minLen; len <= maxLen; ++len) {
      if (len == 0 && !f->identity) continue;
      Term val = segment(f, elems, lo, len);
      if (!fits(val, pi)) continue;
      binds.emplace_back(pi, val);
      mSeq(f, ps, i + 1, elems, lo + len, hi, k);
      binds.pop_back();
    }
  }

  static std::vector<Term> orderAC(const std::vector<Term>& args) {
    std::vector<Term> ps;
    for (const Term& a : args)
      if (!a.isVar()) ps.push_back(a);
    for (const Term& a : args)
      if (a.isVar()) ps.push_back(a);
    return ps;
  }

  void mAC(const OpSymbol* f, const std::vector<Term>& ps, size_t i,
           const std::vector<Term>& elems, std::vector<char>& used,
           bool absorb, const Cont& k) {
    if (i == ps.size()) {
      if (absorb) {
        k();
        return;
      }
      for (char u : used)
        if (!u) return;
      k();
      return;
    }
    const Term& pi = ps[i];
    if (!pi.isVar()) {
      for (size_t j = 0; j < elems.size(); ++j) {
        if (used[j]) continue;
        if (j > 0 && !used[j - 1] && elems[j] == elems[j - 1]) continue;
        used[j] = 1;
        m(pi, elems[j], [&] { mAC(f, ps, i + 1, elems, used, absorb, k); });
        used[j] = 0;
      }
      return;
    }
    if (const Term* v = lookup(pi)) {
      std::vector<Term> ve = sig.elementsOf(f, *v);
      std::vector<size_t> taken;
      for (const Term& e : ve) {
        bool found = false;
        for (size_t j = 0; j < elems.size(); ++j)
          if (!used[j] && elems[j] == e) {
            used[j] = 1;
            taken.push_back(j);
            found = true;
            break;
          }
        if (!found) {
          for (size_t j : taken) used[j] = 0;
          return;
        }
      }
      mAC(f, ps, i + 1, elems, used, absorb, k);
      for (size_t j : taken) used[j] = 0;
      return;
    }
    std::vector<size_t> free;
    for (size_t j = 0; j < elems.size(); ++j)
      if (!used[j]) free.push_back(j);
    bool last = (i + 1 == ps.size()) && !absorb;
    auto tryChoice = [&](const std::vector<size_t>& pick) {
      if (pick.empty() && !identityFits(f, pi)) return;
      std::vector<Term> sub;
      for (size_t j : pick) sub.push_back(elems[j]);
      Term val = sub.empty() ? Term(f->identity)
                             : (sub.size() == 1 ? sub[0]
                                                : sig.makeApp(f, std::move(sub)));
      if (!fits(val, pi)) return;
      for (size_t j : pick) used[j] = 1;
      binds.emplace_back(pi, val);
      mAC(f, ps, i + 1, elems, used, absorb, k);
      binds.pop_back();
      for (size_t j : pick) used[j] = 0;
    };
    if (last) {
      tryChoice(free);
      return;
    }
    size_t n = free.size();
    if (n > 20) fail(ErrorKind::StateSpaceCeiling, "AC matching too wide");
    for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
      std::vector<size_t> pick;
      for (size_t b = 0; b < n; ++b)
        if (mask & (uint64_t{1} << b)) pick.push_back(free[b]);
      tryChoice(pick);
    }
  }
};

struct ResultSet {
  std::vector<MatchResult> out;
  std::unordered_set<size_t> seenHashes;

  void add(Substitution s, Context c) {
    size_t h = hashCombine(s.hash(), c.hash());
    if (seenHashes.count(h)) {
      for (const MatchResult& r : out)
        if (r.subst == s && r.context == c) return;
    }
    seenHashes.insert(h);
    out.push_back(MatchResult{std::move(s), std::move(c)});
  }
};

void matchExtended(Engine& e, const Term& p, const Term& t, const Context& base,
                   ResultSet& rs) {
  const OpSymbol* f = p.sym();
  const std::vector<Term>& elems = t.args();
  size_t n = elems.size();
  if (f->comm) {
    std::vector<char> used(n, 0);
    std::vector<Term> ps = Engine::orderAC(p.args());
    e.mAC(f, ps, 0, elems, used, true, [&] {
      Context::Step st;
      for (size_t j = 0; j < n; ++j)
        if (used[j]) st.indices.push_back(static_cast<uint32_t>(j));
      if (st.indices.empty()) return;
      if (st.indices.size() == n)
        rs.add(e.snapshot(), base);
      else
        rs.add(e.snapshot(), base.extended(st));
    });
    return;
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j <= n; ++j) {
      e.mSeq(f, p.args(), 0, elems, i, j, [&] {
        if (i == 0 && j == n) {
          rs.add(e.snapshot(), base);
        } else {
          Context::Step st;
          for (size_t x = i; x < j; ++x)
            st.indices.push_back(static_cast<uint32_t>(x));
          rs.add(e.snapshot(), base.extended(st));
        }
      });
    }
}

void matchAt(Engine& e, const Term& p, const Term& t, const Context& ctx,
             bool ext, ResultSet& rs) {
  if (ext && p.isApp() && p.sym()->assoc && t.isApp() && t.sym() == p.sym()) {
    matchExtended(e, p, t, ctx, rs);
    return;
  }
  e.m(p, t, [&] { rs.add(e.snapshot(), ctx); });
}

template <class F>
void forEachSubset(size_t n, size_t minSize, size_t maxSize, F&& f) {
  if (n > 20) fail(ErrorKind::StateSpaceCeiling, "AC position set too wide");
  for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
    size_t c = static_cast<size_t>(__builtin_popcountll(mask));
    if (c < minSize || c > maxSize) continue;
    Context::Step st;
    for (size_t b = 0; b < n; ++b)
      if (mask & (uint64_t{1} << b)) st.indices.push_back(static_cast<uint32_t>(b));
    f(st);
  }
}

template <class F>
void forEachSegment(const Term& t, F&& f) {
  size_t n = t.args().size();
  if (n < 3) return;
  if (t.sym()->comm) {
    forEachSubset(n, 2, n - 1, f);
    return;
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 2; j <= n; ++j) {
      if (i == 0 && j == n) continue;
      Context::Step st;
      for (size_t x = i; x < j; ++x) st.indices.push_back(static_cast<uint32_t>(x));
      f(st);
    }
}

void anywhere(Engine& e, const Term& p, const Term& t, const Context& ctx,
              const OpSymbol* parent, ResultSet& rs) {
  bool skip = p.isApp() && p.sym()->assoc && parent == p.sym();
  if (!skip) matchAt(e, p, t, ctx, true, rs);
  if (!t.isApp()) return;
  if (p.isVar() && t.sym()->assoc) {
    forEachSegment(t, [&](const Context::Step& st) {
      Context c = ctx.extended(st);
      Term seg = c.hole(e.sig);
      e.m(p, seg, [&] { rs.add(e.snapshot(), c); });
    });
  }
  for (size_t i = 0; i < t.args().size(); ++i)
    anywhere(e, p, t.args()[i], ctx.extended({{static_cast<uint32_t>(i)}}),
             t.sym(), rs);
}

}  // namespace

std::vector<MatchResult> Matcher::matchTop(const Term& p, const Term& t,
                                           bool ext) const {
  Engine e(sig_);
  ResultSet rs;
  matchAt(e, p, t, Context(t), ext, rs);
  return std::move(rs.out);
}

std::vector<MatchResult> Matcher::matchAnywhere(const Term& p,
                                                const Term& t) const {
  Engine e(sig_);
  ResultSet rs;
  anywhere(e, p, t, Context(t), nullptr, rs);
  return std::move(rs.out);
}

std::vector<MatchResult> Matcher::match(const Term& p, const Term& t,
                                        MatchMode mode, bool ext) const {
  return mode == MatchMode::Top ? matchTop(p, t, ext) : matchAnywhere(p, t);
}

std::vector<Substitution> Matcher::matchSubst(const Term& p,
                                              const Term& t) const {
  std::vector<Substitution> out;
  for (MatchResult& r : matchTop(p, t, false)) out.push_back(std::move(r.subst));
  return out;
}

bool Matcher::matches(const Term& p, const Term& t) const {
  Engine e(sig_);
  bool found = false;
  struct Stop {};
  try {
    e.m(p, t, [&] {
      found = true;
      throw Stop{};
    });
  } catch (const Stop&) {
  }
  return found;
}

static void collectPositions(const Signature& sig, const Term& t,
                             const Context& ctx, std::vector<Context>& out) {
  out.push_back(ctx);
  if (!t.isApp()) return;
  if (t.sym()->assoc) forEachSegment(t, [&](const Context::Step& st) {
      out.push_back(ctx.extended(st));
    });
  for (size_t i = 0; i < t.args().size(); ++i)
    collectPositions(sig, t.args()[i],
                     ctx.extended({{static_cast<uint32_t>(i)}}), out);
}

std::vector<Context> explicitPositions(const Signature& sig, const Term& t) {
  std::vector<Context> out;
  collectPositions(sig, t, Context(t), out);
  return out;
}

}  // namespace smc
