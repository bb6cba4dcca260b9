#include "doctest.h"
#include "support.hpp"

using namespace smc;
using ts::term;

namespace {

const char* kPeano = R"(
fmod PEANO is
  op plus : Nat Nat -> Nat .
  vars A B : Nat .
  eq plus(0, B) = B .
  eq plus(s(A), B) = s(plus(A, B)) .
endfm
)";

const char* kAC = R"(
fmod ACM is
  sorts A B .
  subsort A < B .
  ops a1 a2 : -> A [ctor] .
  op b1 : -> B [ctor] .
  op g : B -> A [ctor] .
  op h : B B -> B [ctor assoc comm] .
  vars X Y : A .
  vars U V : B .
endfm
)";

std::shared_ptr<Module> load(const char* text, const std::string& name = "") {
  return parseFile(text).module(name);
}

using Bindings = std::map<std::string, Term>;

Bindings bindings(const Substitution& s) {
  Bindings b;
  for (const auto& [v, val] : s.bindings()) b[v->name] = val;
  return b;
}

// all subterms plus every sub-multiset of arguments of h-nodes
void candidates(const Signature& sig, const Term& t, std::set<Term>& out) {
  out.insert(t);
  if (!t.isApp()) return;
  for (const Term& a : t.args()) candidates(sig, a, out);
  if (t.sym()->assoc && t.args().size() > 2) {
    const auto& args = t.args();
    size_t n = args.size();
    for (size_t mask = 1; mask < (size_t{1} << n); ++mask) {
      if (__builtin_popcountll(mask) < 2) continue;
      std::vector<Term> sub;
      for (size_t i = 0; i < n; ++i)
        if (mask >> i & 1) sub.push_back(args[i]);
      Term u = sub[0];
      for (size_t i = 1; i < sub.size(); ++i) u = sig.makeApp(t.sym(), {u, sub[i]});
      out.insert(u);
    }
  }
}

std::set<Bindings> bruteForceMatches(const Module& m, const Term& p, const Term& t) {
  const Signature& sig = *m.sig;
  std::vector<Term> vars;
  collectVars(p, vars);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  std::set<Term> pool;
  candidates(sig, t, pool);
  std::vector<std::vector<Term>> options;
  for (const Term& v : vars) {
    std::vector<Term> o;
    for (const Term& c : pool)
      if (sig.sorts.leq(c.sort(), v.sort())) o.push_back(c);
    options.push_back(std::move(o));
  }
  std::set<Bindings> out;
  std::vector<size_t> idx(vars.size(), 0);
  for (;;) {
    Substitution s;
    Bindings b;
    bool empty = false;
    for (size_t i = 0; i < vars.size(); ++i) {
      if (options[i].empty()) {
        empty = true;
        break;
      }
      s.bind(vars[i], options[i][idx[i]]);
      b[vars[i]->name] = options[i][idx[i]];
    }
    if (empty) return out;
    if (applySubstitution(sig, p, s) == t) out.insert(b);
    size_t k = 0;
    while (k < vars.size() && ++idx[k] == options[k].size()) idx[k++] = 0;
    if (k == vars.size()) return out;
  }
}

struct ACGen {
  std::mt19937 rng;
  const Module& m;
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  // a random term of sort B (or A when narrow) with at most `size` symbols
  std::string gen(int size, bool narrow, bool vars) {
    if (size <= 1 || pick(3) == 0) {
      std::vector<std::string> leaves = {"a1", "a2"};
      if (!narrow) leaves.push_back("b1");
      if (vars) {
        leaves.push_back(pick(2) ? "X" : "Y");
        if (!narrow) leaves.push_back(pick(2) ? "U" : "V");
      }
      return leaves[pick(static_cast<int>(leaves.size()))];
    }
    if (narrow || pick(3) == 0) return "g(" + gen(size - 1, false, vars) + ")";
    int left = 1 + pick(size - 2 > 0 ? size - 2 : 1);
    return "h(" + gen(left, false, vars) + ", " + gen(size - 1 - left, false, vars) + ")";
  }
};

}  // namespace

TEST_CASE("reduce applies the rotation equation") {
  auto m = ts::philosophers();
  Term t = parseTerm("table(list(fork, phil(none, 0, none)))", *m);
  CHECK(toString(reduce(*m, t)) == "table(list(phil(none, 0, none), fork))");
}

TEST_CASE("reduce is idempotent on normal forms") {
  auto m = ts::philosophers();
  Term t = term(*m, "initial");
  CHECK_TERM(reduce(*m, t), t);
  CHECK(toString(t).rfind("table(list(phil(none, 0, none), fork, phil(none, 1, none)", 0) == 0);
}

TEST_CASE("reduce evaluates Peano addition") {
  auto m = load(kPeano);
  CHECK_TERM(reduce(*m, parseTerm("plus(s(s(0)), s(0))", *m)), parseTerm("s(s(s(0)))", *m, true));
  CHECK(toString(reduce(*m, parseTerm("plus(s(s(0)), s(0))", *m))) == "3");
}

TEST_CASE("reduce stops at the equation ceiling") {
  auto m = load(R"(
fmod LOOP is
  sort T .
  ops a b : -> T .
  eq a = b .
  eq b = a .
endfm
)");
  m->reduceLimit = 1000;
  try {
    reduce(*m, parseTerm("a", *m));
    FAIL("expected NonTermination");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonTermination);
    CHECK(std::string(e.what()).find("1000") != std::string::npos);
  }
}

TEST_CASE("owise equations apply only after the others fail") {
  auto m = ts::philosophers();
  Term eats = term(*m, "|=(table(list(phil(fork, 2, fork), fork)), eats(2))");
  CHECK(toString(eats) == "true");
  CHECK(toString(term(*m, "|=(initial, eats(2))")) == "false");
}

TEST_CASE("normal forms do not depend on equation order") {
  auto base = ts::philosophers();
  std::vector<std::string> inputs = {
      "initial", "initial(3)", "table(list(fork, phil(none, 0, none), fork, phil(fork, 1, none)))",
      "|=(initial, used(3))", "|=(table(list(phil(fork, 0, fork), fork)), eats(0))"};
  std::vector<Term> expected;
  for (const auto& s : inputs) expected.push_back(reduce(*base, parseTerm(s, *base)));
  std::mt19937 rng(7);
  for (int round = 0; round < 10; ++round) {
    Module copy = *base;
    std::shuffle(copy.equations.begin(), copy.equations.end(), rng);
    copy.finalize();
    for (size_t i = 0; i < inputs.size(); ++i)
      CHECK_TERM(reduce(copy, parseTerm(inputs[i], copy)), expected[i]);
  }
  auto sched = ts::scheduling();
  Term s0 = reduce(*sched, parseTerm("initial(3, pIo)", *sched));
  for (int round = 0; round < 5; ++round) {
    Module copy = *sched;
    std::shuffle(copy.equations.begin(), copy.equations.end(), rng);
    copy.finalize();
    CHECK_TERM(reduce(copy, parseTerm("initial(3, pIo)", copy)), s0);
  }
}

TEST_CASE("a variable matches any term") {
  auto m = ts::philosophers();
  Term x = parseTerm("T:Table", *m);
  Term t = term(*m, "initial");
  auto r = m->matcher().matchTop(x, t, false);
  REQUIRE(r.size() == 1);
  CHECK_TERM(*r[0].subst.find(x), t);
  CHECK(r[0].context.isTop());
}

TEST_CASE("anywhere matching enumerates contiguous list segments") {
  auto m = ts::dinnerRules();
  Term p = parseTerm("list(fork, phil(none, Id, X))", *m);
  std::string elems;
  for (int i = 0; i < 5; ++i)
    elems += std::string(i ? ", " : "") + "fork, phil(none, " + std::to_string(i) + ", none)";
  Term subject = parseTerm("list(" + elems + ")", *m);
  auto r = m->matcher().matchAnywhere(p, subject);
  std::set<std::string> ids;
  for (const auto& mr : r) ids.insert(toString(*mr.subst.findByName("Id")));
  CHECK(r.size() == 5);
  CHECK(ids == std::set<std::string>{"0", "1", "2", "3", "4"});

  // in the initial table the first philosopher has no fork to its left
  auto full = ts::philosophers();
  Term init = term(*full, "initial");
  size_t brute = 0;
  const auto& args = init.args()[0].args();
  for (size_t i = 0; i + 1 < args.size(); ++i)
    brute += toString(args[i]) == "fork" && toString(args[i + 1]).rfind("phil(none,", 0) == 0;
  Term p2 = parseTerm("list(fork, phil(none, Id:Nat, X:Obj))", *full);
  CHECK(full->matcher().matchAnywhere(p2, init).size() == brute);
  CHECK(brute == 4);
}

TEST_CASE("commutative matching deduplicates symmetric pairs") {
  auto m = load(R"(
fmod PAIR is
  sort E .
  ops a b : -> E [ctor] .
  op pair : E E -> E [ctor comm] .
  var X : E .
endfm
)");
  Term p = parseTerm("pair(X, a)", *m);
  auto ab = m->matcher().matchSubst(p, parseTerm("pair(a, b)", *m));
  REQUIRE(ab.size() == 1);
  CHECK(toString(*ab[0].findByName("X")) == "b");
  auto aa = m->matcher().matchSubst(p, parseTerm("pair(a, a)", *m));
  REQUIRE(aa.size() == 1);
  CHECK(toString(*aa[0].findByName("X")) == "a");
}

TEST_CASE("AC matching agrees with brute force") {
  auto m = load(kAC);
  ACGen gen{std::mt19937(11), *m};
  size_t nonempty = 0;
  for (int i = 0; i < 300; ++i) {
    Term p = parseTerm(gen.gen(4, false, true), *m);
    Term t = parseTerm(gen.gen(8, false, false), *m);
    if (t->size > 8) continue;
    std::set<Bindings> got;
    for (const auto& mr : m->matcher().matchTop(p, t, false)) got.insert(bindings(mr.subst));
    auto want = bruteForceMatches(*m, p, t);
    nonempty += !want.empty();
    INFO(toString(p), " vs ", toString(t));
    CHECK(got == want);
  }
  CHECK(nonempty > 20);
}

TEST_CASE("applySubstitution replaces variables") {
  auto m = ts::dinnerRules();
  Term t = parseTerm("phil(X, Id, none)", *m);
  CHECK_TERM(applySubstitution(*m->sig, t, Substitution{}), t);
  Substitution s;
  s.bind(m->vars.at("X"), term(*m, "fork"));
  s.bind(m->vars.at("Id"), term(*m, "3"));
  CHECK(toString(applySubstitution(*m->sig, t, s)) == "phil(fork, 3, none)");
}

TEST_CASE("substitution into an associative argument splices the arguments") {
  auto m = ts::dinnerRules();
  Term t = parseTerm("list(L, fork)", *m);
  Substitution s;
  s.bind(m->vars.at("L"), parseTerm("list(fork, phil(none, 0, none))", *m));
  Term r = applySubstitution(*m->sig, t, s);
  CHECK_TERM(r, parseTerm("list(list(fork, phil(none, 0, none)), fork)", *m));
  CHECK(r.args().size() == 3);
  Substitution e;
  e.bind(m->vars.at("L"), term(*m, "empty"));
  CHECK_TERM(applySubstitution(*m->sig, t, e), term(*m, "fork"));
}

TEST_CASE("substitutions compose") {
  auto m = load(kAC);
  ACGen gen{std::mt19937(5), *m};
  const char* names[] = {"X", "Y", "U", "V"};
  for (int i = 0; i < 200; ++i) {
    Term t = parseTerm(gen.gen(6, false, true), *m);
    Substitution s1, s2, composed;
    for (const char* n : names) {
      Term v = m->vars.at(n);
      bool narrow = v.sort() == *m->sig->sorts.find("A");
      if (gen.pick(2)) s1.bind(v, parseTerm(gen.gen(3, narrow, true), *m));
      s2.bind(v, parseTerm(gen.gen(3, narrow, false), *m));
    }
    for (const char* n : names) {
      Term v = m->vars.at(n);
      const Term* a = s1.find(v);
      composed.bind(v, a ? applySubstitution(*m->sig, *a, s2) : *s2.find(v));
    }
    INFO(toString(t));
    CHECK_TERM(applySubstitution(*m->sig, applySubstitution(*m->sig, t, s1), s2),
               applySubstitution(*m->sig, t, composed));
  }
}

TEST_CASE("printing and parsing round-trips canonical terms") {
  auto m = load(kAC);
  ACGen gen{std::mt19937(3), *m};
  for (int i = 0; i < 300; ++i) {
    Term t = parseTerm(gen.gen(8, false, gen.pick(2) == 0), *m);
    CHECK_TERM(parseTerm(toString(t), *m), t);
  }
  auto p = ts::philosophers();
  for (const char* s : {"initial", "initial(7)", "table(list(phil(fork, 0, fork), fork, fork))"}) {
    Term t = term(*p, s);
    CHECK_TERM(parseTerm(toString(t), *p), t);
  }
}

TEST_CASE("checkEqCondition") {
  auto m = ts::dinnerRules();
  const Signature& sig = *m->sig;
  Substitution sigma;
  CHECK(checkEqCondition(*m, {}, sigma).size() == 1);

  CondFrag div{CondFrag::BoolTest, parseTerm("divides(2, Id)", *m), {}, kNoSort, ""};
  Substitution four, three;
  four.bind(m->vars.at("Id"), sig.makeInt(4));
  three.bind(m->vars.at("Id"), sig.makeInt(3));
  CHECK(checkEqCondition(*m, {div}, four).size() == 1);
  CHECK(checkEqCondition(*m, {div}, three).empty());

  // list(H, T) := three-element list, including the empty parts
  Term h = parseTerm("H:List", *m), tl = parseTerm("T:List", *m);
  CondFrag split{CondFrag::Match, parseTerm("list(H:List, T:List)", *m),
                 parseTerm("list(phil(none, 0, none), fork, phil(none, 1, none))", *m), kNoSort, ""};
  auto splits = checkEqCondition(*m, {split}, sigma);
  std::set<std::pair<std::string, std::string>> got;
  for (const auto& s : splits) got.insert({toString(*s.find(h)), toString(*s.find(tl))});
  std::set<std::pair<std::string, std::string>> want;
  std::vector<std::string> el = {"phil(none, 0, none)", "fork", "phil(none, 1, none)"};
  auto join = [&](size_t a, size_t b) {
    if (a == b) return std::string("empty");
    if (b - a == 1) return el[a];
    std::string r = "list(";
    for (size_t i = a; i < b; ++i) r += (i > a ? ", " : "") + el[i];
    return r + ")";
  };
  for (size_t k = 0; k <= 3; ++k) want.insert({join(0, k), join(k, 3)});
  CHECK(got == want);

  CondFrag eq{CondFrag::Equal, parseTerm("Q:Nat", *m), sig.makeInt(3), kNoSort, ""};
  CHECK_THROWS_AS(checkEqCondition(*m, {eq}, sigma), Error);
  try {
    checkEqCondition(*m, {eq}, sigma);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnboundVariable);
  }

  CondFrag sortTest{CondFrag::SortTest, parseTerm("fork", *m), {}, *sig.sorts.find("Obj"), "Obj"};
  CHECK(checkEqCondition(*m, {sortTest}, sigma).size() == 1);
  sortTest.sort = *sig.sorts.find("Phil");
  CHECK(checkEqCondition(*m, {sortTest}, sigma).empty());
}

static std::set<Term> completeResults(const Module& m, const Term& t, const std::string& label,
                                      bool top = false) {
  std::set<Term> out;
  for (size_t i = 0; i < m.rules.size(); ++i) {
    if (m.rules[i].label != label) continue;
    InstRule ir = instantiateRule(m, i, {});
    for (const PendingRewrite& pr : ruleMatches(m, t, ir, top))
      if (pr.complete) out.insert(pr.result);
  }
  return out;
}

TEST_CASE("ruleMatches examples") {
  auto m = ts::philosophers();
  Term t = parseTerm("list(fork, phil(none, 0, none), fork)", *m, true);
  auto left = completeResults(*m, t, "left");
  REQUIRE(left.size() == 1);
  CHECK(toString(*left.begin()) == "list(phil(fork, 0, none), fork)");
  CHECK(completeResults(*m, term(*m, "initial"), "release").empty());

  auto s = ts::scheduling();
  Term blocked = term(*s, "ms(proc(1, seq(wait('mutex), crit)), cell('mutex, 0), 0)");
  CHECK(completeResults(*s, blocked, "exec").empty());
  Term open = term(*s, "ms(proc(1, seq(wait('mutex), crit)), cell('mutex, 1), 0)");
  CHECK(completeResults(*s, open, "exec").size() == 1);
}

TEST_CASE("ruleMatches results are one-step rewrites") {
  struct Case {
    std::shared_ptr<Module> m;
    std::string start;
  };
  std::vector<Case> cases = {{ts::philosophers(), "initial(3)"},
                             {ts::scheduling(), "initial(2, pIo)"}};
  for (const Case& c : cases) {
    RewriteGraph g(*c.m, term(*c.m, c.start));
    g.expandAll();
    std::set<std::string> labels;
    for (const Rule& r : c.m->rules) labels.insert(r.label);
    for (size_t id = 0; id < g.stateCount() && id < 200; ++id) {
      Term t = g.stateTerm(id);
      for (const std::string& l : labels) {
        auto naive = naiveOneStep(*c.m, t, l);
        std::set<Term> oracle(naive.begin(), naive.end());
        for (const Term& r : completeResults(*c.m, t, l)) {
          INFO(toString(t), " --", l, "-> ", toString(r));
          CHECK(oracle.count(r));
        }
      }
    }
  }
}

TEST_CASE("least sorts") {
  auto m = ts::dinnerRules();
  const auto& sorts = m->sig->sorts;
  CHECK(term(*m, "fork").sort() == *sorts.find("Obj"));
  CHECK(m->vars.at("Id").sort() == *sorts.find("Nat"));
  CHECK(parseTerm("Id", *m).sort() == *sorts.find("Nat"));
  CHECK(term(*m, "list(phil(none, 0, none), fork)").sort() == *sorts.find("List"));
  CHECK(term(*m, "phil(none, 0, none)").sort() == *sorts.find("Phil"));
  CHECK(sorts.leq(*sorts.find("Phil"), *sorts.find("List")));
  CHECK_FALSE(sorts.leq(*sorts.find("List"), *sorts.find("Phil")));
}
