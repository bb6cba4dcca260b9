#include "smc/term.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace smc {

const char* errorKindName(ErrorKind k) {
  switch (k) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::DuplicateDeclaration: return "DuplicateDeclaration";
    case ErrorKind::UnknownSort: return "UnknownSort";
    case ErrorKind::UnknownOperator: return "UnknownOperator";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::AmbiguousOverload: return "AmbiguousOverload";
    case ErrorKind::UnknownStrategy: return "UnknownStrategy";
    case ErrorKind::UnknownRuleLabel: return "UnknownRuleLabel";
    case ErrorKind::CyclicImport: return "CyclicImport";
    case ErrorKind::MissingModule: return "MissingModule";
    case ErrorKind::NoSort: return "NoSort";
    case ErrorKind::UnsortableResult: return "UnsortableResult";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::NonTermination: return "NonTermination";
    case ErrorKind::StateSpaceCeiling: return "StateSpaceCeiling";
    case ErrorKind::UndefinedProposition: return "UndefinedProposition";
    case ErrorKind::PropSortMismatch: return "PropSortMismatch";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

// ---------------------------------------------------------------- sorts

SortId SortTable::add(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  SortId id = static_cast<SortId>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  close();
  return id;
}

std::optional<SortId> SortTable::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& SortTable::name(SortId s) const {
  static const std::string kErr = "[Error]";
  if (s < 0 || static_cast<size_t>(s) >= names_.size()) return kErr;
  return names_[s];
}

void SortTable::addSubsort(SortId sub, SortId super) {
  direct_.emplace_back(sub, super);
  close();
}

void SortTable::close() {
  size_t n = names_.size();
  leq_.assign(n, std::vector<bool>(n, false));
  for (auto [a, b] : direct_) leq_[a][b] = true;
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i < n; ++i)
      if (leq_[i][k])
        for (size_t j = 0; j < n; ++j)
          if (leq_[k][j]) leq_[i][j] = true;
  for (size_t i = 0; i < n; ++i)
    if (leq_[i][i])
      fail(ErrorKind::SyntaxError, "cyclic subsort relation at " + names_[i]);
  // connected components give the kinds
  kind_.assign(n, -1);
  int next = 0;
  for (size_t i = 0; i < n; ++i) {
    if (kind_[i] >= 0) continue;
    std::vector<size_t> todo{i};
    kind_[i] = next;
    while (!todo.empty()) {
      size_t x = todo.back();
      todo.pop_back();
      for (size_t j = 0; j < n; ++j)
        if (kind_[j] < 0 && (leq_[x][j] || leq_[j][x])) {
          kind_[j] = next;
          todo.push_back(j);
        }
    }
    ++next;
  }
}

bool SortTable::sameKind(SortId a, SortId b) const {
  if (a < 0 || b < 0) return false;
  return kind_[a] == kind_[b];
}

std::string sortName(const Signature& sig, SortId s) {
  return sig.sorts.name(s);
}

// ---------------------------------------------------------------- terms

bool operator==(const Term& a, const Term& b) {
  const TermNode* x = a.get();
  const TermNode* y = b.get();
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->hash != y->hash || x->kind != y->kind) return false;
  switch (x->kind) {
    case TermKind::Int: return x->ival == y->ival;
    case TermKind::Qid: return x->name == y->name;
    case TermKind::Var: return x->name == y->name && x->sort == y->sort;
    case TermKind::App:
      if (x->sym != y->sym || x->args.size() != y->args.size()) return false;
      for (size_t i = 0; i < x->args.size(); ++i)
        if (!(x->args[i] == y->args[i])) return false;
      return true;
  }
  return false;
}

int compareTerms(const Term& a, const Term& b) {
  if (a.get() == b.get()) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case TermKind::Int:
      return a->ival < b->ival ? -1 : (a->ival > b->ival ? 1 : 0);
    case TermKind::Qid: return a->name.compare(b->name);
    case TermKind::Var: {
      int c = a->name.compare(b->name);
      if (c) return c;
      return a->sort < b->sort ? -1 : (a->sort > b->sort ? 1 : 0);
    }
    case TermKind::App: {
      if (a.sym() != b.sym()) {
        int c = a.sym()->name.compare(b.sym()->name);
        if (c) return c;
      }
      size_t n = a.args().size(), m = b.args().size();
      if (n != m) return n < m ? -1 : 1;
      for (size_t i = 0; i < n; ++i) {
        int c = compareTerms(a.args()[i], b.args()[i]);
        if (c) return c;
      }
      if (a.sym() != b.sym())
        return a.sym()->index < b.sym()->index ? -1 : 1;
      return 0;
    }
  }
  return 0;
}

static SortId pickMinimal(const SortTable& st, const std::vector<SortId>& rs) {
  SortId best = kNoSort;
  for (SortId r : rs) {
    bool minimal = true;
    for (SortId q : rs)
      if (q != r && st.leq(q, r)) {
        minimal = false;
        break;
      }
    if (minimal) {
      best = r;
      break;
    }
  }
  return best;
}

Signature::Signature() {
  boolSort = sorts.add("Bool");
  zeroSort = sorts.add("Zero");
  nzNatSort = sorts.add("NzNat");
  natSort = sorts.add("Nat");
  nzIntSort = sorts.add("NzInt");
  intSort = sorts.add("Int");
  qidSort = sorts.add("Qid");
  stateSort = sorts.add("State");
  propSort = sorts.add("Prop");
  formulaSort = sorts.add("Formula");
  sorts.addSubsort(zeroSort, natSort);
  sorts.addSubsort(nzNatSort, natSort);
  sorts.addSubsort(nzNatSort, nzIntSort);
  sorts.addSubsort(natSort, intSort);
  sorts.addSubsort(nzIntSort, intSort);
  sorts.addSubsort(propSort, formulaSort);

  auto op = [&](const std::string& n, std::vector<SortId> a, SortId r,
                Builtin b) {
    OpSymbol* s = declareOp(n, a, r);
    s->builtin = b;
    s->ctor = (b == Builtin::True || b == Builtin::False);
    return s;
  };
  SortId B = boolSort, N = natSort, NzN = nzNatSort, I = intSort,
         NzI = nzIntSort, F = formulaSort;
  trueOp = op("true", {}, B, Builtin::True);
  falseOp = op("false", {}, B, Builtin::False);
  op("not", {B}, B, Builtin::Not);
  op("and", {B, B}, B, Builtin::And);
  op("or", {B, B}, B, Builtin::Or);
  succOp = op("s", {N}, NzN, Builtin::Succ);
  for (auto [name, b] : {std::pair{"+", Builtin::Add}, {"*", Builtin::Mul},
                         {"min", Builtin::Min}, {"max", Builtin::Max}}) {
    op(name, {N, N}, N, b);
    declareOp(name, {I, I}, I);
  }
  declareOp("+", {NzN, N}, NzN);
  declareOp("+", {N, NzN}, NzN);
  declareOp("*", {NzN, NzN}, NzN);
  op("-", {I, I}, I, Builtin::Sub);
  op("quo", {N, NzN}, N, Builtin::Quo);
  declareOp("quo", {I, NzI}, I);
  op("rem", {N, NzN}, N, Builtin::Rem);
  declareOp("rem", {I, NzI}, I);
  op("divides", {NzI, I}, B, Builtin::Divides);
  op("<", {I, I}, B, Builtin::Lt);
  op("<=", {I, I}, B, Builtin::Le);
  op(">", {I, I}, B, Builtin::Gt);
  op(">=", {I, I}, B, Builtin::Ge);

  for (const char* n : {"True", "False"}) declareOp(n, {}, F)->ctor = true;
  for (const char* n : {"~", "O", "<>", "[]"}) declareOp(n, {F}, F)->ctor = true;
  for (const char* n : {"/\\", "\\/", "->", "U", "R"})
    declareOp(n, {F, F}, F)->ctor = true;
  OpSymbol* sat = declareOp("|=", {stateSort, propSort}, B);
  sat->frozen = true;
  satisfiesOp = sat;
}

OpSymbol* Signature::declareOp(const std::string& name,
                               const std::vector<SortId>& args, SortId result) {
  OpSymbol* s = findOp(name, args.size());
  if (!s) {
    auto owned = std::make_unique<OpSymbol>();
    owned->name = name;
    owned->arity = args.size();
    owned->index = static_cast<int>(ops_.size());
    s = owned.get();
    ops_.push_back(std::move(owned));
    byName_[name].push_back(s);
  }
  s->decls.push_back(OpDecl{args, result});
  return s;
}

const OpSymbol* Signature::findOp(const std::string& name, size_t arity) const {
  auto it = byName_.find(name);
  if (it == byName_.end()) return nullptr;
  for (const OpSymbol* s : it->second)
    if (s->arity == arity) return s;
  return nullptr;
}

OpSymbol* Signature::findOp(const std::string& name, size_t arity) {
  auto it = byName_.find(name);
  if (it == byName_.end()) return nullptr;
  for (OpSymbol* s : it->second)
    if (s->arity == arity) return s;
  return nullptr;
}

bool Signature::hasOpNamed(const std::string& name) const {
  return byName_.count(name) > 0;
}

SortId Signature::binarySort(const OpSymbol* sym, SortId a, SortId b) const {
  if (a < 0 || b < 0) return kNoSort;
  std::vector<SortId> rs;
  for (const OpDecl& d : sym->decls)
    if (sorts.leq(a, d.args[0]) && sorts.leq(b, d.args[1]))
      rs.push_back(d.result);
  return pickMinimal(sorts, rs);
}

std::vector<SortId> Signature::candidateSorts(
    const OpSymbol* sym, const std::vector<SortId>& argSorts) const {
  std::vector<SortId> rs;
  if (sym->assoc && argSorts.size() >= 2) {
    SortId acc = argSorts[0];
    for (size_t i = 1; i < argSorts.size(); ++i)
      acc = binarySort(sym, acc, argSorts[i]);
    if (acc != kNoSort) rs.push_back(acc);
    return rs;
  }
  for (const OpDecl& d : sym->decls) {
    if (d.args.size() != argSorts.size()) continue;
    bool ok = true;
    for (size_t i = 0; i < argSorts.size() && ok; ++i)
      ok = sorts.leq(argSorts[i], d.args[i]);
    if (ok && std::find(rs.begin(), rs.end(), d.result) == rs.end())
      rs.push_back(d.result);
  }
  std::vector<SortId> minimal;
  for (SortId r : rs) {
    bool m = true;
    for (SortId q : rs)
      if (q != r && sorts.leq(q, r)) m = false;
    if (m) minimal.push_back(r);
  }
  return minimal;
}

SortId Signature::appSort(const OpSymbol* sym,
                          const std::vector<Term>& args) const {
  if (sym->assoc && args.size() >= 2) {
    SortId acc = args[0].sort();
    for (size_t i = 1; i < args.size() && acc != kNoSort; ++i)
      acc = binarySort(sym, acc, args[i].sort());
    return acc;
  }
  std::vector<SortId> rs;
  for (const OpDecl& d : sym->decls) {
    if (d.args.size() != args.size()) continue;
    bool ok = true;
    for (size_t i = 0; i < args.size() && ok; ++i)
      ok = sorts.leq(args[i].sort(), d.args[i]);
    if (ok) rs.push_back(d.result);
  }
  return pickMinimal(sorts, rs);
}

std::vector<Term> Signature::elementsOf(const OpSymbol* f, const Term& t) const {
  if (t.isApp() && t.sym() == f) return t.args();
  if (f->identity && t == Term(f->identity)) return {};
  return {t};
}

Term Signature::makeApp(const OpSymbol* sym, std::vector<Term> args) const {
  if (sym->builtin == Builtin::Succ && args.size() == 1 && args[0].isInt() &&
      args[0]->ival >= 0)
    return makeInt(args[0]->ival + 1);
  if (sym->assoc) {
    std::vector<Term> flat;
    flat.reserve(args.size());
    Term id = sym->identity ? Term(sym->identity) : Term();
    for (Term& a : args) {
      if (a.isApp() && a.sym() == sym) {
        for (const Term& b : a.args()) flat.push_back(b);
      } else if (id && a == id) {
        continue;
      } else {
        flat.push_back(std::move(a));
      }
    }
    if (flat.empty() && id) return id;
    if (flat.size() == 1) return flat[0];
    args = std::move(flat);
  } else if (sym->identity && args.size() == 2) {
    Term id(sym->identity);
    if (args[0] == id) return args[1];
    if (args[1] == id) return args[0];
  }
  if (sym->comm) std::sort(args.begin(), args.end());

  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::App;
  n->sym = sym;
  size_t h = hashCombine(0x51ed27u, static_cast<size_t>(sym->index));
  bool ground = true;
  size_t size = 1;
  for (const Term& a : args) {
    h = hashCombine(h, a.hash());
    ground = ground && a.ground();
    size += a->size;
  }
  n->hash = h;
  n->ground = ground;
  n->size = size;
  n->sort = appSort(sym, args);
  n->args = std::move(args);
  return Term(std::move(n));
}

Term Signature::makeVar(const std::string& name, SortId sort) const {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Var;
  n->name = name;
  n->sort = sort;
  n->sortName = sorts.name(sort);
  n->ground = false;
  n->hash = hashCombine(std::hash<std::string>()(name) ^ 0x7a11u,
                        static_cast<size_t>(sort));
  return Term(std::move(n));
}

Term Signature::makeInt(int64_t v) const {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Int;
  n->ival = v;
  n->sort = v == 0 ? zeroSort : (v > 0 ? nzNatSort : nzIntSort);
  n->hash = hashCombine(0x1417u, std::hash<int64_t>()(v));
  return Term(std::move(n));
}

Term Signature::makeQid(const std::string& name) const {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Qid;
  n->name = name;
  n->sort = qidSort;
  n->hash = hashCombine(0x9d1du, std::hash<std::string>()(name));
  return Term(std::move(n));
}

Term Signature::makeBool(bool b) const {
  return makeConst(b ? trueOp : falseOp);
}

static void print(std::ostringstream& os, const Term& t) {
  switch (t.kind()) {
    case TermKind::Int: os << t->ival; break;
    case TermKind::Qid: os << '\'' << t->name; break;
    case TermKind::Var: os << t->name << ':' << t->sortName; break;
    case TermKind::App:
      os << t.sym()->name;
      if (!t.args().empty()) {
        os << '(';
        for (size_t i = 0; i < t.args().size(); ++i) {
          if (i) os << ", ";
          print(os, t.args()[i]);
        }
        os << ')';
      }
      break;
  }
}

std::string toString(const Term& t) {
  if (!t) return "<null>";
  std::ostringstream os;
  print(os, t);
  return os.str();
}

// ---------------------------------------------------------------- substitutions

static int varCmp(const Term& a, const Term& b) {
  int c = a->name.compare(b->name);
  if (c) return c;
  return a->sort < b->sort ? -1 : (a->sort > b->sort ? 1 : 0);
}

const Term* Substitution::find(const Term& var) const {
  auto it = std::lower_bound(
      binds_.begin(), binds_.end(), var,
      [](const Binding& b, const Term& v) { return varCmp(b.first, v) < 0; });
  if (it != binds_.end() && varCmp(it->first, var) == 0) return &it->second;
  return nullptr;
}

const Term* Substitution::findByName(const std::string& name) const {
  for (const Binding& b : binds_)
    if (b.first->name == name) return &b.second;
  return nullptr;
}

void Substitution::bind(const Term& var, const Term& value) {
  auto it = std::lower_bound(
      binds_.begin(), binds_.end(), var,
      [](const Binding& b, const Term& v) { return varCmp(b.first, v) < 0; });
  if (it != binds_.end() && varCmp(it->first, var) == 0)
    it->second = value;
  else
    binds_.insert(it, Binding{var, value});
}

size_t Substitution::hash() const {
  size_t h = 0x5b5u;
  for (const Binding& b : binds_)
    h = hashCombine(hashCombine(h, b.first.hash()), b.second.hash());
  return h;
}

bool operator==(const Substitution& a, const Substitution& b) {
  if (a.binds_.size() != b.binds_.size()) return false;
  for (size_t i = 0; i < a.binds_.size(); ++i)
    if (a.binds_[i].first != b.binds_[i].first ||
        a.binds_[i].second != b.binds_[i].second)
      return false;
  return true;
}

bool operator<(const Substitution& a, const Substitution& b) {
  size_t n = std::min(a.binds_.size(), b.binds_.size());
  for (size_t i = 0; i < n; ++i) {
    int c = compareTerms(a.binds_[i].first, b.binds_[i].first);
    if (c) return c < 0;
    c = compareTerms(a.binds_[i].second, b.binds_[i].second);
    if (c) return c < 0;
  }
  return a.binds_.size() < b.binds_.size();
}

std::string toString(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, t] : s.bindings()) {
    if (!first) out += ", ";
    first = false;
    out += v->name + " <- " + toString(t);
  }
  return out + "}";
}

static Term substituteImpl(const Signature& sig, const Term& t,
                           const Substitution& s, bool strict) {
  if (t.ground()) return t;
  if (t.isVar()) {
    const Term* v = s.find(t);
    return v ? *v : t;
  }
  if (!t.isApp()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  bool changed = false;
  for (const Term& a : t.args()) {
    Term b = substituteImpl(sig, a, s, strict);
    changed = changed || b.get() != a.get();
    args.push_back(std::move(b));
  }
  if (!changed) return t;
  Term r = sig.makeApp(t.sym(), std::move(args));
  if (strict && r.sort() == kNoSort)
    fail(ErrorKind::UnsortableResult,
         "instantiation has no sort: " + toString(r));
  return r;
}

Term substitute(const Signature& sig, const Term& t, const Substitution& s) {
  return substituteImpl(sig, t, s, false);
}

Term applySubstitution(const Signature& sig, const Term& t,
                       const Substitution& s) {
  return substituteImpl(sig, t, s, true);
}

void collectVars(const Term& t, std::vector<Term>& out) {
  if (t.ground()) return;
  if (t.isVar()) {
    for (const Term& v : out)
      if (v == t) return;
    out.push_back(t);
    return;
  }
  for (const Term& a : t.args()) collectVars(a, out);
}

// ---------------------------------------------------------------- contexts

Context Context::extended(Step s) const {
  Context c = *this;
  c.steps_.push_back(std::move(s));
  return c;
}

Term Context::hole(const Signature& sig) const {
  Term cur = root_;
  for (const Step& st : steps_) {
    if (st.indices.size() == 1) {
      cur = cur.args()[st.indices[0]];
    } else {
      std::vector<Term> seg;
      for (uint32_t i : st.indices) seg.push_back(cur.args()[i]);
      cur = sig.makeApp(cur.sym(), std::move(seg));
    }
  }
  return cur;
}

static Term plugAt(const Signature& sig, const Term& node,
                   const std::vector<Context::Step>& steps, size_t k,
                   const Term& r) {
  if (k == steps.size()) return r;
  const Context::Step& st = steps[k];
  Term inner = r;
  if (st.indices.size() == 1 && k + 1 < steps.size())
    inner = plugAt(sig, node.args()[st.indices[0]], steps, k + 1, r);
  std::vector<Term> args;
  args.reserve(node.args().size());
  size_t j = 0;
  for (size_t i = 0; i < node.args().size(); ++i) {
    if (j < st.indices.size() && st.indices[j] == i) {
      if (j == 0) args.push_back(inner);
      ++j;
      continue;
    }
    args.push_back(node.args()[i]);
  }
  return sig.makeApp(node.sym(), std::move(args));
}

Term Context::plug(const Signature& sig, const Term& replacement) const {
  return plugAt(sig, root_, steps_, 0, replacement);
}

size_t Context::hash() const {
  size_t h = root_ ? root_.hash() : 0;
  for (const Step& s : steps_)
    for (uint32_t i : s.indices) h = hashCombine(h, i + 1);
  return h;
}

}  // namespace smc
