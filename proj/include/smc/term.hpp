// Order-sorted terms modulo associativity, commutativity and identity.
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "smc/error.hpp"

namespace smc {

using SortId = int;
constexpr SortId kNoSort = -1;

class SortTable {
 public:
  SortId add(const std::string& name);
  std::optional<SortId> find(const std::string& name) const;
  const std::string& name(SortId s) const;
  size_t size() const { return names_.size(); }

  void addSubsort(SortId sub, SortId super);
  /// Recomputes the reflexive-transitive closure. Throws on cycles.
  void close();
  bool leq(SortId a, SortId b) const {
    if (a < 0 || b < 0) return false;
    return a == b || leq_[a][b];
  }
  bool sameKind(SortId a, SortId b) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, SortId> index_;
  std::vector<std::pair<SortId, SortId>> direct_;
  std::vector<std::vector<bool>> leq_;
  std::vector<int> kind_;
};

enum class Builtin {
  None,
  True,
  False,
  Not,
  And,
  Or,
  Succ,
  Add,
  Sub,
  Mul,
  Quo,
  Rem,
  Divides,
  Lt,
  Le,
  Gt,
  Ge,
  Min,
  Max,
};

struct OpDecl {
  std::vector<SortId> args;
  SortId result = kNoSort;
};

class TermNode;
class Term;

struct OpSymbol {
  std::string name;
  size_t arity = 0;
  std::vector<OpDecl> decls;
  bool assoc = false;
  bool comm = false;
  bool ctor = false;
  bool frozen = false;
  Builtin builtin = Builtin::None;
  std::shared_ptr<const TermNode> identity;
  int index = 0;
};

enum class TermKind : uint8_t { Int, Qid, App, Var };

class TermNode {
 public:
  TermKind kind;
  SortId sort = kNoSort;
  const OpSymbol* sym = nullptr;
  std::vector<Term> args;
  int64_t ival = 0;
  std::string name;  // variable or quoted identifier
  std::string sortName;  // variables only
  size_t hash = 0;
  bool ground = true;
  size_t size = 1;
};

/// Immutable shared term handle. Terms built through a Signature are kept in
/// flattened canonical form, so structural equality is equality modulo axioms.
class Term {
 public:
  Term() = default;
  explicit Term(std::shared_ptr<const TermNode> n) : n_(std::move(n)) {}

  explicit operator bool() const { return static_cast<bool>(n_); }
  const TermNode* operator->() const { return n_.get(); }
  const TermNode& operator*() const { return *n_; }
  const TermNode* get() const { return n_.get(); }
  const std::shared_ptr<const TermNode>& node() const { return n_; }

  TermKind kind() const { return n_->kind; }
  bool isVar() const { return n_->kind == TermKind::Var; }
  bool isApp() const { return n_->kind == TermKind::App; }
  bool isInt() const { return n_->kind == TermKind::Int; }
  bool isQid() const { return n_->kind == TermKind::Qid; }
  const OpSymbol* sym() const { return n_->sym; }
  const std::vector<Term>& args() const { return n_->args; }
  SortId sort() const { return n_->sort; }
  size_t hash() const { return n_->hash; }
  bool ground() const { return n_->ground; }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  std::shared_ptr<const TermNode> n_;
};

/// Total order: literals first, then applications by head name, arity and
/// arguments, then variables.
int compareTerms(const Term& a, const Term& b);
inline bool operator<(const Term& a, const Term& b) {
  return compareTerms(a, b) < 0;
}

struct TermHash {
  size_t operator()(const Term& t) const { return t.hash(); }
};

inline size_t hashCombine(size_t seed, size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

class Signature {
 public:
  Signature();
  Signature(const Signature&) = delete;
  Signature& operator=(const Signature&) = delete;

  SortTable sorts;

  OpSymbol* declareOp(const std::string& name, const std::vector<SortId>& args,
                      SortId result);
  const OpSymbol* findOp(const std::string& name, size_t arity) const;
  OpSymbol* findOp(const std::string& name, size_t arity);
  bool hasOpNamed(const std::string& name) const;
  const std::vector<std::unique_ptr<OpSymbol>>& ops() const { return ops_; }

  Term makeApp(const OpSymbol* sym, std::vector<Term> args) const;
  Term makeConst(const OpSymbol* sym) const { return makeApp(sym, {}); }
  Term makeVar(const std::string& name, SortId sort) const;
  Term makeInt(int64_t v) const;
  Term makeQid(const std::string& name) const;
  Term makeBool(bool b) const;

  /// Least sort of an application over the given argument sorts, kNoSort when
  /// no declaration fits.
  SortId appSort(const OpSymbol* sym, const std::vector<Term>& args) const;
  /// Minimal result sorts among all fitting declarations.
  std::vector<SortId> candidateSorts(const OpSymbol* sym,
                                     const std::vector<SortId>& argSorts) const;

  /// Elements of t viewed as an argument list of the associative symbol f.
  std::vector<Term> elementsOf(const OpSymbol* f, const Term& t) const;

  SortId boolSort, zeroSort, nzNatSort, natSort, nzIntSort, intSort, qidSort;
  SortId stateSort, propSort, formulaSort;
  const OpSymbol *trueOp = nullptr, *falseOp = nullptr, *succOp = nullptr;
  const OpSymbol* satisfiesOp = nullptr;

 private:
  SortId binarySort(const OpSymbol* sym, SortId a, SortId b) const;

  std::vector<std::unique_ptr<OpSymbol>> ops_;
  std::unordered_map<std::string, std::vector<OpSymbol*>> byName_;
};

std::string toString(const Term& t);
std::string sortName(const Signature& sig, SortId s);

/// Sorted variable-to-term bindings.
class Substitution {
 public:
  using Binding = std::pair<Term, Term>;

  const Term* find(const Term& var) const;
  const Term* findByName(const std::string& name) const;
  /// Inserts or overwrites.
  void bind(const Term& var, const Term& value);
  bool empty() const { return binds_.empty(); }
  size_t size() const { return binds_.size(); }
  const std::vector<Binding>& bindings() const { return binds_; }
  size_t hash() const;

  friend bool operator==(const Substitution& a, const Substitution& b);
  friend bool operator!=(const Substitution& a, const Substitution& b) {
    return !(a == b);
  }
  friend bool operator<(const Substitution& a, const Substitution& b);

 private:
  std::vector<Binding> binds_;
};

std::string toString(const Substitution& s);

/// Instantiates variables bound in s and renormalizes. Unbound variables are
/// left in place.
Term substitute(const Signature& sig, const Term& t, const Substitution& s);
/// Same as substitute but throws UnsortableResult if a subterm loses its sort.
Term applySubstitution(const Signature& sig, const Term& t,
                       const Substitution& s);

void collectVars(const Term& t, std::vector<Term>& out);

/// A one-hole context. Each step names argument positions of the node on the
/// path; a step with several indices replaces a segment (or sub-multiset) of
/// an associative argument list.
class Context {
 public:
  Context() = default;
  explicit Context(Term root) : root_(std::move(root)) {}

  struct Step {
    std::vector<uint32_t> indices;
    bool operator==(const Step& o) const { return indices == o.indices; }
  };

  const Term& root() const { return root_; }
  const std::vector<Step>& steps() const { return steps_; }
  bool isTop() const { return steps_.empty(); }
  Context extended(Step s) const;
  /// Subterm (or segment) currently filling the hole.
  Term hole(const Signature& sig) const;
  Term plug(const Signature& sig, const Term& replacement) const;
  size_t hash() const;

  friend bool operator==(const Context& a, const Context& b) {
    return a.steps_ == b.steps_ && a.root_ == b.root_;
  }

 private:
  Term root_;
  std::vector<Step> steps_;
};

}  // namespace smc

template <>
struct std::hash<smc::Term> {
  size_t operator()(const smc::Term& t) const { return t.hash(); }
};
