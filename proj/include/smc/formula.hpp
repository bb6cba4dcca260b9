// Linear temporal logic formulae over proposition terms.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "smc/term.hpp"

namespace smc {

enum class FKind {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Next,
  Eventually,
  Always,
  Until,
  Release,
};

struct FNode;
using FormulaPtr = std::shared_ptr<const FNode>;

struct FNode {
  FKind kind = FKind::True;
  Term atom;
  FormulaPtr a, b;
  size_t hash = 0;
  size_t size = 1;
};

namespace ltl {
FormulaPtr tt();
FormulaPtr ff();
FormulaPtr atom(Term p);
FormulaPtr neg(FormulaPtr a);
FormulaPtr conj(FormulaPtr a, FormulaPtr b);
FormulaPtr disj(FormulaPtr a, FormulaPtr b);
FormulaPtr implies(FormulaPtr a, FormulaPtr b);
FormulaPtr next(FormulaPtr a);
FormulaPtr eventually(FormulaPtr a);
FormulaPtr always(FormulaPtr a);
FormulaPtr until(FormulaPtr a, FormulaPtr b);
FormulaPtr release(FormulaPtr a, FormulaPtr b);
}  // namespace ltl

bool formulaEqual(const FormulaPtr& a, const FormulaPtr& b);
std::string toString(const FormulaPtr& f);
/// Distinct atoms in order of first occurrence.
std::vector<Term> atomsOf(const FormulaPtr& f);

/// Converts a reduced term of sort Formula built from the prelude temporal
/// operators. Throws PropSortMismatch for non-proposition atoms.
FormulaPtr formulaFromTerm(const Signature& sig, const Term& t);

}  // namespace smc
