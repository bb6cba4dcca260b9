#pragma once

#include <stdexcept>
#include <string>

namespace smc {

enum class ErrorKind {
  SyntaxError,
  DuplicateDeclaration,
  UnknownSort,
  UnknownOperator,
  UnknownIdentifier,
  AmbiguousOverload,
  UnknownStrategy,
  UnknownRuleLabel,
  CyclicImport,
  MissingModule,
  NoSort,
  UnsortableResult,
  UnboundVariable,
  ArityMismatch,
  NonTermination,
  StateSpaceCeiling,
  UndefinedProposition,
  PropSortMismatch,
  IoError,
};

const char* errorKindName(ErrorKind k);

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace smc
