#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace refac {

enum class ErrorKind {
  SyntaxError,
  UnboundName,
  DuplicateDefinition,
  ShadowsIntrinsic,
  AdapterNotClosed,
  ArityMismatch,
  AmbiguousAtomArity,
  RewriteDivergence,
  TargetUndefined,
  NameCollision,
  ExtractNotFound,
  ExtractNotClosed,
  BadPermutation,
  DefaultNotClosed,
  PositionOutOfRange,
  ParamStillUsed,
  RecursiveUnfold,
  EntryMissing,
  ConflictingAdapters,
  BadAdapterFile,
  UsageError,
};

std::string_view to_string(ErrorKind kind);

// Every failure of a refactoring operation surfaces as a RefacError whose
// what() is the single-line diagnostic "<Kind>: <detail>".
class RefacError : public std::runtime_error {
 public:
  RefacError(ErrorKind kind, std::string detail);

  ErrorKind kind() const { return kind_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

class SyntaxError : public RefacError {
 public:
  SyntaxError(int line, int column, std::string expected, std::string found);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  int line_;
  int column_;
  std::string expected_;
  std::string found_;
};

}  // namespace refac
