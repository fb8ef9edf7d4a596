#include "refac/error.hpp"

#include <sstream>

namespace refac {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnboundName: return "UnboundName";
    case ErrorKind::DuplicateDefinition: return "DuplicateDefinition";
    case ErrorKind::ShadowsIntrinsic: return "ShadowsIntrinsic";
    case ErrorKind::AdapterNotClosed: return "AdapterNotClosed";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::AmbiguousAtomArity: return "AmbiguousAtomArity";
    case ErrorKind::RewriteDivergence: return "RewriteDivergence";
    case ErrorKind::TargetUndefined: return "TargetUndefined";
    case ErrorKind::NameCollision: return "NameCollision";
    case ErrorKind::ExtractNotFound: return "ExtractNotFound";
    case ErrorKind::ExtractNotClosed: return "ExtractNotClosed";
    case ErrorKind::BadPermutation: return "BadPermutation";
    case ErrorKind::DefaultNotClosed: return "DefaultNotClosed";
    case ErrorKind::PositionOutOfRange: return "PositionOutOfRange";
    case ErrorKind::ParamStillUsed: return "ParamStillUsed";
    case ErrorKind::RecursiveUnfold: return "RecursiveUnfold";
    case ErrorKind::EntryMissing: return "EntryMissing";
    case ErrorKind::ConflictingAdapters: return "ConflictingAdapters";
    case ErrorKind::BadAdapterFile: return "BadAdapterFile";
    case ErrorKind::UsageError: return "UsageError";
  }
  return "Unknown";
}

RefacError::RefacError(ErrorKind kind, std::string detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      detail_(std::move(detail)) {}

namespace {
std::string describe(int line, int column, const std::string& expected,
                     const std::string& found) {
  std::ostringstream os;
  os << line << ":" << column << ": expected " << expected << ", found "
     << found;
  return os.str();
}
}  // namespace

SyntaxError::SyntaxError(int line, int column, std::string expected,
                         std::string found)
    : RefacError(ErrorKind::SyntaxError,
                 describe(line, column, expected, found)),
      line_(line),
      column_(column),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

}  // namespace refac
