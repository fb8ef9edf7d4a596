#pragma once

#include <optional>
#include <string>
#include <vector>

#include "refac/program.hpp"

namespace refac {

/// A refactoring expressed as "new definitions + the old function
/// implemented in terms of the new". Every built-in scheme compiles to one.
struct AdapterSpec {
  FunKey target;
  std::vector<Definition> new_defs;
  Term adapter;  // closed; arity equals target.arity
  bool remove_old = true;
  // Set by the rename scheme: the engine may replace FunRef(target) with
  // FunRef(target.name -> *rename_to) directly instead of substituting and
  // normalizing.
  std::optional<std::string> rename_to;
};

/// Number of arguments the adapter consumes before it runs: the lambda
/// parameter count in MFE, the curried depth in MFH (a function reference
/// or partial application counts its remaining arity).
int adapter_arity(const Term& adapter, Flavor flavor);

}  // namespace refac
