#pragma once

#include <optional>
#include <string>
#include <vector>

#include "refac/term.hpp"

namespace refac {

struct Definition {
  std::string name;
  std::vector<std::string> params;
  Term body;

  int arity() const { return static_cast<int>(params.size()); }
  FunKey key() const { return {name, arity()}; }
};

struct Program {
  Flavor flavor = Flavor::mfe;
  std::vector<Definition> defs;

  const Definition* find(const FunKey& key) const;
  // MFH looks functions up by name alone.
  const Definition* find_name(const std::string& name) const;
  // Lookup honoring the flavor's identity rule.
  const Definition* lookup(const FunKey& key) const;
};

struct Intrinsic {
  std::string name;
  int arity;
};

const std::vector<Intrinsic>& intrinsics(Flavor flavor);
std::optional<Intrinsic> find_intrinsic(Flavor flavor, const std::string& name);

/// Intrinsics whose first argument is a function value.
bool is_special_head(const std::string& name);

struct ResolveOptions {
  // Unknown function names become external references instead of errors;
  // the arity is taken from the call sites.
  bool allow_external = false;
};

/// Classifies every name as a bound variable or a function reference and
/// validates the definition table.
Program resolve(const Program& program, const ResolveOptions& opts = {});

/// The definition body wrapped in a lambda over its parameters (n-ary in
/// MFE, curried in MFH).
Term as_lambda(const Definition& def, Flavor flavor);

/// Alpha-equivalence of whole programs: same definitions in the same order,
/// bodies compared with parameters treated as binders.
bool alpha_eq(const Program& a, const Program& b);

/// Number of FunRef(target) nodes across all definition bodies.
std::size_t count_funrefs(const Program& p, const FunKey& target);

}  // namespace refac
