#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "refac/adapter.hpp"
#include "refac/error.hpp"
#include "refac/interp.hpp"
#include "refac/rewrite.hpp"

namespace refac {

enum class ObligationStatus { checked_ok, checked_failed, skipped };
std::string_view to_string(ObligationStatus s);

struct RefactorReport {
  std::size_t sites_rewritten = 0;
  std::map<RuleId, std::size_t> rule_firings;
  ObligationStatus obligation = ObligationStatus::skipped;
  std::optional<EquivReport> equiv;  // present when the obligation ran
  Program output;
};

struct ApplyOptions {
  Strategy strategy;
  TraceSink trace;
  // Rename adapters only: replace references directly, skipping rewriting.
  bool fast_path = false;
  // The target may be absent from the program (API migration).
  bool allow_external = false;
  // Skip the final per-definition normalization (migration normalizes once
  // after all adapters).
  bool normalize = true;
};

/// Resolves the adapter and new definitions in the context of `p` and checks
/// the adapter invariants (closed adapter, matching arity, no collisions).
AdapterSpec resolve_spec(const Program& p, const AdapterSpec& spec,
                         bool allow_external = false);

/// Replace definitions, eta-expand target references, substitute the
/// adapter, normalize, resolve.
RefactorReport apply_adapter(const Program& p, const AdapterSpec& spec,
                             const ApplyOptions& opts = {});

struct RefactorOptions {
  ApplyOptions apply;
  bool check = true;
  EquivOptions equiv;
};

/// apply_adapter preceded by the proof-obligation check. When the check
/// fails the program is returned unchanged with obligation = checked_failed.
RefactorReport refactor(const Program& p, const AdapterSpec& spec,
                        const RefactorOptions& opts = {});

/// Resolves a stand-alone expression (e.g. a command-line argument) against
/// the functions of `p`. Free variables raise `not_closed`.
Term resolve_term(const Program& p, const Term& t, ErrorKind not_closed);

AdapterSpec scheme_rename(const Program& p, const FunKey& target,
                          const std::string& new_name);
AdapterSpec scheme_generalise(const Program& p, const FunKey& target,
                              const std::string& new_param,
                              const Term& extract);
/// `perm` is 1-based: the new definition's i-th parameter is the old
/// definition's perm[i]-th.
AdapterSpec scheme_reorder(const Program& p, const FunKey& target,
                           const std::vector<int>& perm);
AdapterSpec scheme_add_arg(const Program& p, const FunKey& target,
                           const Term& default_value, int position);
AdapterSpec scheme_remove_arg(const Program& p, const FunKey& target,
                              int position);
AdapterSpec scheme_unfold(const Program& p, const FunKey& target);

/// Unresolved contents of an adapter file.
struct AdapterFile {
  std::vector<Definition> new_defs;
  std::vector<std::pair<FunKey, Term>> adapters;
  bool remove_old = false;
};

/// Sections: `%% new` (definitions), `%% adapter` (entries
/// `name/N := expr` , terminated by `.` in MFE), optional `%% remove-old`.
AdapterFile parse_adapter_file(std::string_view text, Flavor flavor);

/// A single-adapter file as an unresolved AdapterSpec.
AdapterSpec load_adapter_file(const std::string& path, Flavor flavor);

FunKey parse_funkey(std::string_view s);

}  // namespace refac
