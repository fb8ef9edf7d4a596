#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "refac/program.hpp"

namespace refac {

enum class RuleId { beta, eta_reduce, eta_expand_ref, atom_lift };

std::string_view to_string(RuleId rule);

struct RuleContext {
  Flavor flavor = Flavor::mfe;
  // Restricts ETA_EXPAND_REF and ATOM_LIFT; absent while normalizing.
  std::optional<FunKey> target;
  // Consulted by ATOM_LIFT to detect ambiguous arities.
  const Program* program = nullptr;
};

enum class Traversal { outermost, innermost };

struct Strategy {
  Traversal order = Traversal::outermost;
  std::size_t fuel = 10000;
};

// Single root-level rule steps. Each returns nullopt when the rule does not
// fire at the root of `t`.
std::optional<Term> step_beta(const Term& t, Flavor flavor);
std::optional<Term> step_eta_reduce(const Term& t, Flavor flavor);
std::optional<Term> step_eta_expand_ref(const Term& t, const RuleContext& ctx);
std::optional<Term> step_atom_lift(const Term& t, const RuleContext& ctx);
std::optional<Term> apply_rule(RuleId rule, const Term& t,
                               const RuleContext& ctx);

/// `FunRef(f, N)` as `Lam([X_1..X_N], f(X_1..X_N))`, curried in MFH.
Term eta_expand(const FunKey& ref, Flavor flavor);

/// Wraps every FunRef(target) that is not the head of an application.
Program eta_expand_refs(const Program& p, const FunKey& target,
                        const RuleContext& ctx);

/// Turns `spawn(f, Args)` / `apply(f, Args)` naming the target into an
/// eta-expanded function value. MFH programs are returned unchanged.
Program atom_lift(const Program& p, const FunKey& target, const RuleContext& ctx);

/// Collapses eta-expansion wrappers that survived rewriting untouched
/// (`fun(X_1) -> h(X_1) end` back to `fun h/1`).
Term contract_expanded_refs(const Term& t);

/// True if some subterm is a BETA or ETA_REDUCE redex.
bool has_redex(const Term& t, Flavor flavor);

std::vector<RuleId> default_rules();

struct Firing {
  RuleId rule;
  std::string path;
  Term before;
  Term after;
};

using TraceSink = std::function<void(const Firing&)>;

/// Rewrites to a fixpoint of the rule list. Fuel is shared across every
/// run() on the same instance; exhaustion throws RewriteDivergence.
class Normalizer {
 public:
  Normalizer(std::vector<RuleId> rules, RuleContext ctx, Strategy strategy = {},
             TraceSink sink = {});

  Term run(const Term& t, const std::string& path = "");

  std::size_t total_firings() const { return total_; }
  const std::map<RuleId, std::size_t>& firings() const { return by_rule_; }

 private:
  std::optional<Term> try_rules(const Term& t, const std::string& path);
  Term outermost(Term t, const std::string& path);
  Term innermost(const Term& t, const std::string& path);

  std::vector<RuleId> rules_;
  RuleContext ctx_;
  Strategy strategy_;
  TraceSink sink_;
  std::size_t total_ = 0;
  std::map<RuleId, std::size_t> by_rule_;
  std::deque<std::string> recent_;
};

/// Convenience wrapper around a one-shot Normalizer.
Term normalize(const Term& t, const std::vector<RuleId>& rules,
               const RuleContext& ctx, const Strategy& strategy = {});

}  // namespace refac
