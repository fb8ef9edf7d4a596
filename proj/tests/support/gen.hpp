#pragma once

#include <random>
#include <string>
#include <vector>

#include "refac/program.hpp"
#include "refac/rewrite.hpp"

namespace refac::testing {

using Rng = std::mt19937_64;

/// Variable pool for the untyped generator: X Y Z W (MFE) or x y z w (MFH).
const std::vector<std::string>& var_pool(Flavor flavor);

/// Arbitrary (possibly ill-typed, possibly open) terms over the variable
/// pool; binders reuse pool names so shadowing and capture are common.
Term random_term(Rng& rng, Flavor flavor, int depth);

/// Small library every typed term may call: inc/1, add/2, sq/1, twice/2,
/// seven/0.
const Program& prelude(Flavor flavor);

enum class Ty { int_, list, fun };

/// Closed, well-typed terms over the prelude. Evaluation cannot fault;
/// it can only produce a value (or, in principle, run out of fuel).
Term typed_term(Rng& rng, Flavor flavor, Ty ty, int depth);

/// A closed, well-typed term whose root is a redex of `rule`.
Term root_redex(Rng& rng, Flavor flavor, RuleId rule);
/// Context under which `redex` fires (target taken from the redex itself).
RuleContext redex_context(Flavor flavor, RuleId rule, const Term& redex);

/// Random resolvable program in normal-ish form, exercising every surface
/// construct of the flavor (atoms, funs, sections, infix...).
Program random_program(Rng& rng, Flavor flavor);

}  // namespace refac::testing
