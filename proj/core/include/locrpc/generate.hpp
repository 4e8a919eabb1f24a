#pragma once

#include <cstdint>
#include <random>

#include "locrpc/types.hpp"

namespace locrpc::ty {

// Deterministic goal-directed generator of closed well-typed terms. The same
// seed always yields the same term, and the result infers at `goal` (up to
// defaulting of parts the term leaves unconstrained — use infer_expected to
// verify). Remote applications are only built with literal lambdas in the
// function position so that inference never has to guess an arrow location.
// Throws GenerationExhausted when nothing of the goal type fits in max_depth.
src::TermPtr generate_typed(std::uint64_t seed, int max_depth, Loc at, const TypePtr& goal);

// Environment-aware variant: free variables drawn from env are used at their
// declared types.
src::TermPtr generate_typed(std::uint64_t seed, int max_depth, Loc at, const TypePtr& goal,
                            const TypeEnv& env);

// Smallest term height that can inhabit a type: 1 for bases, 1 + cost of the
// codomain for arrows.
int min_depth(const TypePtr& goal);

// Random small types for corpus goals, at most `depth` arrows deep.
TypePtr random_type(std::mt19937_64& rng, int depth);
TypePtr random_base(std::mt19937_64& rng);

}  // namespace locrpc::ty
