#pragma once

#include "locrpc/annotated.hpp"
#include "locrpc/types.hpp"

namespace locrpc::ty {

// Declarative checker for the five typing rules (variables, lambdas, and the
// three application rules selected by the ambient location and app_loc).
// Returns the type of `term` at location `at` under `env`, or throws
// TypeMismatch / LocationMismatch / UnboundVariable / IllformedAnnotation.
TypePtr check(const TypeEnv& env, Loc at, const AnnPtr& term);

struct InferResult {
  TypePtr type;
  AnnPtr term;
};

// Unification-based inference. Residual type variables are defaulted to Unit,
// so results are always concrete. When an application's function type is
// still undetermined, the local rule is committed (the system has no location
// variables, so arrow locations are never inferred from later context).
InferResult infer(const src::TermPtr& term, Loc at);
InferResult infer(const TypeEnv& env, const src::TermPtr& term, Loc at);

// As infer, but unifies the result with `expected` before defaulting. Use
// this to decide whether a term can be given a particular type; plain infer
// may default unconstrained parts differently.
InferResult infer_expected(const TypeEnv& env, const src::TermPtr& term, Loc at,
                           const TypePtr& expected);

// Adapts a term of type `from` to type `to`, where the two agree after
// erasing locations, by wrapping it in location-correcting eta expansions.
// Returns the term unchanged when from and to are equal. Throws ShapeMismatch
// when the erased types differ.
src::TermPtr eta_relocate(const src::TermPtr& term, const TypePtr& from, const TypePtr& to);

struct RepairResult {
  InferResult inferred;
  src::TermPtr source;  // the (possibly rewritten) program that was typed
  bool changed = false;
};

// Inference with the explicit repair pass: when an application argument
// fails to unify with the expected domain only because of arrow locations,
// the argument is wrapped with eta_relocate and inference is retried.
RepairResult infer_with_repair(const TypeEnv& env, const src::TermPtr& term, Loc at);

}  // namespace locrpc::ty
