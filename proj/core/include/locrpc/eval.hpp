#pragma once

#include <vector>

#include "locrpc/source.hpp"

namespace locrpc::interp {

// One beta step: where the application ran and where the function's body ran.
// A remote hop is any event with at != fun_loc.
struct BetaEvent {
  Loc at;
  Loc fun_loc;
};

// Reference big-step evaluator. Beta executes the body at the location
// annotated on the lambda, not at the ambient location. Fuel counts beta
// steps. Values come back as closed terms (the semantics is substitution
// based). Throws StuckApplication / FreeVariable / FuelExhausted.
src::TermPtr evaluate(const src::TermPtr& term, Loc at, long fuel);

struct TracedResult {
  src::TermPtr value;
  std::vector<BetaEvent> hops;
};

TracedResult evaluate_traced(const src::TermPtr& term, Loc at, long fuel);

}  // namespace locrpc::interp
