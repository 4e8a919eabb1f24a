#pragma once

#include <string>
#include <vector>

#include "locrpc/compile.hpp"
#include "locrpc/eval.hpp"
#include "locrpc/generate.hpp"
#include "locrpc/infer.hpp"
#include "locrpc/machine_cs.hpp"
#include "locrpc/machine_enc.hpp"
#include "locrpc/machine_state.hpp"
#include "locrpc/store_io.hpp"

namespace testing {

using namespace locrpc;

// The running example: a server function that calls its client argument,
// which in turn requests another server function.
inline const char* kP0 = "(\\s f. (\\s x. x) (f 0)) (\\c y. (\\s z. z) y)";

// A server body that calls the client twice in sequence.
inline const char* kTwoCalls = "(\\s f. (\\s d. f 1) (f 0)) (\\c y. y)";

// Fails inference: p's standalone body commits g to a client arrow, but p is
// then applied to a server function.
inline const char* kMismatch = "(\\c p. p (\\s w. w)) (\\c g. g 0)";

constexpr long kFuel = 1'000'000;

inline src::TermPtr parse(const std::string& text) { return src::parse(text); }

inline ty::AnnPtr annotate(const std::string& text) {
  return ty::infer(src::parse(text), Loc::Client).term;
}

inline anf::TermPtr compile_enc(const std::string& text) {
  return compile::compile(annotate(text), anf::Strategy::Enc);
}

inline anf::TermPtr compile_state(const std::string& text) {
  return compile::compile(annotate(text), anf::Strategy::State);
}

inline cs::FunctionStore store_for(const std::string& text, anf::Strategy strategy) {
  return cs::closure_convert(compile::compile(annotate(text), strategy), strategy);
}

// Deterministic corpus of closed well-typed programs. Goals are base types
// when base_only is set (the oracle-equivalence corpora), otherwise mixed.
inline std::vector<src::TermPtr> corpus(int count, int max_depth, bool base_only,
                                        std::uint64_t seed0 = 1) {
  std::vector<src::TermPtr> out;
  out.reserve(count);
  std::uint64_t seed = seed0;
  while (static_cast<int>(out.size()) < count) {
    std::mt19937_64 rng(seed);
    ty::TypePtr goal = base_only ? ty::random_base(rng) : ty::random_type(rng, 2);
    if (ty::min_depth(goal) > max_depth) goal = ty::base(BaseKind::Int);
    out.push_back(ty::generate_typed(seed, max_depth, Loc::Client, goal));
    ++seed;
  }
  return out;
}

inline Literal literal_of(const src::TermPtr& value) {
  return std::get<src::Term::Const>(value->node).lit;
}

inline Literal literal_of(const anf::Value& value) {
  return std::get<anf::Value::Const>(value.node).lit;
}

inline Literal literal_of(const cs::Value& value) {
  return std::get<cs::Value::Const>(value.node).lit;
}

inline bool is_literal(const src::TermPtr& value) {
  return std::holds_alternative<src::Term::Const>(value->node);
}

}  // namespace testing
