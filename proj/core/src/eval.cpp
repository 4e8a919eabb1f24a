#include "locrpc/eval.hpp"

namespace locrpc::interp {

namespace {

src::TermPtr eval_rec(const src::TermPtr& term, Loc at, long& fuel,
                      std::vector<BetaEvent>* hops) {
  using Term = src::Term;
  return std::visit(
      [&](const auto& n) -> src::TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          throw Error(ErrorKind::FreeVariable, "free variable '" + n.name + "'", term->span);
        } else if constexpr (std::is_same_v<T, Term::Lam> || std::is_same_v<T, Term::Const>) {
          return term;  // (Value)
        } else {
          src::TermPtr fun = eval_rec(n.fun, at, fuel, hops);
          src::TermPtr arg = eval_rec(n.arg, at, fuel, hops);
          const auto* lam = std::get_if<Term::Lam>(&fun->node);
          if (lam == nullptr)
            throw Error(ErrorKind::StuckApplication, "applied a constant", term->span);
          if (fuel <= 0) throw Error(ErrorKind::FuelExhausted, "beta budget exhausted");
          --fuel;
          if (hops != nullptr) hops->push_back({at, lam->loc});
          // (Beta): the body runs at the lambda's location.
          return eval_rec(src::substitute(lam->body, lam->param, arg), lam->loc, fuel, hops);
        }
      },
      term->node);
}

}  // namespace

src::TermPtr evaluate(const src::TermPtr& term, Loc at, long fuel) {
  return eval_rec(term, at, fuel, nullptr);
}

TracedResult evaluate_traced(const src::TermPtr& term, Loc at, long fuel) {
  TracedResult out;
  out.value = eval_rec(term, at, fuel, &out.hops);
  return out;
}

}  // namespace locrpc::interp
