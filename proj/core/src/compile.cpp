#include "locrpc/compile.hpp"

namespace locrpc::compile {

using anf::TermPtr;
using anf::Value;
using ty::AnnPtr;
using ty::AnnTerm;

std::string FreshNames::next(const std::string& stem) {
  for (;;) {
    std::string cand = stem + std::to_string(++counter_);
    if (used_.insert(cand).second) return cand;
  }
}

namespace {

// The application's location marker must agree with the arrow on the
// function child; anything else is a broken derivation, not a compile case.
void require_app_loc(const AnnPtr& fun, Loc app_loc) {
  const auto* ar = std::get_if<ty::Type::Arrow>(&fun->type->node);
  if (ar == nullptr)
    throw Error(ErrorKind::IllformedAnnotation, "application of a non-arrow-typed term",
                fun->span);
  if (ar->loc != app_loc)
    throw Error(ErrorKind::IllformedAnnotation,
                std::string("application marked @") + loc_char(app_loc) +
                    " but the function arrow is ->^" + loc_char(ar->loc),
                fun->span);
}

}  // namespace

// ---------------------------------------------------------------------------
// State-encoding strategy (direct-style client, CPS server)
// ---------------------------------------------------------------------------

anf::TermPtr enc_client(const AnnPtr& term, FreshNames& names) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AnnTerm::Var>) {
          return anf::val(anf::vvar(n.name));
        } else if constexpr (std::is_same_v<T, AnnTerm::Const>) {
          return anf::val(anf::vconst(n.lit));
        } else if constexpr (std::is_same_v<T, AnnTerm::Lam>) {
          if (n.loc == Loc::Client)
            return anf::val(anf::vlam(Loc::Client, {n.param}, enc_client(n.body, names)));
          std::string k = names.next("k");
          return anf::val(
              anf::vlam(Loc::Server, {n.param, k}, enc_server(n.body, anf::vvar(k), names)));
        } else {
          require_app_loc(n.fun, n.app_loc);
          std::string f = names.next("f");
          std::string x = names.next("x");
          std::string r = names.next("r");
          TermPtr fun = enc_client(n.fun, names);
          TermPtr arg = enc_client(n.arg, names);
          TermPtr inner;
          if (n.app_loc == Loc::Client) {
            inner = anf::app(anf::vvar(f), {anf::vvar(x)});
          } else {
            // Remote request: the callee is CPS-converted, so it also takes
            // the identity continuation that kicks off its evaluation.
            std::string y = names.next("y");
            Value identity = anf::vlam(Loc::Server, {y}, anf::val(anf::vvar(y)));
            inner = anf::req(anf::vvar(f), {anf::vvar(x), identity});
          }
          return anf::let(f, fun,
                          anf::let(x, arg, anf::let(r, inner, anf::val(anf::vvar(r)))));
        }
      },
      term->node);
}

anf::TermPtr enc_server(const AnnPtr& term, const Value& k, FreshNames& names) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AnnTerm::Var>) {
          return anf::app(k, {anf::vvar(n.name)});
        } else if constexpr (std::is_same_v<T, AnnTerm::Const>) {
          return anf::app(k, {anf::vconst(n.lit)});
        } else if constexpr (std::is_same_v<T, AnnTerm::Lam>) {
          if (n.loc == Loc::Client)
            return anf::app(k, {anf::vlam(Loc::Client, {n.param}, enc_client(n.body, names))});
          std::string k2 = names.next("k");
          return anf::app(k, {anf::vlam(Loc::Server, {n.param, k2},
                                        enc_server(n.body, anf::vvar(k2), names))});
        } else {
          require_app_loc(n.fun, n.app_loc);
          std::string f = names.next("f");
          std::string x = names.next("x");
          TermPtr tail;
          if (n.app_loc == Loc::Server) {
            tail = anf::app(anf::vvar(f), {anf::vvar(x), k});
          } else {
            // Commute function: run the client function, then re-enter the
            // server by requesting the saved continuation. The call it is
            // wrapped in always sits in tail position.
            std::string z = names.next("z");
            std::string y = names.next("y");
            Value commute =
                anf::vlam(Loc::Client, {z},
                          anf::let(y, anf::app(anf::vvar(f), {anf::vvar(z)}),
                                   anf::req(k, {anf::vvar(y)})));
            tail = anf::call(commute, {anf::vvar(x)});
          }
          Value k_arg = anf::vlam(Loc::Server, {x}, tail);
          TermPtr apply_arg = enc_server(n.arg, k_arg, names);
          Value k_fun = anf::vlam(Loc::Server, {f}, apply_arg);
          return enc_server(n.fun, k_fun, names);
        }
      },
      term->node);
}

// ---------------------------------------------------------------------------
// Stateful strategy (direct style on both sides)
// ---------------------------------------------------------------------------

anf::TermPtr state_client(const AnnPtr& term, FreshNames& names) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AnnTerm::Var>) {
          return anf::val(anf::vvar(n.name));
        } else if constexpr (std::is_same_v<T, AnnTerm::Const>) {
          return anf::val(anf::vconst(n.lit));
        } else if constexpr (std::is_same_v<T, AnnTerm::Lam>) {
          if (n.loc == Loc::Client)
            return anf::val(anf::vlam(Loc::Client, {n.param}, state_client(n.body, names)));
          return anf::val(anf::vlam(Loc::Server, {n.param}, state_server(n.body, names)));
        } else {
          require_app_loc(n.fun, n.app_loc);
          std::string f = names.next("f");
          std::string x = names.next("x");
          std::string r = names.next("r");
          TermPtr fun = state_client(n.fun, names);
          TermPtr arg = state_client(n.arg, names);
          TermPtr inner = n.app_loc == Loc::Client
                              ? anf::app(anf::vvar(f), {anf::vvar(x)})
                              : anf::req(anf::vvar(f), {anf::vvar(x)});
          return anf::let(f, fun,
                          anf::let(x, arg, anf::let(r, inner, anf::val(anf::vvar(r)))));
        }
      },
      term->node);
}

anf::TermPtr state_server(const AnnPtr& term, FreshNames& names) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AnnTerm::Var>) {
          return anf::val(anf::vvar(n.name));
        } else if constexpr (std::is_same_v<T, AnnTerm::Const>) {
          return anf::val(anf::vconst(n.lit));
        } else if constexpr (std::is_same_v<T, AnnTerm::Lam>) {
          if (n.loc == Loc::Client)
            return anf::val(anf::vlam(Loc::Client, {n.param}, state_client(n.body, names)));
          return anf::val(anf::vlam(Loc::Server, {n.param}, state_server(n.body, names)));
        } else {
          require_app_loc(n.fun, n.app_loc);
          std::string f = names.next("f");
          std::string x = names.next("x");
          TermPtr fun = state_server(n.fun, names);
          TermPtr arg = state_server(n.arg, names);
          TermPtr inner;
          if (n.app_loc == Loc::Server) {
            std::string r = names.next("r");
            inner = anf::let(r, anf::app(anf::vvar(f), {anf::vvar(x)}),
                             anf::val(anf::vvar(r)));
            return anf::let(f, fun, anf::let(x, arg, inner));
          }
          // Commute function again, but the stack does the bookkeeping: the
          // client returns with ret, which pops the saved server context.
          std::string y = names.next("y");
          std::string z = names.next("z");
          std::string r = names.next("r");
          Value commute = anf::vlam(Loc::Client, {z},
                                    anf::let(y, anf::app(anf::vvar(f), {anf::vvar(z)}),
                                             anf::ret(anf::vvar(y))));
          inner = anf::let(r, anf::call(commute, {anf::vvar(x)}), anf::val(anf::vvar(r)));
          return anf::let(f, fun, anf::let(x, arg, inner));
        }
      },
      term->node);
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

anf::TermPtr compile(const AnnPtr& program, anf::Strategy strategy) {
  FreshNames names(src::all_names(ty::erase(program)));
  TermPtr out = strategy == anf::Strategy::Enc ? enc_client(program, names)
                                               : state_client(program, names);
  anf::check_well_formed(out, strategy);
  return out;
}

anf::Value compile_value(const AnnPtr& value, anf::Strategy strategy, FreshNames& names) {
  TermPtr t = strategy == anf::Strategy::Enc ? enc_client(value, names)
                                             : state_client(value, names);
  const auto* v = std::get_if<anf::Term::Val>(&t->node);
  if (v == nullptr)
    throw Error(ErrorKind::IllformedAnnotation, "compile_value expects a value", value->span);
  return v->value;
}

}  // namespace locrpc::compile
