#include "locrpc/machine_enc.hpp"

namespace locrpc::enc {

using anf::Term;
using anf::TermPtr;
using anf::Value;

namespace {

anf::Subst bind(const std::vector<std::string>& params, const std::vector<Value>& args) {
  anf::Subst s;
  for (std::size_t i = 0; i < params.size(); ++i) s[params[i]] = args[i];
  return s;
}

const Value::Lam* as_lam(const Value& v, Loc loc) {
  const auto* lam = std::get_if<Value::Lam>(&v.node);
  return (lam != nullptr && lam->loc == loc) ? lam : nullptr;
}

[[noreturn]] void stuck(const std::string& what) {
  throw Error(ErrorKind::Stuck, "no rule applies: " + what);
}

StepResult step_client(const Config& c) {
  const auto* top = std::get_if<Term::Let>(&c.term->node);
  if (top == nullptr) stuck("client term is not a let or a value");

  return std::visit(
      [&](const auto& n) -> StepResult {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::App>) {
          const auto* lam = as_lam(n.fun, Loc::Client);
          if (lam == nullptr) stuck("client application of a non-client function");
          if (lam->params.size() != n.args.size()) stuck("arity mismatch");
          TermPtr body = anf::substitute(lam->body, bind(lam->params, n.args));
          return {{anf::let(top->binder, body, top->body), std::nullopt}, Rule::AppC};
        } else if constexpr (std::is_same_v<T, Term::Req>) {
          const auto* lam = as_lam(n.fun, Loc::Server);
          if (lam == nullptr) stuck("req of a non-server function");
          // The client context is left behind; the server starts on the bare
          // application.
          return {{anf::app(n.fun, n.args), Frame{top->binder, top->body}}, Rule::Req};
        } else if constexpr (std::is_same_v<T, Term::Val>) {
          anf::Subst s;
          s[top->binder] = n.value;
          return {{anf::substitute(top->body, s), std::nullopt}, Rule::ValC};
        } else if constexpr (std::is_same_v<T, Term::Let>) {
          return {{anf::let(n.binder, n.bound,
                            anf::let(top->binder, n.body, top->body)),
                   std::nullopt},
                  Rule::LetC};
        } else {
          stuck("call or ret in client position");
        }
      },
      top->bound->node);
}

StepResult step_server(const Config& c) {
  const Frame& frame = *c.pending;
  return std::visit(
      [&](const auto& n) -> StepResult {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::App>) {
          const auto* lam = as_lam(n.fun, Loc::Server);
          if (lam == nullptr) stuck("server application of a non-server function");
          if (lam->params.size() != n.args.size()) stuck("arity mismatch");
          TermPtr body = anf::substitute(lam->body, bind(lam->params, n.args));
          return {{body, frame}, Rule::AppS};
        } else if constexpr (std::is_same_v<T, Term::Call>) {
          const auto* lam = as_lam(n.fun, Loc::Client);
          if (lam == nullptr) stuck("call of a non-client function");
          // The call lands in the waiting client context; the server keeps
          // nothing.
          return {{anf::let(frame.binder, anf::app(n.fun, n.args), frame.body), std::nullopt},
                  Rule::Call};
        } else if constexpr (std::is_same_v<T, Term::Val>) {
          return {{anf::let(frame.binder, anf::val(n.value), frame.body), std::nullopt},
                  Rule::Reply};
        } else {
          stuck("server term is not an application, call, or value");
        }
      },
      c.term->node);
}

}  // namespace

bool is_terminal(const Config& c) {
  return !c.on_server() && std::holds_alternative<Term::Val>(c.term->node);
}

StepResult step(const Config& c) {
  if (is_terminal(c)) throw Error(ErrorKind::Stuck, "configuration is terminal");
  return c.on_server() ? step_server(c) : step_client(c);
}

RunResult run(const anf::TermPtr& term, long fuel) {
  Config c{term, std::nullopt};
  RunResult out;
  while (!is_terminal(c)) {
    if (fuel-- <= 0) throw Error(ErrorKind::FuelExhausted, "step budget exhausted");
    StepResult s = step(c);
    out.trace.push_back({s.rule, 0});
    c = std::move(s.config);
  }
  out.value = std::get<Term::Val>(c.term->node).value;
  return out;
}

}  // namespace locrpc::enc
