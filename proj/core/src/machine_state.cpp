#include "locrpc/machine_state.hpp"

namespace locrpc::state {

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
          return {{anf::let(top->binder, body, top->body), std::nullopt, c.stack}, Rule::AppC};
        } else if constexpr (std::is_same_v<T, Term::Req>) {
          const auto* lam = as_lam(n.fun, Loc::Server);
          if (lam == nullptr) stuck("req of a non-server function");
          // The invoked body is wrapped as let r = f(args) in r so the phase
          // always ends on a bare value, which is what Reply matches.
          TermPtr phase = anf::let("r", anf::app(n.fun, n.args), anf::val(anf::vvar("r")));
          return {{phase, Frame{top->binder, top->body}, c.stack}, Rule::Req};
        } else if constexpr (std::is_same_v<T, Term::Val>) {
          anf::Subst s;
          s[top->binder] = n.value;
          return {{anf::substitute(top->body, s), std::nullopt, c.stack}, Rule::ValC};
        } else if constexpr (std::is_same_v<T, Term::Let>) {
          return {{anf::let(n.binder, n.bound,
                            anf::let(top->binder, n.body, top->body)),
                   std::nullopt, c.stack},
                  Rule::LetC};
        } else if constexpr (std::is_same_v<T, Term::Ret>) {
          if (c.stack.empty()) stuck("ret with an empty server stack");
          Frame popped = c.stack.back();
          Stack rest(c.stack.begin(), c.stack.end() - 1);
          // The client context around the ret stays pending; the popped
          // server context resumes with the returned value.
          TermPtr resume = anf::let(popped.binder, anf::val(n.value), popped.body);
          return {{resume, Frame{top->binder, top->body}, std::move(rest)}, Rule::Ret};
        } else {
          stuck("call in client position");
        }
      },
      top->bound->node);
}

StepResult step_server(const Config& c) {
  const Frame& frame = *c.pending;

  if (const auto* v = std::get_if<Term::Val>(&c.term->node)) {
    // (Reply) fires only on a bare value; the stack is untouched.
    return {{anf::let(frame.binder, anf::val(v->value), frame.body), std::nullopt, c.stack},
            Rule::Reply};
  }

  const auto* top = std::get_if<Term::Let>(&c.term->node);
  if (top == nullptr) stuck("server term is not a let or a value");

  return std::visit(
      [&](const auto& n) -> StepResult {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::App>) {
          const auto* lam = as_lam(n.fun, Loc::Server);
          if (lam == nullptr) stuck("server application of a non-server function");
          if (lam->params.size() != n.args.size()) stuck("arity mismatch");
          TermPtr body = anf::substitute(lam->body, bind(lam->params, n.args));
          return {{anf::let(top->binder, body, top->body), frame, c.stack}, Rule::AppS};
        } else if constexpr (std::is_same_v<T, Term::Call>) {
          const auto* lam = as_lam(n.fun, Loc::Client);
          if (lam == nullptr) stuck("call of a non-client function");
          Stack grown = c.stack;
          grown.push_back(Frame{top->binder, top->body});
          TermPtr client = anf::let(frame.binder, anf::app(n.fun, n.args), frame.body);
          return {{client, std::nullopt, std::move(grown)}, Rule::Call};
        } else if constexpr (std::is_same_v<T, Term::Val>) {
          anf::Subst s;
          s[top->binder] = n.value;
          return {{anf::substitute(top->body, s), frame, c.stack}, Rule::ValS};
        } else if constexpr (std::is_same_v<T, Term::Let>) {
          return {{anf::let(n.binder, n.bound,
                            anf::let(top->binder, n.body, top->body)),
                   frame, c.stack},
                  Rule::LetS};
        } else {
          stuck("req or ret in server position");
        }
      },
      top->bound->node);
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
  Config c{term, std::nullopt, {}};
  RunResult out;
  while (!is_terminal(c)) {
    if (fuel-- <= 0) throw Error(ErrorKind::FuelExhausted, "step budget exhausted");
    StepResult s = step(c);
    c = std::move(s.config);
    out.trace.push_back({s.rule, static_cast<int>(c.stack.size())});
  }
  out.value = std::get<Term::Val>(c.term->node).value;
  return out;
}

bool is_call_return_balanced(const Trace& trace) {
  int open = 0;
  for (const auto& e : trace) {
    if (e.rule == Rule::Call) ++open;
    if (e.rule == Rule::Ret) {
      if (open == 0) return false;
      --open;
    }
  }
  return open == 0;
}

}  // namespace locrpc::state
