#include "locrpc/machine_cs.hpp"

namespace locrpc::cs {

bool operator==(const SessionEvent& a, const SessionEvent& b) {
  return a.kind == b.kind && a.sid == b.sid;
}

std::string to_string(const SessionEvent& e) {
  const char* k = e.kind == SessionEvent::Kind::Created
                      ? "created"
                      : e.kind == SessionEvent::Kind::Maintained ? "maintained" : "closed";
  return std::string(k) + "(" + std::to_string(e.sid) + ")";
}

namespace {

[[noreturn]] void stuck(const std::string& what) {
  throw Error(ErrorKind::Stuck, "no rule applies: " + what);
}

Subst bind(const ClosedFunction& f, const std::vector<Value>& env,
           const std::vector<Value>& args) {
  if (f.params.size() != args.size())
    throw Error(ErrorKind::ArityMismatch,
                "expected " + std::to_string(f.params.size()) + " arguments, got " +
                    std::to_string(args.size()));
  if (f.free_vars.size() != env.size())
    throw Error(ErrorKind::ArityMismatch, "closure environment does not match free variables");
  Subst s;
  for (std::size_t i = 0; i < f.free_vars.size(); ++i) s[f.free_vars[i]] = env[i];
  for (std::size_t i = 0; i < f.params.size(); ++i) s[f.params[i]] = args[i];
  return s;
}

}  // namespace

Machine::Machine(const FunctionStore& store) : store_(store) {}

bool is_terminal(const Config& c) {
  return !c.on_server() && std::holds_alternative<Term::Val>(c.term->node);
}

namespace {

struct Resolved {
  const ClosedFunction* fun;
  const Value::Clo* clo;
};

Resolved resolve(const FunctionStore& store, const Value& v, Loc want) {
  const auto* clo = std::get_if<Value::Clo>(&v.node);
  if (clo == nullptr) stuck("applied a non-closure value");
  const ClosedFunction* f = store.find(clo->fun, want);
  if (f == nullptr) {
    if (store.find(clo->fun, other(want)) != nullptr)
      throw Error(ErrorKind::WrongLocationStore,
                  "function '" + clo->fun + "' lives in the " +
                      std::string(to_string(other(want))) + " store");
    throw Error(ErrorKind::UnknownFunction, "unknown function '" + clo->fun + "'");
  }
  return {f, clo};
}

}  // namespace

Machine::StepResult Machine::step(const Config& c) {
  if (is_terminal(c)) throw Error(ErrorKind::Stuck, "configuration is terminal");
  const bool stateful = store_.strategy == anf::Strategy::State;

  if (!c.on_server()) {
    const auto* top = std::get_if<Term::Let>(&c.term->node);
    if (top == nullptr) stuck("client term is not a let or a value");

    return std::visit(
        [&](const auto& n) -> StepResult {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Term::App>) {
            auto [f, clo] = resolve(store_, n.fun, Loc::Client);
            TermPtr body = substitute(f->body, bind(*f, clo->env, n.args));
            Config next{let(top->binder, body, top->body), std::nullopt, c.stack, c.session};
            return {std::move(next), Rule::AppC, std::nullopt};
          } else if constexpr (std::is_same_v<T, Term::Req>) {
            resolve(store_, n.fun, Loc::Server);
            Config next;
            next.pending = Frame{top->binder, top->body};
            next.stack = c.stack;
            SessionEvent ev{};
            if (!stateful) {
              // One session per request-response interaction.
              ev = {SessionEvent::Kind::Created, next_sid_++};
              next.term = app(n.fun, n.args);
            } else {
              if (c.stack.empty()) {
                ev = {SessionEvent::Kind::Created, next_sid_++};
              } else {
                ev = {SessionEvent::Kind::Maintained, *c.session};
              }
              next.term = let("r", app(n.fun, n.args), val(vvar("r")));
            }
            next.session = ev.sid;
            return {std::move(next), Rule::Req, ev};
          } else if constexpr (std::is_same_v<T, Term::Val>) {
            Subst s;
            s[top->binder] = n.value;
            Config next{substitute(top->body, s), std::nullopt, c.stack, c.session};
            return {std::move(next), Rule::ValC, std::nullopt};
          } else if constexpr (std::is_same_v<T, Term::Let>) {
            Config next{let(n.binder, n.bound, let(top->binder, n.body, top->body)),
                        std::nullopt, c.stack, c.session};
            return {std::move(next), Rule::LetC, std::nullopt};
          } else if constexpr (std::is_same_v<T, Term::Ret>) {
            if (!stateful) stuck("ret under the state-encoding strategy");
            if (c.stack.empty()) stuck("ret with an empty server stack");
            Frame popped = c.stack.back();
            std::vector<Frame> rest(c.stack.begin(), c.stack.end() - 1);
            Config next{let(popped.binder, val(n.value), popped.body),
                        Frame{top->binder, top->body}, std::move(rest), c.session};
            return {std::move(next), Rule::Ret,
                    SessionEvent{SessionEvent::Kind::Maintained, *c.session}};
          } else {
            stuck("call in client position");
          }
        },
        top->bound->node);
  }

  // Server side.
  const Frame& frame = *c.pending;

  if (const auto* v = std::get_if<Term::Val>(&c.term->node)) {
    Config next{let(frame.binder, val(v->value), frame.body), std::nullopt, c.stack,
                std::nullopt};
    SessionEvent ev{};
    if (!stateful || c.stack.empty()) {
      ev = {SessionEvent::Kind::Closed, *c.session};
    } else {
      ev = {SessionEvent::Kind::Maintained, *c.session};
      next.session = c.session;
    }
    return {std::move(next), Rule::Reply, ev};
  }

  if (!stateful) {
    // The enc server runs bare CPS terms: applications or a tail call.
    if (const auto* a = std::get_if<Term::App>(&c.term->node)) {
      auto [f, clo] = resolve(store_, a->fun, Loc::Server);
      Config next{substitute(f->body, bind(*f, clo->env, a->args)), frame, {}, c.session};
      return {std::move(next), Rule::AppS, std::nullopt};
    }
    if (const auto* cl = std::get_if<Term::Call>(&c.term->node)) {
      resolve(store_, cl->fun, Loc::Client);
      Config next{let(frame.binder, app(cl->fun, cl->args), frame.body), std::nullopt, {},
                  std::nullopt};
      return {std::move(next), Rule::Call, SessionEvent{SessionEvent::Kind::Closed, *c.session}};
    }
    stuck("enc server term is not an application, call, or value");
  }

  const auto* top = std::get_if<Term::Let>(&c.term->node);
  if (top == nullptr) stuck("server term is not a let or a value");

  return std::visit(
      [&](const auto& n) -> StepResult {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::App>) {
          auto [f, clo] = resolve(store_, n.fun, Loc::Server);
          TermPtr body = substitute(f->body, bind(*f, clo->env, n.args));
          Config next{let(top->binder, body, top->body), frame, c.stack, c.session};
          return {std::move(next), Rule::AppS, std::nullopt};
        } else if constexpr (std::is_same_v<T, Term::Call>) {
          resolve(store_, n.fun, Loc::Client);
          std::vector<Frame> grown = c.stack;
          grown.push_back(Frame{top->binder, top->body});
          Config next{let(frame.binder, app(n.fun, n.args), frame.body), std::nullopt,
                      std::move(grown), c.session};
          return {std::move(next), Rule::Call,
                  SessionEvent{SessionEvent::Kind::Maintained, *c.session}};
        } else if constexpr (std::is_same_v<T, Term::Val>) {
          Subst s;
          s[top->binder] = n.value;
          Config next{substitute(top->body, s), frame, c.stack, c.session};
          return {std::move(next), Rule::ValS, std::nullopt};
        } else if constexpr (std::is_same_v<T, Term::Let>) {
          Config next{let(n.binder, n.bound, let(top->binder, n.body, top->body)), frame,
                      c.stack, c.session};
          return {std::move(next), Rule::LetS, std::nullopt};
        } else {
          stuck("req or ret in server position");
        }
      },
      top->bound->node);
}

RunResult run(const FunctionStore& store, long fuel) {
  Machine m(store);
  Config c{store.main, std::nullopt, {}, std::nullopt};
  RunResult out;
  int open = 0;
  while (!is_terminal(c)) {
    if (fuel-- <= 0) throw Error(ErrorKind::FuelExhausted, "step budget exhausted");
    auto s = m.step(c);
    out.trace.push_back({s.rule, static_cast<int>(s.config.stack.size())});
    if (s.rule == Rule::Req || s.rule == Rule::Ret) {
      ++out.stats.round_trips;
      if (s.event) ++out.stats.per_session_round_trips[s.event->sid];
    }
    if (s.event) {
      out.events.push_back(*s.event);
      switch (s.event->kind) {
        case SessionEvent::Kind::Created:
          ++out.stats.sessions_created;
          ++open;
          break;
        case SessionEvent::Kind::Closed:
          --open;
          break;
        case SessionEvent::Kind::Maintained:
          break;
      }
      if (open > out.stats.max_concurrent_open) out.stats.max_concurrent_open = open;
    }
    c = std::move(s.config);
  }
  out.value = std::get<Term::Val>(c.term->node).value;
  return out;
}

}  // namespace locrpc::cs
