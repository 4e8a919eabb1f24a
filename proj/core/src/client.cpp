#include "locrpc/client.hpp"

#include <optional>

#include <httplib.h>

#include "locrpc/wire.hpp"

namespace locrpc::net {

namespace {

struct Driver {
  const cs::FunctionStore& store;
  httplib::Client http;
  const std::function<void(int)>& hook;
  ClientRunResult out;

  // Wire-visible session (the server's id) and the client-side numbering
  // used for the event log.
  std::optional<std::string> wire_sid;
  int local_sid = 0;
  int next_local = 1;

  Driver(const cs::FunctionStore& s, const std::string& endpoint,
         const std::function<void(int)>& hook)
      : store(s), http(endpoint), hook(hook) {
    http.set_connection_timeout(5, 0);
  }

  void event(cs::SessionEvent::Kind kind) {
    out.events.push_back({kind, local_sid});
  }

  WireResponse exchange(const WireRequest& msg) {
    if (hook) hook(out.round_trips);
    std::string body = encode(msg);
    out.log.push_back({true, body});
    httplib::Result res = http.Post("/rpc", body, "application/json");
    if (!res)
      throw Error(ErrorKind::Transport,
                  std::string("cannot reach server: ") + httplib::to_string(res.error()));
    if (res->status != 200) {
      ErrorKind kind = res->status == 409 ? ErrorKind::UnknownSession : ErrorKind::ServerError;
      throw Error(kind, "server answered " + std::to_string(res->status) + ": " + res->body,
                  {}, res->status);
    }
    ++out.round_trips;
    out.log.push_back({false, res->body});
    return decode_response(res->body);
  }

  cs::TermPtr resume(const cs::Frame& pending, const WireResponse& resp) {
    if (const auto* reply = std::get_if<ReplyMsg>(&resp)) {
      if (store.strategy == anf::Strategy::State && reply->session) {
        wire_sid = reply->session;
        event(cs::SessionEvent::Kind::Maintained);
      } else {
        wire_sid.reset();
        event(cs::SessionEvent::Kind::Closed);
      }
      return cs::let(pending.binder, cs::val(reply->value), pending.body);
    }
    const auto& callmsg = std::get<CallMsg>(resp);
    if (store.strategy == anf::Strategy::State) {
      wire_sid = callmsg.session;
      event(cs::SessionEvent::Kind::Maintained);
    } else {
      wire_sid.reset();
      event(cs::SessionEvent::Kind::Closed);
    }
    // The call's application takes over the pending let; under enc its value
    // is the request's value, under state the commute function finishes with
    // a ret that resumes the server.
    return cs::let(pending.binder, cs::app(callmsg.fun, callmsg.args), pending.body);
  }

  cs::Value run(long fuel) {
    cs::Machine machine(store);
    cs::TermPtr term = store.main;
    for (;;) {
      if (fuel-- <= 0) throw Error(ErrorKind::FuelExhausted, "client step budget exhausted");
      if (const auto* v = std::get_if<cs::Term::Val>(&term->node)) return v->value;

      const auto* top = std::get_if<cs::Term::Let>(&term->node);
      if (top != nullptr) {
        if (const auto* r = std::get_if<cs::Term::Req>(&top->bound->node)) {
          if (store.strategy == anf::Strategy::State && wire_sid) {
            event(cs::SessionEvent::Kind::Maintained);
          } else {
            local_sid = next_local++;
            event(cs::SessionEvent::Kind::Created);
          }
          WireResponse resp = exchange(ReqMsg{wire_sid, r->fun, r->args});
          term = resume(cs::Frame{top->binder, top->body}, resp);
          continue;
        }
        if (const auto* r = std::get_if<cs::Term::Ret>(&top->bound->node)) {
          if (store.strategy != anf::Strategy::State || !wire_sid)
            throw Error(ErrorKind::Stuck, "ret without an open session");
          event(cs::SessionEvent::Kind::Maintained);
          WireResponse resp = exchange(RetMsg{*wire_sid, r->value});
          term = resume(cs::Frame{top->binder, top->body}, resp);
          continue;
        }
      }

      // Local client step (AppC, ValC, LetC).
      cs::Config config{term, std::nullopt, {}, std::nullopt};
      auto step = machine.step(config);
      term = step.config.term;
    }
  }
};

}  // namespace

ClientRunResult run_client(const cs::FunctionStore& store, const std::string& endpoint,
                           long fuel, const std::function<void(int)>& before_round_trip) {
  cs::validate_store(store);
  Driver driver(store, endpoint, before_round_trip);
  driver.out.value = driver.run(fuel);
  return std::move(driver.out);
}

}  // namespace locrpc::net
