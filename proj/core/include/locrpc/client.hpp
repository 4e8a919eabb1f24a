#pragma once

#include <functional>
#include <string>
#include <vector>

#include "locrpc/machine_cs.hpp"

namespace locrpc::net {

struct Message {
  bool outgoing;
  std::string body;  // verbatim wire bytes
};

struct ClientRunResult {
  cs::Value value;
  std::vector<Message> log;
  int round_trips = 0;
  std::vector<cs::SessionEvent> events;
};

// The trampolined client driver: evaluates main with the client half of the
// store, turning req/ret into wire exchanges. A Reply resumes the pending
// let; a Call runs the carried client closure in its place, which may issue
// further requests — the loop bounds the nesting, not the stack. Session
// events are numbered client-side the same way the local machine numbers
// them, so distributed and local event sequences compare directly.
//
// before_round_trip, when set, runs before each wire exchange with the count
// of exchanges completed so far (test hook for restart experiments).
//
// Throws Transport (endpoint unreachable), DecodeError, UnknownSession (the
// server answered 409), ServerError (other non-200), FuelExhausted.
ClientRunResult run_client(const cs::FunctionStore& store, const std::string& endpoint,
                           long fuel,
                           const std::function<void(int)>& before_round_trip = {});

}  // namespace locrpc::net
