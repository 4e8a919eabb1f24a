#pragma once

#include <map>
#include <optional>
#include <vector>

#include "locrpc/closure.hpp"
#include "locrpc/machine.hpp"

namespace locrpc::cs {

struct Frame {
  std::string binder;
  TermPtr body;
};

// Machine configuration with the session annotation over the client/server
// bar. Under the state strategy the client-side invariant is: no session
// open iff the server stack is empty.
struct Config {
  TermPtr term;
  std::optional<Frame> pending;  // engaged while the server runs
  std::vector<Frame> stack;      // state strategy only; always empty under enc
  std::optional<int> session;

  bool on_server() const { return pending.has_value(); }
};

struct SessionEvent {
  enum class Kind { Created, Maintained, Closed };
  Kind kind;
  int sid;
};

bool operator==(const SessionEvent& a, const SessionEvent& b);
std::string to_string(const SessionEvent& e);

// Steps configurations against a function store. Closure applications look
// the function up in the store of the side required by the rule; a closure
// resolving only on the other side is a WrongLocationStore error. The machine
// owns the session counter, so ids are fresh and monotone within one run.
class Machine {
 public:
  Machine(const FunctionStore& store);

  struct StepResult {
    Config config;
    Rule rule;
    std::optional<SessionEvent> event;
  };

  StepResult step(const Config& c);

 private:
  const FunctionStore& store_;
  int next_sid_ = 1;
};

bool is_terminal(const Config& c);

struct SessionStats {
  int sessions_created = 0;
  int max_concurrent_open = 0;  // never exceeds 1 in a single run
  int round_trips = 0;          // client-to-server transitions (Req and Ret)
  std::map<int, int> per_session_round_trips;
};

struct RunResult {
  Value value;
  Trace trace;
  std::vector<SessionEvent> events;
  SessionStats stats;
};

// Runs main to a client value.
RunResult run(const FunctionStore& store, long fuel);

}  // namespace locrpc::cs
