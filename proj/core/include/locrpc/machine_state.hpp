#pragma once

#include <optional>
#include <vector>

#include "locrpc/anf.hpp"
#include "locrpc/machine.hpp"

namespace locrpc::state {

struct Frame {
  std::string binder;
  anf::TermPtr body;
};

// Server contexts form a stack: call pushes, ret pops. back() is the top.
using Stack = std::vector<Frame>;

struct Config {
  anf::TermPtr term;
  std::optional<Frame> pending;  // engaged while the server runs
  Stack stack;

  bool on_server() const { return pending.has_value(); }
};

bool is_terminal(const Config& c);

struct StepResult {
  Config config;
  Rule rule;
};

// One step of the ten-rule machine; throws Error(Stuck) when no rule applies
// (for example ret with an empty stack, or call on the client side).
StepResult step(const Config& c);

struct RunResult {
  anf::Value value;
  Trace trace;
};

// Runs a closed client term from the empty stack. Trace entries record the
// stack height after each step.
RunResult run(const anf::TermPtr& term, long fuel);

// Definition of call-return balance as a scan over step rules: the Call/Ret
// subsequence must form properly nested pairs and close by the end. Total —
// never throws.
bool is_call_return_balanced(const Trace& trace);

}  // namespace locrpc::state
