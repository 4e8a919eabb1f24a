#pragma once

#include <optional>

#include "locrpc/anf.hpp"
#include "locrpc/machine.hpp"

namespace locrpc::enc {

// A pending client context let x = [-] in body.
struct Frame {
  std::string binder;
  anf::TermPtr body;
};

// Client configurations have no pending frame (the server context is always
// empty under this strategy); server configurations carry the one frame the
// client left behind.
struct Config {
  anf::TermPtr term;
  std::optional<Frame> pending;

  bool on_server() const { return pending.has_value(); }
};

bool is_terminal(const Config& c);

struct StepResult {
  Config config;
  Rule rule;
};

// One step of the seven-rule machine. Exactly one rule applies to any
// non-terminal configuration the compiler can produce; anything else throws
// Error(Stuck).
StepResult step(const Config& c);

struct RunResult {
  anf::Value value;
  Trace trace;
};

// Runs a closed client term to a value. Fuel is one unit per step.
RunResult run(const anf::TermPtr& term, long fuel);

}  // namespace locrpc::enc
