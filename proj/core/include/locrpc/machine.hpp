#pragma once

#include <string>
#include <vector>

namespace locrpc {

// Step rules shared by the configuration machines. The enc machines use the
// first seven; Ret/ValS/LetS exist only under the state strategy.
enum class Rule { AppC, Req, ValC, LetC, Ret, AppS, Call, Reply, ValS, LetS };

const char* to_string(Rule r);

// Side executing the step. Ret is listed with the client rules (it fires on a
// client term) and is reported as a client step even though it transfers
// control to the server.
char rule_side(Rule r);

struct TraceEntry {
  Rule rule;
  int depth = 0;  // server stack height after the step; 0 under enc
};

using Trace = std::vector<TraceEntry>;

// One line per step: "<n> <RuleName> <side>", plus " depth=<d>" when
// with_depth is set (the stateful machines).
std::string render_trace(const Trace& trace, bool with_depth);

}  // namespace locrpc
