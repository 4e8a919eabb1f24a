#include "locrpc/machine.hpp"

#include <sstream>

namespace locrpc {

const char* to_string(Rule r) {
  switch (r) {
    case Rule::AppC: return "AppC";
    case Rule::Req: return "Req";
    case Rule::ValC: return "ValC";
    case Rule::LetC: return "LetC";
    case Rule::Ret: return "Ret";
    case Rule::AppS: return "AppS";
    case Rule::Call: return "Call";
    case Rule::Reply: return "Reply";
    case Rule::ValS: return "ValS";
    case Rule::LetS: return "LetS";
  }
  return "?";
}

char rule_side(Rule r) {
  switch (r) {
    case Rule::AppC:
    case Rule::Req:
    case Rule::ValC:
    case Rule::LetC:
    case Rule::Ret:
      return 'C';
    default:
      return 'S';
  }
}

std::string render_trace(const Trace& trace, bool with_depth) {
  std::ostringstream out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << (i + 1) << ' ' << to_string(trace[i].rule) << ' ' << rule_side(trace[i].rule);
    if (with_depth) out << " depth=" << trace[i].depth;
    out << '\n';
  }
  return out.str();
}

}  // namespace locrpc
