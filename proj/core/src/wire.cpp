#include "locrpc/wire.hpp"

#include <json.hpp>

namespace locrpc::net {

using nlohmann::json;

namespace {

void require_closed(const cs::Value& v) {
  std::visit(
      [](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, cs::Value::Var>) {
          throw Error(ErrorKind::DecodeError, "open value on the wire: '" + n.name + "'");
        } else if constexpr (std::is_same_v<T, cs::Value::Clo>) {
          for (const auto& e : n.env) require_closed(e);
        }
      },
      v.node);
}

json value_to_json(const cs::Value& v) {
  require_closed(v);
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, cs::Value::Var>) {
          return json();  // unreachable
        } else if constexpr (std::is_same_v<T, cs::Value::Const>) {
          switch (n.lit.base()) {
            case BaseKind::Int: return json{{"t", "const"}, {"lit", n.lit.as_int()}};
            case BaseKind::Str: return json{{"t", "const"}, {"lit", n.lit.as_text()}};
            case BaseKind::Unit: return json{{"t", "const"}, {"lit", nullptr}};
          }
          return json();
        } else {
          json env = json::array();
          for (const auto& e : n.env) env.push_back(value_to_json(e));
          return json{{"t", "clo"}, {"name", n.fun}, {"env", std::move(env)}};
        }
      },
      v.node);
}

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end())
    throw Error(ErrorKind::DecodeError, std::string("missing field '") + name + "'");
  return *it;
}

cs::Value value_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::DecodeError, "value must be an object");
  const json& t = field(j, "t");
  if (t == "const") {
    const json& lit = field(j, "lit");
    if (lit.is_number_integer()) return cs::vconst(Literal::integer(lit.get<std::int64_t>()));
    if (lit.is_string()) return cs::vconst(Literal::text(lit.get<std::string>()));
    if (lit.is_null()) return cs::vconst(Literal::unit());
    throw Error(ErrorKind::DecodeError, "bad literal");
  }
  if (t == "clo") {
    const json& name = field(j, "name");
    const json& env = field(j, "env");
    if (!name.is_string() || !env.is_array())
      throw Error(ErrorKind::DecodeError, "malformed closure");
    std::vector<cs::Value> vals;
    for (const auto& e : env) vals.push_back(value_from_json(e));
    return cs::vclo(name.get<std::string>(), std::move(vals));
  }
  if (t == "var") throw Error(ErrorKind::DecodeError, "open value on the wire");
  throw Error(ErrorKind::DecodeError, "unknown value tag");
}

json args_to_json(const std::vector<cs::Value>& args) {
  json out = json::array();
  for (const auto& a : args) out.push_back(value_to_json(a));
  return out;
}

std::vector<cs::Value> args_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::DecodeError, "args must be an array");
  std::vector<cs::Value> out;
  for (const auto& a : j) out.push_back(value_from_json(a));
  return out;
}

json parse_document(const std::string& bytes) {
  try {
    return json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::DecodeError,
                std::string("invalid JSON at byte ") + std::to_string(e.byte) + ": " + e.what());
  }
}

std::optional<std::string> optional_session(const json& j) {
  auto it = j.find("session");
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw Error(ErrorKind::DecodeError, "session must be a string");
  return it->get<std::string>();
}

}  // namespace

// The throwing conversions run before any braced json construction; an
// exception inside a brace list would leak the list's temporaries.
std::string encode(const WireRequest& msg) {
  json doc;
  if (const auto* req = std::get_if<ReqMsg>(&msg)) {
    json fun = value_to_json(req->fun);
    json args = args_to_json(req->args);
    doc = json{{"kind", "req"}, {"fun", std::move(fun)}, {"args", std::move(args)}};
    if (req->session) doc["session"] = *req->session;
  } else {
    const auto& ret = std::get<RetMsg>(msg);
    json value = value_to_json(ret.value);
    doc = json{{"kind", "ret"}, {"session", ret.session}, {"value", std::move(value)}};
  }
  return doc.dump();
}

std::string encode(const WireResponse& msg) {
  json doc;
  if (const auto* reply = std::get_if<ReplyMsg>(&msg)) {
    json value = value_to_json(reply->value);
    doc = json{{"kind", "reply"}, {"value", std::move(value)}};
    if (reply->session) doc["session"] = *reply->session;
  } else {
    const auto& call = std::get<CallMsg>(msg);
    json fun = value_to_json(call.fun);
    json args = args_to_json(call.args);
    doc = json{{"kind", "call"}, {"fun", std::move(fun)}, {"args", std::move(args)}};
    if (call.session) doc["session"] = *call.session;
  }
  return doc.dump();
}

WireRequest decode_request(const std::string& bytes) {
  json doc = parse_document(bytes);
  if (!doc.is_object()) throw Error(ErrorKind::DecodeError, "request must be an object");
  const json& kind = field(doc, "kind");
  if (kind == "req") {
    ReqMsg out{optional_session(doc), value_from_json(field(doc, "fun")),
               args_from_json(field(doc, "args"))};
    return out;
  }
  if (kind == "ret") {
    auto session = optional_session(doc);
    if (!session) throw Error(ErrorKind::DecodeError, "ret requires a session");
    return RetMsg{*session, value_from_json(field(doc, "value"))};
  }
  throw Error(ErrorKind::DecodeError, "unknown request kind");
}

WireResponse decode_response(const std::string& bytes) {
  json doc = parse_document(bytes);
  if (!doc.is_object()) throw Error(ErrorKind::DecodeError, "response must be an object");
  const json& kind = field(doc, "kind");
  if (kind == "reply")
    return ReplyMsg{optional_session(doc), value_from_json(field(doc, "value"))};
  if (kind == "call")
    return CallMsg{optional_session(doc), value_from_json(field(doc, "fun")),
                   args_from_json(field(doc, "args"))};
  throw Error(ErrorKind::DecodeError, "unknown response kind");
}

}  // namespace locrpc::net
