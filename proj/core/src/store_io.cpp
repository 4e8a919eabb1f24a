#include "locrpc/store_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace locrpc::cs {

using nlohmann::json;

namespace {

json literal_to_json(const Literal& lit) {
  switch (lit.base()) {
    case BaseKind::Int: return json(lit.as_int());
    case BaseKind::Str: return json(lit.as_text());
    case BaseKind::Unit: return json(nullptr);
  }
  return json(nullptr);
}

Literal literal_from_json(const json& j) {
  if (j.is_number_integer()) return Literal::integer(j.get<std::int64_t>());
  if (j.is_string()) return Literal::text(j.get<std::string>());
  if (j.is_null()) return Literal::unit();
  throw Error(ErrorKind::DecodeError, "literal must be an integer, a string, or null");
}

json value_to_json(const Value& v) {
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Value::Var>) {
          return json{{"t", "var"}, {"name", n.name}};
        } else if constexpr (std::is_same_v<T, Value::Const>) {
          return json{{"t", "const"}, {"lit", literal_to_json(n.lit)}};
        } else {
          json env = json::array();
          for (const auto& e : n.env) env.push_back(value_to_json(e));
          return json{{"t", "clo"}, {"name", n.fun}, {"env", std::move(env)}};
        }
      },
      v.node);
}

json term_to_json(const TermPtr& t) {
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Val>) {
          return value_to_json(n.value);
        } else if constexpr (std::is_same_v<T, Term::Ret>) {
          return json{{"t", "ret"}, {"fun", value_to_json(n.value)}};
        } else if constexpr (std::is_same_v<T, Term::Let>) {
          return json{{"t", "let"},
                      {"x", n.binder},
                      {"bound", term_to_json(n.bound)},
                      {"body", term_to_json(n.body)}};
        } else {
          const char* tag = std::is_same_v<T, Term::App> ? "app"
                            : std::is_same_v<T, Term::Req> ? "req" : "call";
          json args = json::array();
          for (const auto& a : n.args) args.push_back(value_to_json(a));
          return json{{"t", tag}, {"fun", value_to_json(n.fun)}, {"args", std::move(args)}};
        }
      },
      t->node);
}

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end())
    throw Error(ErrorKind::DecodeError, std::string("missing field '") + name + "'");
  return *it;
}

std::string tag_of(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::DecodeError, "expected an object");
  const json& t = field(j, "t");
  if (!t.is_string()) throw Error(ErrorKind::DecodeError, "field 't' must be a string");
  return t.get<std::string>();
}

Value value_from_json(const json& j) {
  std::string t = tag_of(j);
  if (t == "var") {
    const json& name = field(j, "name");
    if (!name.is_string()) throw Error(ErrorKind::DecodeError, "var name must be a string");
    return vvar(name.get<std::string>());
  }
  if (t == "const") return vconst(literal_from_json(field(j, "lit")));
  if (t == "clo") {
    const json& name = field(j, "name");
    const json& env = field(j, "env");
    if (!name.is_string() || !env.is_array())
      throw Error(ErrorKind::DecodeError, "malformed closure");
    std::vector<Value> vals;
    for (const auto& e : env) vals.push_back(value_from_json(e));
    return vclo(name.get<std::string>(), std::move(vals));
  }
  throw Error(ErrorKind::DecodeError, "expected a value, got tag '" + t + "'");
}

TermPtr term_from_json(const json& j) {
  std::string t = tag_of(j);
  if (t == "var" || t == "const" || t == "clo") return val(value_from_json(j));
  if (t == "ret") return ret(value_from_json(field(j, "fun")));
  if (t == "let") {
    const json& x = field(j, "x");
    if (!x.is_string()) throw Error(ErrorKind::DecodeError, "let binder must be a string");
    return let(x.get<std::string>(), term_from_json(field(j, "bound")),
               term_from_json(field(j, "body")));
  }
  if (t == "app" || t == "req" || t == "call") {
    Value fun = value_from_json(field(j, "fun"));
    const json& args_j = field(j, "args");
    if (!args_j.is_array()) throw Error(ErrorKind::DecodeError, "args must be an array");
    std::vector<Value> args;
    for (const auto& a : args_j) args.push_back(value_from_json(a));
    if (t == "app") return app(std::move(fun), std::move(args));
    if (t == "req") return req(std::move(fun), std::move(args));
    return call(std::move(fun), std::move(args));
  }
  throw Error(ErrorKind::DecodeError, "unknown term tag '" + t + "'");
}

json fun_to_json(const ClosedFunction& f) {
  return json{{"fvs", f.free_vars},
              {"loc", std::string(1, loc_char(f.loc))},
              {"params", f.params},
              {"body", term_to_json(f.body)}};
}

ClosedFunction fun_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::DecodeError, "function must be an object");
  const json& fvs = field(j, "fvs");
  const json& loc = field(j, "loc");
  const json& params = field(j, "params");
  if (!fvs.is_array() || !params.is_array() || !loc.is_string())
    throw Error(ErrorKind::DecodeError, "malformed function");
  std::string l = loc.get<std::string>();
  if (l != "c" && l != "s") throw Error(ErrorKind::DecodeError, "loc must be \"c\" or \"s\"");
  ClosedFunction out;
  out.loc = l == "c" ? Loc::Client : Loc::Server;
  for (const auto& v : fvs) out.free_vars.push_back(v.get<std::string>());
  for (const auto& p : params) out.params.push_back(p.get<std::string>());
  out.body = term_from_json(field(j, "body"));
  return out;
}

}  // namespace

std::string store_to_json(const FunctionStore& store) {
  json client = json::object();
  for (const auto& [name, f] : store.client) client[name] = fun_to_json(f);
  json server = json::object();
  for (const auto& [name, f] : store.server) server[name] = fun_to_json(f);
  json doc{{"strategy", to_string(store.strategy)},
           {"main", term_to_json(store.main)},
           {"client", std::move(client)},
           {"server", std::move(server)}};
  return doc.dump(2) + "\n";
}

FunctionStore store_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::DecodeError,
                std::string("invalid JSON at byte ") + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::DecodeError, "store must be an object");
  FunctionStore store;
  const json& strat = field(doc, "strategy");
  if (strat == "enc") {
    store.strategy = anf::Strategy::Enc;
  } else if (strat == "state") {
    store.strategy = anf::Strategy::State;
  } else {
    throw Error(ErrorKind::DecodeError, "strategy must be \"enc\" or \"state\"");
  }
  store.main = term_from_json(field(doc, "main"));
  const json& client = field(doc, "client");
  const json& server = field(doc, "server");
  if (!client.is_object() || !server.is_object())
    throw Error(ErrorKind::DecodeError, "client/server must be objects");
  for (const auto& [name, f] : client.items()) store.client.emplace(name, fun_from_json(f));
  for (const auto& [name, f] : server.items()) store.server.emplace(name, fun_from_json(f));
  validate_store(store);
  return store;
}

void write_store_file(const FunctionStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Transport, "cannot open '" + path + "' for writing");
  out << store_to_json(store);
}

FunctionStore read_store_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Transport, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return store_from_json(buf.str());
}

}  // namespace locrpc::cs
