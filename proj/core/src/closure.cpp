#include "locrpc/closure.hpp"

namespace locrpc::cs {

Value vvar(std::string name) { return Value{Value::Var{std::move(name)}}; }
Value vclo(std::string fun, std::vector<Value> env) {
  return Value{Value::Clo{std::move(fun), std::move(env)}};
}
Value vconst(Literal lit) { return Value{Value::Const{std::move(lit)}}; }

TermPtr val(Value v) { return std::make_shared<Term>(Term{Term::Val{std::move(v)}}); }
TermPtr app(Value fun, std::vector<Value> args) {
  return std::make_shared<Term>(Term{Term::App{std::move(fun), std::move(args)}});
}
TermPtr req(Value fun, std::vector<Value> args) {
  return std::make_shared<Term>(Term{Term::Req{std::move(fun), std::move(args)}});
}
TermPtr call(Value fun, std::vector<Value> args) {
  return std::make_shared<Term>(Term{Term::Call{std::move(fun), std::move(args)}});
}
TermPtr ret(Value v) { return std::make_shared<Term>(Term{Term::Ret{std::move(v)}}); }
TermPtr let(std::string binder, TermPtr bound, TermPtr body) {
  return std::make_shared<Term>(
      Term{Term::Let{std::move(binder), std::move(bound), std::move(body)}});
}

const ClosedFunction* FunctionStore::find(const std::string& name, Loc loc) const {
  const auto& m = loc == Loc::Client ? client : server;
  auto it = m.find(name);
  return it == m.end() ? nullptr : &it->second;
}

const ClosedFunction* FunctionStore::find_anywhere(const std::string& name) const {
  if (const auto* f = find(name, Loc::Client)) return f;
  return find(name, Loc::Server);
}

// ---------------------------------------------------------------------------
// Closure conversion
// ---------------------------------------------------------------------------

namespace {

struct Converter {
  FunctionStore store;
  int counter = 0;

  Value value(const anf::Value& v) {
    return std::visit(
        [&](const auto& n) -> Value {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, anf::Value::Var>) {
            return vvar(n.name);
          } else if constexpr (std::is_same_v<T, anf::Value::Const>) {
            return vconst(n.lit);
          } else {
            // Children first, then this lambda's name — names then read off
            // the traversal order, innermost first.
            TermPtr body = term(n.body);
            std::vector<std::string> fvs = anf::free_vars_ordered(anf::Value{n});
            std::string name = "g" + std::to_string(++counter);
            auto& target = n.loc == Loc::Client ? store.client : store.server;
            target.emplace(name, ClosedFunction{fvs, n.loc, n.params, body});
            std::vector<Value> env;
            env.reserve(fvs.size());
            for (const auto& z : fvs) env.push_back(vvar(z));
            return vclo(name, std::move(env));
          }
        },
        v.node);
  }

  TermPtr term(const anf::TermPtr& t) {
    return std::visit(
        [&](const auto& n) -> TermPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, anf::Term::Val>) {
            return val(value(n.value));
          } else if constexpr (std::is_same_v<T, anf::Term::Ret>) {
            return ret(value(n.value));
          } else if constexpr (std::is_same_v<T, anf::Term::Let>) {
            TermPtr bound = term(n.bound);
            return let(n.binder, bound, term(n.body));
          } else {
            Value fun = value(n.fun);
            std::vector<Value> args;
            args.reserve(n.args.size());
            for (const auto& a : n.args) args.push_back(value(a));
            if constexpr (std::is_same_v<T, anf::Term::App>) return app(fun, std::move(args));
            if constexpr (std::is_same_v<T, anf::Term::Req>) return req(fun, std::move(args));
            return call(fun, std::move(args));
          }
        },
        t->node);
  }
};

}  // namespace

FunctionStore closure_convert(const anf::TermPtr& term, anf::Strategy strategy) {
  Converter c;
  c.store.strategy = strategy;
  c.store.main = c.term(term);
  return c.store;
}

// ---------------------------------------------------------------------------
// Substitution (binders are let-bound names only; closures carry no binders)
// ---------------------------------------------------------------------------

namespace {

void value_free_vars(const Value& v, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Value::Var>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, Value::Clo>) {
          for (const auto& e : n.env) value_free_vars(e, out);
        }
      },
      v.node);
}

std::string fresh_like(const std::string& base, const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

void term_names(const TermPtr& t, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Val>) {
          value_free_vars(n.value, out);
        } else if constexpr (std::is_same_v<T, Term::Ret>) {
          value_free_vars(n.value, out);
        } else if constexpr (std::is_same_v<T, Term::Let>) {
          out.insert(n.binder);
          term_names(n.bound, out);
          term_names(n.body, out);
        } else {
          value_free_vars(n.fun, out);
          for (const auto& a : n.args) value_free_vars(a, out);
        }
      },
      t->node);
}

}  // namespace

Value substitute(const Value& v, const Subst& subst) {
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Value::Var>) {
          auto it = subst.find(n.name);
          return it != subst.end() ? it->second : Value{n};
        } else if constexpr (std::is_same_v<T, Value::Const>) {
          return Value{n};
        } else {
          std::vector<Value> env;
          env.reserve(n.env.size());
          for (const auto& e : n.env) env.push_back(substitute(e, subst));
          return vclo(n.fun, std::move(env));
        }
      },
      v.node);
}

TermPtr substitute(const TermPtr& t, const Subst& subst) {
  if (subst.empty()) return t;
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Val>) {
          return val(substitute(n.value, subst));
        } else if constexpr (std::is_same_v<T, Term::Ret>) {
          return ret(substitute(n.value, subst));
        } else if constexpr (std::is_same_v<T, Term::Let>) {
          TermPtr bound = substitute(n.bound, subst);
          Subst inner = subst;
          inner.erase(n.binder);
          std::string binder = n.binder;
          TermPtr body = n.body;
          if (!inner.empty()) {
            std::set<std::string> incoming;
            for (const auto& [k, v2] : inner) value_free_vars(v2, incoming);
            if (incoming.count(binder)) {
              std::set<std::string> avoid = incoming;
              term_names(body, avoid);
              std::string renamed = fresh_like(binder, avoid);
              Subst rename;
              rename[binder] = vvar(renamed);
              body = substitute(body, rename);
              binder = renamed;
            }
            body = substitute(body, inner);
          }
          return let(binder, bound, body);
        } else {
          Value fun = substitute(n.fun, subst);
          std::vector<Value> args;
          args.reserve(n.args.size());
          for (const auto& a : n.args) args.push_back(substitute(a, subst));
          if constexpr (std::is_same_v<T, Term::App>) return app(fun, std::move(args));
          if constexpr (std::is_same_v<T, Term::Req>) return req(fun, std::move(args));
          return call(fun, std::move(args));
        }
      },
      t->node);
}

bool equal(const Value& a, const Value& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* va = std::get_if<Value::Var>(&a.node))
    return va->name == std::get<Value::Var>(b.node).name;
  if (const auto* ca = std::get_if<Value::Const>(&a.node))
    return ca->lit == std::get<Value::Const>(b.node).lit;
  const auto& ka = std::get<Value::Clo>(a.node);
  const auto& kb = std::get<Value::Clo>(b.node);
  if (ka.fun != kb.fun || ka.env.size() != kb.env.size()) return false;
  for (std::size_t i = 0; i < ka.env.size(); ++i)
    if (!equal(ka.env[i], kb.env[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

struct Validator {
  const FunctionStore& store;

  void value(const Value& v) {
    if (const auto* clo = std::get_if<Value::Clo>(&v.node)) {
      const ClosedFunction* f = store.find_anywhere(clo->fun);
      if (f == nullptr)
        throw Error(ErrorKind::MalformedStore, "unknown function '" + clo->fun + "'");
      if (f->free_vars.size() != clo->env.size())
        throw Error(ErrorKind::MalformedStore,
                    "closure over '" + clo->fun + "' carries " +
                        std::to_string(clo->env.size()) + " values for " +
                        std::to_string(f->free_vars.size()) + " free variables");
      for (const auto& e : clo->env) value(e);
    }
  }

  void term(const TermPtr& t, anf::Strategy strategy, Loc ambient) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Term::Val>) {
            value(n.value);
          } else if constexpr (std::is_same_v<T, Term::Ret>) {
            if (strategy == anf::Strategy::Enc)
              throw Error(ErrorKind::MalformedStore, "ret in a state-encoding store");
            if (ambient != Loc::Client)
              throw Error(ErrorKind::MalformedStore, "ret outside client code");
            value(n.value);
          } else if constexpr (std::is_same_v<T, Term::Let>) {
            term(n.bound, strategy, ambient);
            term(n.body, strategy, ambient);
          } else {
            if constexpr (std::is_same_v<T, Term::Req>) {
              if (ambient != Loc::Client)
                throw Error(ErrorKind::MalformedStore, "req outside client code");
            }
            if constexpr (std::is_same_v<T, Term::Call>) {
              if (ambient != Loc::Server)
                throw Error(ErrorKind::MalformedStore, "call outside server code");
            }
            value(n.fun);
            for (const auto& a : n.args) value(a);
          }
        },
        t->node);
  }

  void scope(const TermPtr& t, std::set<std::string> bound, const std::string& where) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Term::Val>) {
            scope_value(n.value, bound, where);
          } else if constexpr (std::is_same_v<T, Term::Ret>) {
            scope_value(n.value, bound, where);
          } else if constexpr (std::is_same_v<T, Term::Let>) {
            scope(n.bound, bound, where);
            std::set<std::string> inner = bound;
            inner.insert(n.binder);
            scope(n.body, std::move(inner), where);
          } else {
            scope_value(n.fun, bound, where);
            for (const auto& a : n.args) scope_value(a, bound, where);
          }
        },
        t->node);
  }

  void scope_value(const Value& v, const std::set<std::string>& bound, const std::string& where) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Value::Var>) {
            if (!bound.count(n.name))
              throw Error(ErrorKind::MalformedStore,
                          "variable '" + n.name + "' escapes its scope in " + where);
          } else if constexpr (std::is_same_v<T, Value::Clo>) {
            for (const auto& e : n.env) scope_value(e, bound, where);
          }
        },
        v.node);
  }
};

}  // namespace

void validate_store(const FunctionStore& store) {
  if (store.main == nullptr) throw Error(ErrorKind::MalformedStore, "store has no main term");
  for (const auto& [name, f] : store.client)
    if (store.server.count(name))
      throw Error(ErrorKind::MalformedStore, "function '" + name + "' defined on both sides");

  Validator v{store};
  v.term(store.main, store.strategy, Loc::Client);
  v.scope(store.main, {}, "main");
  for (const auto& side : {&store.client, &store.server}) {
    for (const auto& [name, f] : *side) {
      if (f.params.empty())
        throw Error(ErrorKind::MalformedStore, "function '" + name + "' takes no parameters");
      v.term(f.body, store.strategy, f.loc);
      std::set<std::string> bound(f.free_vars.begin(), f.free_vars.end());
      bound.insert(f.params.begin(), f.params.end());
      v.scope(f.body, std::move(bound), "function '" + name + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// Erasure back to located lambdas
// ---------------------------------------------------------------------------

namespace {

anf::Value erase_value(const FunctionStore& store, const Value& v);

anf::TermPtr erase_term(const FunctionStore& store, const TermPtr& t) {
  return std::visit(
      [&](const auto& n) -> anf::TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Val>) {
          return anf::val(erase_value(store, n.value));
        } else if constexpr (std::is_same_v<T, Term::Ret>) {
          return anf::ret(erase_value(store, n.value));
        } else if constexpr (std::is_same_v<T, Term::Let>) {
          return anf::let(n.binder, erase_term(store, n.bound), erase_term(store, n.body));
        } else {
          anf::Value fun = erase_value(store, n.fun);
          std::vector<anf::Value> args;
          args.reserve(n.args.size());
          for (const auto& a : n.args) args.push_back(erase_value(store, a));
          if constexpr (std::is_same_v<T, Term::App>) return anf::app(fun, std::move(args));
          if constexpr (std::is_same_v<T, Term::Req>) return anf::req(fun, std::move(args));
          return anf::call(fun, std::move(args));
        }
      },
      t->node);
}

anf::Value erase_value(const FunctionStore& store, const Value& v) {
  return std::visit(
      [&](const auto& n) -> anf::Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Value::Var>) {
          return anf::vvar(n.name);
        } else if constexpr (std::is_same_v<T, Value::Const>) {
          return anf::vconst(n.lit);
        } else {
          const ClosedFunction* f = store.find_anywhere(n.fun);
          if (f == nullptr)
            throw Error(ErrorKind::MalformedStore, "unknown function '" + n.fun + "'");
          anf::Value lam = anf::vlam(f->loc, f->params, erase_term(store, f->body));
          anf::Subst env;
          for (std::size_t i = 0; i < f->free_vars.size() && i < n.env.size(); ++i)
            env[f->free_vars[i]] = erase_value(store, n.env[i]);
          return anf::substitute(lam, env);
        }
      },
      v.node);
}

}  // namespace

anf::TermPtr erase_closures(const FunctionStore& store) {
  return erase_term(store, store.main);
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

void render_value(const Value& v, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Value::Var>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, Value::Const>) {
          out += n.lit.show();
        } else {
          out += "clo(" + n.fun + ", {";
          for (std::size_t i = 0; i < n.env.size(); ++i) {
            if (i) out += ", ";
            render_value(n.env[i], out);
          }
          out += "})";
        }
      },
      v.node);
}

void render_term(const TermPtr& t, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Val>) {
          render_value(n.value, out);
        } else if constexpr (std::is_same_v<T, Term::App>) {
          render_value(n.fun, out);
          out += '(';
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ", ";
            render_value(n.args[i], out);
          }
          out += ')';
        } else if constexpr (std::is_same_v<T, Term::Req> || std::is_same_v<T, Term::Call>) {
          out += std::is_same_v<T, Term::Req> ? "req " : "call ";
          render_value(n.fun, out);
          out += '(';
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ", ";
            render_value(n.args[i], out);
          }
          out += ')';
        } else if constexpr (std::is_same_v<T, Term::Ret>) {
          out += "ret(";
          render_value(n.value, out);
          out += ')';
        } else {
          out += "let " + n.binder + " = ";
          render_term(n.bound, out);
          out += " in ";
          render_term(n.body, out);
        }
      },
      t->node);
}

}  // namespace

std::string pretty(const TermPtr& t) {
  std::string out;
  render_term(t, out);
  return out;
}

std::string pretty(const Value& v) {
  std::string out;
  render_value(v, out);
  return out;
}

}  // namespace locrpc::cs
