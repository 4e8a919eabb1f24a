#include "locrpc/anf.hpp"

#include <utility>

namespace locrpc::anf {

const char* to_string(Strategy s) { return s == Strategy::Enc ? "enc" : "state"; }

Value vvar(std::string name) { return Value{Value::Var{std::move(name)}}; }
Value vlam(Loc loc, std::vector<std::string> params, TermPtr body) {
  return Value{Value::Lam{loc, std::move(params), std::move(body)}};
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

// ---------------------------------------------------------------------------
// Free variables
// ---------------------------------------------------------------------------

namespace {

struct FvWalk {
  std::vector<std::string> bound;
  std::vector<std::string> ordered;
  std::set<std::string> seen;

  bool is_bound(const std::string& n) const {
    for (auto it = bound.rbegin(); it != bound.rend(); ++it)
      if (*it == n) return true;
    return false;
  }

  void value(const Value& v) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Value::Var>) {
            if (!is_bound(n.name) && seen.insert(n.name).second) ordered.push_back(n.name);
          } else if constexpr (std::is_same_v<T, Value::Lam>) {
            std::size_t mark = bound.size();
            for (const auto& p : n.params) bound.push_back(p);
            term(n.body);
            bound.resize(mark);
          }
        },
        v.node);
  }

  void term(const TermPtr& t) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Term::Val>) {
            value(n.value);
          } else if constexpr (std::is_same_v<T, Term::Ret>) {
            value(n.value);
          } else if constexpr (std::is_same_v<T, Term::Let>) {
            term(n.bound);
            bound.push_back(n.binder);
            term(n.body);
            bound.pop_back();
          } else {
            value(n.fun);
            for (const auto& a : n.args) value(a);
          }
        },
        t->node);
  }
};

}  // namespace

std::vector<std::string> free_vars_ordered(const Value& v) {
  FvWalk w;
  w.value(v);
  return w.ordered;
}

std::set<std::string> free_vars(const Value& v) {
  FvWalk w;
  w.value(v);
  return w.seen;
}

std::set<std::string> free_vars(const TermPtr& t) {
  FvWalk w;
  w.term(t);
  return w.seen;
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

namespace {

std::string fresh_like(const std::string& base, const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

// Drops shadowed entries and renames binders that would capture a free
// variable of a substituted value. Returns the (possibly renamed) binders.
template <typename Rec>
std::vector<std::string> enter_binders(const std::vector<std::string>& binders, Subst& subst,
                                       TermPtr& body, Rec rec) {
  for (const auto& b : binders) subst.erase(b);
  if (subst.empty()) return binders;

  std::set<std::string> incoming;
  for (const auto& [k, v] : subst) {
    auto fv = free_vars(v);
    incoming.insert(fv.begin(), fv.end());
  }
  std::vector<std::string> out = binders;
  Subst renames;
  for (auto& b : out) {
    if (incoming.count(b)) {
      std::set<std::string> avoid = incoming;
      auto body_fv = free_vars(body);
      avoid.insert(body_fv.begin(), body_fv.end());
      for (const auto& o : out) avoid.insert(o);
      std::string nb = fresh_like(b, avoid);
      renames[b] = vvar(nb);
      b = nb;
    }
  }
  if (!renames.empty()) body = rec(body, renames);
  return out;
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
          Subst inner = subst;
          TermPtr body = n.body;
          std::vector<std::string> params = enter_binders(
              n.params, inner, body,
              [](const TermPtr& t, const Subst& s) { return substitute(t, s); });
          if (inner.empty()) return vlam(n.loc, params, body);
          return vlam(n.loc, params, substitute(body, inner));
        }
      },
      v.node);
}

TermPtr substitute(const TermPtr& t, const Subst& subst) {
  if (subst.empty()) return t;
  auto value_fn = [&](const Value& v) { return substitute(v, subst); };
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Val>) {
          return val(value_fn(n.value));
        } else if constexpr (std::is_same_v<T, Term::Ret>) {
          return ret(value_fn(n.value));
        } else if constexpr (std::is_same_v<T, Term::Let>) {
          TermPtr bound = substitute(n.bound, subst);
          Subst inner = subst;
          TermPtr body = n.body;
          std::vector<std::string> binder = enter_binders(
              {n.binder}, inner, body,
              [](const TermPtr& t2, const Subst& s) { return substitute(t2, s); });
          if (!inner.empty()) body = substitute(body, inner);
          return let(binder[0], bound, body);
        } else {
          std::vector<Value> args;
          args.reserve(n.args.size());
          for (const auto& a : n.args) args.push_back(value_fn(a));
          if constexpr (std::is_same_v<T, Term::App>) return app(value_fn(n.fun), std::move(args));
          if constexpr (std::is_same_v<T, Term::Req>) return req(value_fn(n.fun), std::move(args));
          return call(value_fn(n.fun), std::move(args));
        }
      },
      t->node);
}

// ---------------------------------------------------------------------------
// Alpha equality
// ---------------------------------------------------------------------------

namespace {

struct AlphaCtx {
  std::vector<std::pair<std::string, std::string>> binders;

  bool var(const std::string& a, const std::string& b) const {
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
      bool ba = it->first == a;
      bool bb = it->second == b;
      if (ba || bb) return ba && bb;
    }
    return a == b;
  }
};

bool value_eq(const Value& a, const Value& b, AlphaCtx& ctx);

bool term_eq(const TermPtr& a, const TermPtr& b, AlphaCtx& ctx) {
  if (a->node.index() != b->node.index()) return false;
  if (const auto* va = std::get_if<Term::Val>(&a->node))
    return value_eq(va->value, std::get<Term::Val>(b->node).value, ctx);
  if (const auto* ra = std::get_if<Term::Ret>(&a->node))
    return value_eq(ra->value, std::get<Term::Ret>(b->node).value, ctx);
  if (const auto* la = std::get_if<Term::Let>(&a->node)) {
    const auto& lb = std::get<Term::Let>(b->node);
    if (!term_eq(la->bound, lb.bound, ctx)) return false;
    ctx.binders.emplace_back(la->binder, lb.binder);
    bool ok = term_eq(la->body, lb.body, ctx);
    ctx.binders.pop_back();
    return ok;
  }
  auto cmp_apps = [&](const Value& fa, const std::vector<Value>& aa, const Value& fb,
                      const std::vector<Value>& ab) {
    if (aa.size() != ab.size()) return false;
    if (!value_eq(fa, fb, ctx)) return false;
    for (std::size_t i = 0; i < aa.size(); ++i)
      if (!value_eq(aa[i], ab[i], ctx)) return false;
    return true;
  };
  if (const auto* pa = std::get_if<Term::App>(&a->node)) {
    const auto& pb = std::get<Term::App>(b->node);
    return cmp_apps(pa->fun, pa->args, pb.fun, pb.args);
  }
  if (const auto* qa = std::get_if<Term::Req>(&a->node)) {
    const auto& qb = std::get<Term::Req>(b->node);
    return cmp_apps(qa->fun, qa->args, qb.fun, qb.args);
  }
  const auto& ca = std::get<Term::Call>(a->node);
  const auto& cb = std::get<Term::Call>(b->node);
  return cmp_apps(ca.fun, ca.args, cb.fun, cb.args);
}

bool value_eq(const Value& a, const Value& b, AlphaCtx& ctx) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* va = std::get_if<Value::Var>(&a.node))
    return ctx.var(va->name, std::get<Value::Var>(b.node).name);
  if (const auto* ca = std::get_if<Value::Const>(&a.node))
    return ca->lit == std::get<Value::Const>(b.node).lit;
  const auto& la = std::get<Value::Lam>(a.node);
  const auto& lb = std::get<Value::Lam>(b.node);
  if (la.loc != lb.loc || la.params.size() != lb.params.size()) return false;
  for (std::size_t i = 0; i < la.params.size(); ++i)
    ctx.binders.emplace_back(la.params[i], lb.params[i]);
  bool ok = term_eq(la.body, lb.body, ctx);
  ctx.binders.resize(ctx.binders.size() - la.params.size());
  return ok;
}

}  // namespace

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  AlphaCtx ctx;
  return term_eq(a, b, ctx);
}

bool alpha_eq(const Value& a, const Value& b) {
  AlphaCtx ctx;
  return value_eq(a, b, ctx);
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

void render_term(const TermPtr& t, std::string& out);

void render_value(const Value& v, bool fun_pos, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Value::Var>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, Value::Const>) {
          out += n.lit.show();
        } else {
          if (fun_pos) out += '(';
          out += '\\';
          out += loc_char(n.loc);
          out += ' ';
          if (n.params.size() == 1) {
            out += n.params[0];
          } else {
            out += '(';
            for (std::size_t i = 0; i < n.params.size(); ++i) {
              if (i) out += ", ";
              out += n.params[i];
            }
            out += ')';
          }
          out += ". ";
          render_term(n.body, out);
          if (fun_pos) out += ')';
        }
      },
      v.node);
}

void render_args(const std::vector<Value>& args, std::string& out) {
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    render_value(args[i], false, out);
  }
  out += ')';
}

void render_term(const TermPtr& t, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Val>) {
          render_value(n.value, false, out);
        } else if constexpr (std::is_same_v<T, Term::App>) {
          render_value(n.fun, true, out);
          render_args(n.args, out);
        } else if constexpr (std::is_same_v<T, Term::Req>) {
          out += "req ";
          render_value(n.fun, true, out);
          render_args(n.args, out);
        } else if constexpr (std::is_same_v<T, Term::Call>) {
          out += "call ";
          render_value(n.fun, true, out);
          render_args(n.args, out);
        } else if constexpr (std::is_same_v<T, Term::Ret>) {
          out += "ret(";
          render_value(n.value, false, out);
          out += ')';
        } else {
          out += "let ";
          out += n.binder;
          out += " = ";
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
  render_value(v, false, out);
  return out;
}

// ---------------------------------------------------------------------------
// Well-formedness
// ---------------------------------------------------------------------------

namespace {

void wf_value(const Value& v, Strategy strategy);

void wf_term(const TermPtr& t, Strategy strategy, Loc ambient) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Val>) {
          wf_value(n.value, strategy);
        } else if constexpr (std::is_same_v<T, Term::Ret>) {
          if (strategy == Strategy::Enc)
            throw Error(ErrorKind::IllformedAnnotation, "ret in a state-encoding term");
          if (ambient != Loc::Client)
            throw Error(ErrorKind::IllformedAnnotation, "ret outside client code");
          wf_value(n.value, strategy);
        } else if constexpr (std::is_same_v<T, Term::Let>) {
          wf_term(n.bound, strategy, ambient);
          wf_term(n.body, strategy, ambient);
        } else {
          if constexpr (std::is_same_v<T, Term::Req>) {
            if (ambient != Loc::Client)
              throw Error(ErrorKind::IllformedAnnotation, "req outside client code");
          }
          if constexpr (std::is_same_v<T, Term::Call>) {
            if (ambient != Loc::Server)
              throw Error(ErrorKind::IllformedAnnotation, "call outside server code");
          }
          wf_value(n.fun, strategy);
          for (const auto& a : n.args) wf_value(a, strategy);
        }
      },
      t->node);
}

void wf_value(const Value& v, Strategy strategy) {
  if (const auto* lam = std::get_if<Value::Lam>(&v.node)) {
    if (lam->params.empty())
      throw Error(ErrorKind::IllformedAnnotation, "lambda with no parameters");
    wf_term(lam->body, strategy, lam->loc);
  }
}

}  // namespace

void check_well_formed(const TermPtr& t, Strategy strategy, Loc ambient) {
  wf_term(t, strategy, ambient);
}

}  // namespace locrpc::anf
