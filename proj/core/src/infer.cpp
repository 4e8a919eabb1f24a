#include "locrpc/infer.hpp"

#include <utility>
#include <vector>

namespace locrpc::ty {

// ---------------------------------------------------------------------------
// Declarative checker
// ---------------------------------------------------------------------------

TypePtr check(const TypeEnv& env, Loc at, const AnnPtr& term) {
  return std::visit(
      [&](const auto& n) -> TypePtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AnnTerm::Var>) {
          auto it = env.find(n.name);
          if (it == env.end())
            throw Error(ErrorKind::UnboundVariable, "unbound variable '" + n.name + "'",
                        term->span);
          if (!type_equal(it->second, term->type))
            throw Error(ErrorKind::TypeMismatch,
                        "variable '" + n.name + "' annotated " + pretty(term->type) +
                            " but bound at " + pretty(it->second),
                        term->span);
          return it->second;
        } else if constexpr (std::is_same_v<T, AnnTerm::Const>) {
          TypePtr t = base(n.lit.base());
          if (!type_equal(t, term->type))
            throw Error(ErrorKind::TypeMismatch, "constant annotated " + pretty(term->type),
                        term->span);
          return t;
        } else if constexpr (std::is_same_v<T, AnnTerm::Lam>) {
          const auto* ar = std::get_if<Type::Arrow>(&term->type->node);
          if (ar == nullptr)
            throw Error(ErrorKind::TypeMismatch, "lambda annotated with non-arrow type",
                        term->span);
          if (ar->loc != n.loc)
            throw Error(ErrorKind::LocationMismatch,
                        std::string("lambda at ->^") + loc_char(n.loc) +
                            " annotated with arrow at ->^" + loc_char(ar->loc),
                        term->span);
          TypeEnv inner = env;
          inner[n.param] = ar->dom;
          // The body is typed at the lambda's own location, whatever the
          // ambient location is.
          TypePtr body = check(inner, n.loc, n.body);
          if (!type_equal(body, ar->cod))
            throw Error(ErrorKind::TypeMismatch,
                        "lambda body has type " + pretty(body) + ", annotation says " +
                            pretty(ar->cod),
                        term->span);
          return term->type;
        } else {
          TypePtr fun = check(env, at, n.fun);
          const auto* ar = std::get_if<Type::Arrow>(&fun->node);
          if (ar == nullptr)
            throw Error(ErrorKind::TypeMismatch, "applied a value of type " + pretty(fun),
                        term->span);
          if (ar->loc != n.app_loc)
            throw Error(ErrorKind::LocationMismatch,
                        std::string("application marked @") + loc_char(n.app_loc) +
                            " of a function at ->^" + loc_char(ar->loc),
                        term->span);
          TypePtr arg = check(env, at, n.arg);
          if (!type_equal(arg, ar->dom))
            throw Error(ErrorKind::TypeMismatch,
                        "expected " + pretty(ar->dom) + ", found " + pretty(arg), term->span);
          if (!type_equal(ar->cod, term->type))
            throw Error(ErrorKind::TypeMismatch, "application annotated " + pretty(term->type),
                        term->span);
          return ar->cod;
        }
      },
      term->node);
}

// ---------------------------------------------------------------------------
// Unification
// ---------------------------------------------------------------------------

namespace {

class Unifier {
 public:
  TypePtr fresh() {
    bind_.push_back(nullptr);
    return tyvar(static_cast<int>(bind_.size()) - 1);
  }

  TypePtr resolve(TypePtr t) const {
    while (const auto* v = std::get_if<Type::Var>(&t->node)) {
      if (bind_[v->id] == nullptr) break;
      t = bind_[v->id];
    }
    return t;
  }

  // unify(expected, found): error messages keep this orientation.
  void unify(const TypePtr& a0, const TypePtr& b0, SourceSpan span) {
    TypePtr a = resolve(a0);
    TypePtr b = resolve(b0);
    if (const auto* va = std::get_if<Type::Var>(&a->node)) {
      if (const auto* vb = std::get_if<Type::Var>(&b->node); vb && vb->id == va->id) return;
      occurs(va->id, b, span);
      bind_[va->id] = b;
      return;
    }
    if (const auto* vb = std::get_if<Type::Var>(&b->node)) {
      occurs(vb->id, a, span);
      bind_[vb->id] = a;
      return;
    }
    if (const auto* ba = std::get_if<Type::Base>(&a->node)) {
      const auto* bb = std::get_if<Type::Base>(&b->node);
      if (bb && ba->base == bb->base) return;
      throw Error(ErrorKind::TypeMismatch, "expected " + pretty(a) + ", found " + pretty(b),
                  span);
    }
    const auto* ra = std::get_if<Type::Arrow>(&a->node);
    const auto* rb = std::get_if<Type::Arrow>(&b->node);
    if (ra == nullptr || rb == nullptr)
      throw Error(ErrorKind::TypeMismatch, "expected " + pretty(a) + ", found " + pretty(b),
                  span);
    if (ra->loc != rb->loc)
      throw Error(ErrorKind::LocationMismatch,
                  std::string("expected ->^") + loc_char(ra->loc) + ", found ->^" +
                      loc_char(rb->loc),
                  span);
    unify(ra->dom, rb->dom, span);
    unify(ra->cod, rb->cod, span);
  }

  // Unifies shapes while tolerating arrow-location disagreement. Used by the
  // repair pass to pin both sides before eta expansion.
  void unify_erased(const TypePtr& a0, const TypePtr& b0, SourceSpan span) {
    TypePtr a = resolve(a0);
    TypePtr b = resolve(b0);
    if (const auto* va = std::get_if<Type::Var>(&a->node)) {
      if (const auto* vb = std::get_if<Type::Var>(&b->node); vb && vb->id == va->id) return;
      occurs(va->id, b, span);
      bind_[va->id] = b;
      return;
    }
    if (const auto* vb = std::get_if<Type::Var>(&b->node)) {
      occurs(vb->id, a, span);
      bind_[vb->id] = a;
      return;
    }
    if (const auto* ba = std::get_if<Type::Base>(&a->node)) {
      const auto* bb = std::get_if<Type::Base>(&b->node);
      if (bb && ba->base == bb->base) return;
      throw Error(ErrorKind::TypeMismatch, "expected " + pretty(a) + ", found " + pretty(b),
                  span);
    }
    const auto* ra = std::get_if<Type::Arrow>(&a->node);
    const auto* rb = std::get_if<Type::Arrow>(&b->node);
    if (ra == nullptr || rb == nullptr)
      throw Error(ErrorKind::TypeMismatch, "expected " + pretty(a) + ", found " + pretty(b),
                  span);
    unify_erased(ra->dom, rb->dom, span);
    unify_erased(ra->cod, rb->cod, span);
  }

  // Binds every variable reachable from t to Unit.
  void default_vars(const TypePtr& t0) {
    TypePtr t = resolve(t0);
    if (const auto* v = std::get_if<Type::Var>(&t->node)) {
      bind_[v->id] = base(BaseKind::Unit);
      return;
    }
    if (const auto* a = std::get_if<Type::Arrow>(&t->node)) {
      default_vars(a->dom);
      default_vars(a->cod);
    }
  }

  TypePtr deep_resolve(const TypePtr& t0) const {
    TypePtr t = resolve(t0);
    if (const auto* a = std::get_if<Type::Arrow>(&t->node))
      return arrow(deep_resolve(a->dom), a->loc, deep_resolve(a->cod));
    return t;
  }

  std::vector<TypePtr> snapshot() const { return bind_; }
  void restore(std::vector<TypePtr> s) { bind_ = std::move(s); }

 private:
  void occurs(int id, const TypePtr& t0, SourceSpan span) const {
    TypePtr t = resolve(t0);
    if (const auto* v = std::get_if<Type::Var>(&t->node)) {
      if (v->id == id)
        throw Error(ErrorKind::OccursCheck, "cannot construct an infinite type", span);
      return;
    }
    if (const auto* a = std::get_if<Type::Arrow>(&t->node)) {
      occurs(id, a->dom, span);
      occurs(id, a->cod, span);
    }
  }

  std::vector<TypePtr> bind_;
};

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

struct Inferencer {
  Unifier u;
  bool repair = false;
  bool changed = false;

  std::pair<TypePtr, AnnPtr> go(const TypeEnv& env, Loc at, const src::TermPtr& t) {
    using Src = src::Term;
    return std::visit(
        [&](const auto& n) -> std::pair<TypePtr, AnnPtr> {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Src::Var>) {
            auto it = env.find(n.name);
            if (it == env.end())
              throw Error(ErrorKind::UnboundVariable, "unbound variable '" + n.name + "'",
                          t->span);
            return {it->second, ann_var(n.name, it->second, t->span)};
          } else if constexpr (std::is_same_v<T, Src::Const>) {
            TypePtr ty = base(n.lit.base());
            return {ty, ann_lit(n.lit, ty, t->span)};
          } else if constexpr (std::is_same_v<T, Src::Lam>) {
            TypePtr dom = u.fresh();
            TypeEnv inner = env;
            inner[n.param] = dom;
            auto [body_ty, body] = go(inner, n.loc, n.body);
            TypePtr ty = arrow(dom, n.loc, body_ty);
            return {ty, ann_lam(n.loc, n.param, body, ty, t->span)};
          } else {
            // Beta redex: the parameter takes the argument's type before the
            // body is examined. Without this, uses of the parameter inside
            // the body would have to guess an arrow location (there are no
            // location variables to defer the choice).
            if (const auto* redex = std::get_if<Src::Lam>(&n.fun->node)) {
              auto [arg_ty, arg] = go(env, at, n.arg);
              TypeEnv inner = env;
              inner[redex->param] = arg_ty;
              auto [body_ty, body] = go(inner, redex->loc, redex->body);
              TypePtr fun_ty = arrow(arg_ty, redex->loc, body_ty);
              AnnPtr fun = ann_lam(redex->loc, redex->param, body, fun_ty, n.fun->span);
              return {body_ty, ann_app(fun, arg, redex->loc, body_ty, t->span)};
            }
            auto [fun_ty, fun] = go(env, at, n.fun);
            auto [arg_ty, arg] = go(env, at, n.arg);
            TypePtr head = u.resolve(fun_ty);
            if (const auto* ar = std::get_if<Type::Arrow>(&head->node)) {
              AnnPtr arg_fixed = unify_argument(env, at, ar->dom, arg_ty, arg);
              return {ar->cod, ann_app(fun, arg_fixed, ar->loc, ar->cod, t->span)};
            }
            if (std::holds_alternative<Type::Var>(head->node)) {
              // Undetermined function: commit to the local rule. Arrow
              // locations are never solved for, so nothing later can turn
              // this into a remote application.
              TypePtr cod = u.fresh();
              u.unify(fun_ty, arrow(arg_ty, at, cod), n.fun->span);
              return {cod, ann_app(fun, arg, at, cod, t->span)};
            }
            throw Error(ErrorKind::TypeMismatch,
                        "applied a value of type " + pretty(head), n.fun->span);
          }
        },
        t->node);
  }

  // Unifies an application argument with the expected domain. In repair mode
  // a pure location disagreement is fixed by eta-expanding the argument.
  AnnPtr unify_argument(const TypeEnv& env, Loc at, const TypePtr& dom, const TypePtr& arg_ty,
                        const AnnPtr& arg) {
    auto saved = u.snapshot();
    try {
      u.unify(dom, arg_ty, arg->span);
      return arg;
    } catch (const Error& e) {
      if (!repair || e.kind() != ErrorKind::LocationMismatch) throw;
      u.restore(std::move(saved));
      try {
        u.unify_erased(dom, arg_ty, arg->span);
      } catch (const Error&) {
        throw e;  // shapes differ too; report the original mismatch
      }
      u.default_vars(dom);
      u.default_vars(arg_ty);
      TypePtr want = u.deep_resolve(dom);
      TypePtr have = u.deep_resolve(arg_ty);
      src::TermPtr rewritten = eta_relocate(erase(arg), have, want);
      changed = true;
      auto [new_ty, new_arg] = go(env, at, rewritten);
      u.unify(dom, new_ty, arg->span);
      return new_arg;
    }
  }

  AnnPtr finalize(const AnnPtr& t) {
    u.default_vars(t->type);
    TypePtr ty = u.deep_resolve(t->type);
    return std::visit(
        [&](const auto& n) -> AnnPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, AnnTerm::Var>) {
            return ann_var(n.name, ty, t->span);
          } else if constexpr (std::is_same_v<T, AnnTerm::Const>) {
            return ann_lit(n.lit, ty, t->span);
          } else if constexpr (std::is_same_v<T, AnnTerm::Lam>) {
            return ann_lam(n.loc, n.param, finalize(n.body), ty, t->span);
          } else {
            return ann_app(finalize(n.fun), finalize(n.arg), n.app_loc, ty, t->span);
          }
        },
        t->node);
  }
};

}  // namespace

InferResult infer(const TypeEnv& env, const src::TermPtr& term, Loc at) {
  Inferencer inf;
  auto [ty, ann] = inf.go(env, at, term);
  AnnPtr final_term = inf.finalize(ann);
  return {final_term->type, final_term};
}

InferResult infer(const src::TermPtr& term, Loc at) { return infer(TypeEnv{}, term, at); }

InferResult infer_expected(const TypeEnv& env, const src::TermPtr& term, Loc at,
                           const TypePtr& expected) {
  Inferencer inf;
  auto [ty, ann] = inf.go(env, at, term);
  inf.u.unify(expected, ty, term->span);
  AnnPtr final_term = inf.finalize(ann);
  return {final_term->type, final_term};
}

RepairResult infer_with_repair(const TypeEnv& env, const src::TermPtr& term, Loc at) {
  Inferencer inf;
  inf.repair = true;
  auto [ty, ann] = inf.go(env, at, term);
  AnnPtr final_term = inf.finalize(ann);
  return {{final_term->type, final_term}, erase(final_term), inf.changed};
}

// ---------------------------------------------------------------------------
// Location-correcting eta expansion
// ---------------------------------------------------------------------------

namespace {

src::TermPtr relocate_rec(const src::TermPtr& term, const TypePtr& from, const TypePtr& to,
                          std::set<std::string>& avoid, int& counter) {
  if (type_equal(from, to)) return term;
  const auto* fa = std::get_if<Type::Arrow>(&from->node);
  const auto* ta = std::get_if<Type::Arrow>(&to->node);
  if (fa == nullptr || ta == nullptr || !erasure_equal(from, to))
    throw Error(ErrorKind::ShapeMismatch,
                "cannot relocate " + pretty(from) + " to " + pretty(to), term->span);
  std::string x;
  do {
    ++counter;
    x = counter == 1 ? "x" : "x" + std::to_string(counter);
  } while (avoid.count(x));
  avoid.insert(x);
  src::TermPtr arg = relocate_rec(src::var(x), ta->dom, fa->dom, avoid, counter);
  src::TermPtr body = relocate_rec(src::app(term, arg), fa->cod, ta->cod, avoid, counter);
  return src::lam(ta->loc, x, body);
}

}  // namespace

src::TermPtr eta_relocate(const src::TermPtr& term, const TypePtr& from, const TypePtr& to) {
  if (contains_var(from) || contains_var(to))
    throw Error(ErrorKind::ShapeMismatch, "relocation requires concrete types", term->span);
  std::set<std::string> avoid = src::all_names(term);
  int counter = 0;
  return relocate_rec(term, from, to, avoid, counter);
}

}  // namespace locrpc::ty
