#include "locrpc/types.hpp"

namespace locrpc::ty {

TypePtr base(BaseKind b) { return std::make_shared<Type>(Type{Type::Base{b}}); }
TypePtr arrow(TypePtr dom, Loc loc, TypePtr cod) {
  return std::make_shared<Type>(Type{Type::Arrow{std::move(dom), loc, std::move(cod)}});
}
TypePtr tyvar(int id) { return std::make_shared<Type>(Type{Type::Var{id}}); }

bool type_equal(const TypePtr& a, const TypePtr& b) {
  if (a->node.index() != b->node.index()) return false;
  if (const auto* ba = std::get_if<Type::Base>(&a->node))
    return ba->base == std::get<Type::Base>(b->node).base;
  if (const auto* va = std::get_if<Type::Var>(&a->node))
    return va->id == std::get<Type::Var>(b->node).id;
  const auto& ra = std::get<Type::Arrow>(a->node);
  const auto& rb = std::get<Type::Arrow>(b->node);
  return ra.loc == rb.loc && type_equal(ra.dom, rb.dom) && type_equal(ra.cod, rb.cod);
}

bool erasure_equal(const TypePtr& a, const TypePtr& b) {
  if (a->node.index() != b->node.index()) return false;
  if (const auto* ba = std::get_if<Type::Base>(&a->node))
    return ba->base == std::get<Type::Base>(b->node).base;
  if (const auto* va = std::get_if<Type::Var>(&a->node))
    return va->id == std::get<Type::Var>(b->node).id;
  const auto& ra = std::get<Type::Arrow>(a->node);
  const auto& rb = std::get<Type::Arrow>(b->node);
  return erasure_equal(ra.dom, rb.dom) && erasure_equal(ra.cod, rb.cod);
}

bool contains_var(const TypePtr& t) {
  if (std::holds_alternative<Type::Var>(t->node)) return true;
  if (const auto* a = std::get_if<Type::Arrow>(&t->node))
    return contains_var(a->dom) || contains_var(a->cod);
  return false;
}

namespace {

void render(const TypePtr& t, bool arg_pos, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Type::Base>) {
          out += to_string(n.base);
        } else if constexpr (std::is_same_v<T, Type::Var>) {
          out += "?" + std::to_string(n.id);
        } else {
          if (arg_pos) out += '(';
          render(n.dom, true, out);
          out += " ->^";
          out += loc_char(n.loc);
          out += ' ';
          render(n.cod, false, out);
          if (arg_pos) out += ')';
        }
      },
      t->node);
}

}  // namespace

std::string pretty(const TypePtr& t) {
  std::string out;
  render(t, false, out);
  return out;
}

}  // namespace locrpc::ty
