#include "locrpc/annotated.hpp"

namespace locrpc::ty {

AnnPtr ann_var(std::string name, TypePtr type, SourceSpan span) {
  return std::make_shared<AnnTerm>(AnnTerm{AnnTerm::Var{std::move(name)}, std::move(type), span});
}
AnnPtr ann_lam(Loc loc, std::string param, AnnPtr body, TypePtr type, SourceSpan span) {
  return std::make_shared<AnnTerm>(
      AnnTerm{AnnTerm::Lam{loc, std::move(param), std::move(body)}, std::move(type), span});
}
AnnPtr ann_app(AnnPtr fun, AnnPtr arg, Loc app_loc, TypePtr type, SourceSpan span) {
  return std::make_shared<AnnTerm>(
      AnnTerm{AnnTerm::App{std::move(fun), std::move(arg), app_loc}, std::move(type), span});
}
AnnPtr ann_lit(Literal value, TypePtr type, SourceSpan span) {
  return std::make_shared<AnnTerm>(
      AnnTerm{AnnTerm::Const{std::move(value)}, std::move(type), span});
}

src::TermPtr erase(const AnnPtr& t) {
  return std::visit(
      [&](const auto& n) -> src::TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AnnTerm::Var>) {
          return src::var(n.name, t->span);
        } else if constexpr (std::is_same_v<T, AnnTerm::Lam>) {
          return src::lam(n.loc, n.param, erase(n.body), t->span);
        } else if constexpr (std::is_same_v<T, AnnTerm::App>) {
          return src::app(erase(n.fun), erase(n.arg), t->span);
        } else {
          return src::lit(n.lit, t->span);
        }
      },
      t->node);
}

namespace {

enum class Ctx { Top, FunPos, ArgPos };

void render(const AnnPtr& t, Ctx ctx, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AnnTerm::Var>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, AnnTerm::Const>) {
          out += n.lit.show();
        } else if constexpr (std::is_same_v<T, AnnTerm::Lam>) {
          bool parens = ctx != Ctx::Top;
          if (parens) out += '(';
          out += '\\';
          out += loc_char(n.loc);
          out += ' ';
          out += n.param;
          out += ". ";
          render(n.body, Ctx::Top, out);
          if (parens) out += ')';
        } else {
          bool parens = ctx == Ctx::ArgPos;
          if (parens) out += '(';
          render(n.fun, Ctx::FunPos, out);
          out += " @";
          out += loc_char(n.app_loc);
          out += ' ';
          render(n.arg, Ctx::ArgPos, out);
          if (parens) out += ')';
        }
      },
      t->node);
}

}  // namespace

std::string pretty(const AnnPtr& t) {
  std::string out;
  render(t, Ctx::Top, out);
  return out;
}

}  // namespace locrpc::ty
