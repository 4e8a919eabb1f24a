#pragma once

#include <memory>
#include <string>
#include <variant>

#include "locrpc/source.hpp"
#include "locrpc/types.hpp"

namespace locrpc::ty {

struct AnnTerm;
using AnnPtr = std::shared_ptr<const AnnTerm>;

// A typing derivation rendered as a term: every node carries its type and
// every application carries the location of the function it applies. For an
// application at location a, app_loc == a selects the local rule; app_loc ==
// Server in the client is a request, app_loc == Client in the server is a
// call.
struct AnnTerm {
  struct Var {
    std::string name;
  };
  struct Lam {
    Loc loc;
    std::string param;
    AnnPtr body;
  };
  struct App {
    AnnPtr fun;
    AnnPtr arg;
    Loc app_loc;
  };
  struct Const {
    Literal lit;
  };

  using Node = std::variant<Var, Lam, App, Const>;
  Node node;
  TypePtr type;
  SourceSpan span;
};

AnnPtr ann_var(std::string name, TypePtr type, SourceSpan span = {});
AnnPtr ann_lam(Loc loc, std::string param, AnnPtr body, TypePtr type, SourceSpan span = {});
AnnPtr ann_app(AnnPtr fun, AnnPtr arg, Loc app_loc, TypePtr type, SourceSpan span = {});
AnnPtr ann_lit(Literal value, TypePtr type, SourceSpan span = {});

// Dropping annotations recovers the source term.
src::TermPtr erase(const AnnPtr& t);

// Extended-syntax display with @c/@s markers on applications.
std::string pretty(const AnnPtr& t);

}  // namespace locrpc::ty
