#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>

#include "locrpc/source.hpp"

namespace locrpc::ty {

struct Type;
using TypePtr = std::shared_ptr<const Type>;

// Locative types: base types and arrows annotated with the location where the
// function body runs. Var only appears during inference.
struct Type {
  struct Base {
    BaseKind base;
  };
  struct Arrow {
    TypePtr dom;
    Loc loc;
    TypePtr cod;
  };
  struct Var {
    int id;
  };

  using Node = std::variant<Base, Arrow, Var>;
  Node node;
};

TypePtr base(BaseKind b);
TypePtr arrow(TypePtr dom, Loc loc, TypePtr cod);
TypePtr tyvar(int id);

bool type_equal(const TypePtr& a, const TypePtr& b);

// Equal after erasing all location annotations.
bool erasure_equal(const TypePtr& a, const TypePtr& b);

bool contains_var(const TypePtr& t);

// Int, Str, Unit, Int ->^c Int, (Int ->^c Int) ->^s Int, ...
std::string pretty(const TypePtr& t);

// Finite map from identifiers to types; lookup of unbound names is an error at
// the use site, never a default.
using TypeEnv = std::map<std::string, TypePtr>;

}  // namespace locrpc::ty
