#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "locrpc/anf.hpp"

namespace locrpc::cs {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Values after closure conversion: lambdas are gone, replaced by closures
// over named closed functions.
struct Value {
  struct Var {
    std::string name;
  };
  struct Clo {
    std::string fun;
    std::vector<Value> env;
  };
  struct Const {
    Literal lit;
  };
  using Node = std::variant<Var, Clo, Const>;
  Node node;
};

struct Term {
  struct Val {
    Value value;
  };
  struct App {
    Value fun;
    std::vector<Value> args;
  };
  struct Req {
    Value fun;
    std::vector<Value> args;
  };
  struct Call {
    Value fun;
    std::vector<Value> args;
  };
  struct Ret {
    Value value;
  };
  struct Let {
    std::string binder;
    TermPtr bound;
    TermPtr body;
  };
  using Node = std::variant<Val, App, Req, Call, Ret, Let>;
  Node node;
};

Value vvar(std::string name);
Value vclo(std::string fun, std::vector<Value> env);
Value vconst(Literal lit);

TermPtr val(Value v);
TermPtr app(Value fun, std::vector<Value> args);
TermPtr req(Value fun, std::vector<Value> args);
TermPtr call(Value fun, std::vector<Value> args);
TermPtr ret(Value v);
TermPtr let(std::string binder, TermPtr bound, TermPtr body);

// F = z̄ λ^a x̄. m — a closed function with its free-variable list.
struct ClosedFunction {
  std::vector<std::string> free_vars;
  Loc loc;
  std::vector<std::string> params;
  TermPtr body;
};

// The separated program: one function map per location plus the client-side
// main term. Names are disjoint across the two maps.
struct FunctionStore {
  anf::Strategy strategy = anf::Strategy::Enc;
  TermPtr main;
  std::map<std::string, ClosedFunction> client;
  std::map<std::string, ClosedFunction> server;

  const ClosedFunction* find(const std::string& name, Loc loc) const;
  const ClosedFunction* find_anywhere(const std::string& name) const;
};

// Closure conversion: every lambda becomes clo(F, z̄) with F registered in
// the store of the lambda's location. Names g1..gn are assigned depth first,
// children before their enclosing lambda, left to right.
FunctionStore closure_convert(const anf::TermPtr& term, anf::Strategy strategy);

// Store invariants: disjoint names, every closure resolvable, environment
// lengths matching free-variable lists, bodies closed under fvs+params, and
// the location/ret discipline. Throws Error(MalformedStore).
void validate_store(const FunctionStore& store);

// Inlines every closure by its definition. Round-trips closure conversion up
// to alpha equivalence.
anf::TermPtr erase_closures(const FunctionStore& store);

using Subst = std::map<std::string, Value>;
TermPtr substitute(const TermPtr& t, const Subst& subst);
Value substitute(const Value& v, const Subst& subst);

bool equal(const Value& a, const Value& b);

std::string pretty(const TermPtr& t);
std::string pretty(const Value& v);

}  // namespace locrpc::cs
