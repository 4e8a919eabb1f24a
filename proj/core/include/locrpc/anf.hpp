#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "locrpc/source.hpp"

namespace locrpc::anf {

// Which server strategy a term is compiled for. Enc keeps no server state
// between interactions (server code is CPS); State keeps a stack of pending
// server contexts and adds the ret construct.
enum class Strategy { Enc, State };
const char* to_string(Strategy s);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Value {
  struct Var {
    std::string name;
  };
  struct Lam {
    Loc loc;
    std::vector<std::string> params;  // nonempty
    TermPtr body;
  };
  struct Const {
    Literal lit;
  };
  using Node = std::variant<Var, Lam, Const>;
  Node node;
};

// A-normal form terms. App is a local application; Req transfers control
// client-to-server, Call server-to-client, Ret (state strategy only)
// client-to-server returning a value.
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
Value vlam(Loc loc, std::vector<std::string> params, TermPtr body);
Value vconst(Literal lit);

TermPtr val(Value v);
TermPtr app(Value fun, std::vector<Value> args);
TermPtr req(Value fun, std::vector<Value> args);
TermPtr call(Value fun, std::vector<Value> args);
TermPtr ret(Value v);
TermPtr let(std::string binder, TermPtr bound, TermPtr body);

using Subst = std::map<std::string, Value>;

// Parallel capture-avoiding substitution of values for free variables.
TermPtr substitute(const TermPtr& t, const Subst& subst);
Value substitute(const Value& v, const Subst& subst);

std::set<std::string> free_vars(const TermPtr& t);
std::set<std::string> free_vars(const Value& v);

// Free variables in order of first occurrence (depth first, left to right).
std::vector<std::string> free_vars_ordered(const Value& v);

bool alpha_eq(const TermPtr& a, const TermPtr& b);
bool alpha_eq(const Value& a, const Value& b);

std::string pretty(const TermPtr& t);
std::string pretty(const Value& v);

// Location discipline: req only in client-located code, call only in
// server-located code, ret only in client-located code and only under the
// state strategy. Lambda parameter lists must be nonempty. `ambient` is the
// location of the surrounding code (top-level terms are client code).
// Violations throw Error(IllformedAnnotation).
void check_well_formed(const TermPtr& t, Strategy strategy, Loc ambient = Loc::Client);

}  // namespace locrpc::anf
