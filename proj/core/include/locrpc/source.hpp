#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "locrpc/error.hpp"
#include "locrpc/span.hpp"

namespace locrpc {

// Where a piece of code runs. The ordering Client < Server is fixed and used
// for deterministic printing.
enum class Loc : std::uint8_t { Client = 0, Server = 1 };

inline Loc other(Loc a) { return a == Loc::Client ? Loc::Server : Loc::Client; }
inline char loc_char(Loc a) { return a == Loc::Client ? 'c' : 's'; }
const char* to_string(Loc a);

enum class BaseKind : std::uint8_t { Int, Str, Unit };
const char* to_string(BaseKind b);

// A constant of one of the base types.
class Literal {
 public:
  static Literal integer(std::int64_t v) { return Literal(v); }
  static Literal text(std::string v) { return Literal(std::move(v)); }
  static Literal unit() { return Literal(std::monostate{}); }

  BaseKind base() const;
  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  const std::string& as_text() const { return std::get<std::string>(v_); }

  // Concrete syntax: 7, "abc", ()
  std::string show() const;

  friend bool operator==(const Literal& a, const Literal& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Literal& a, const Literal& b) { return !(a == b); }

 private:
  template <typename T>
  explicit Literal(T v) : v_(std::move(v)) {}
  std::variant<std::int64_t, std::string, std::monostate> v_;
};

namespace src {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Source AST: values (variables, located lambdas, constants) and applications.
struct Term {
  struct Var {
    std::string name;
  };
  struct Lam {
    Loc loc;
    std::string param;
    TermPtr body;
  };
  struct App {
    TermPtr fun;
    TermPtr arg;
  };
  struct Const {
    Literal lit;
  };

  using Node = std::variant<Var, Lam, App, Const>;
  Node node;
  SourceSpan span;
};

TermPtr var(std::string name, SourceSpan span = {});
TermPtr lam(Loc loc, std::string param, TermPtr body, SourceSpan span = {});
TermPtr app(TermPtr fun, TermPtr arg, SourceSpan span = {});
TermPtr lit(Literal value, SourceSpan span = {});

inline bool is_value(const Term& t) { return !std::holds_alternative<Term::App>(t.node); }

// Parses a program in the concrete syntax:
//   term ::= '\' ('c'|'s') ident '.' term | atom+
//   atom ::= ident | integer | string | '(' ')' | '(' term ')'
// Application is left-associative; a lambda body extends as far right as
// possible; '--' starts a line comment. Throws Error(Syntax) on bad input.
TermPtr parse(std::string_view source);

// Inverse of parse up to structure: parse(pretty(t)) is structurally equal to t.
std::string pretty(const TermPtr& t);

// Equality up to consistent renaming of bound variables.
bool alpha_eq(const TermPtr& a, const TermPtr& b);

std::set<std::string> free_vars(const TermPtr& t);

// All identifiers occurring in t, bound or free. Fresh-name generators seed
// their avoid set with this.
std::set<std::string> all_names(const TermPtr& t);

// Capture-avoiding substitution of a value for a free variable.
TermPtr substitute(const TermPtr& t, const std::string& name, const TermPtr& value);

}  // namespace src
}  // namespace locrpc
