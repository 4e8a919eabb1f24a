#pragma once

#include <set>
#include <string>

#include "locrpc/anf.hpp"
#include "locrpc/annotated.hpp"

namespace locrpc::compile {

// Deterministic fresh names: one counter per compilation unit with
// role-based stems (f, x, r, k, y, z); names already used in the source are
// skipped so substitution never captures.
class FreshNames {
 public:
  explicit FreshNames(std::set<std::string> used = {}) : used_(std::move(used)) {}
  std::string next(const std::string& stem);

 private:
  std::set<std::string> used_;
  int counter_ = 0;
};

// Compilation into the state-encoding calculus: direct style for the client,
// CPS for the server. Server lambdas take an extra continuation parameter;
// remote applications pass the identity continuation. The input must be a
// typing derivation produced at the matching ambient location.
anf::TermPtr enc_client(const ty::AnnPtr& term, FreshNames& names);
anf::TermPtr enc_server(const ty::AnnPtr& term, const anf::Value& k, FreshNames& names);

// Compilation into the stateful calculus: direct style on both sides. Only
// server-side calls of client functions introduce call/ret, via the commute
// function.
anf::TermPtr state_client(const ty::AnnPtr& term, FreshNames& names);
anf::TermPtr state_server(const ty::AnnPtr& term, FreshNames& names);

// Whole-program entry points (top location is the client).
anf::TermPtr compile(const ty::AnnPtr& program, anf::Strategy strategy);

// Value compilation: values compile the same way on either side, and
// substituting compiled values commutes with compiling substituted terms.
anf::Value compile_value(const ty::AnnPtr& value, anf::Strategy strategy, FreshNames& names);

}  // namespace locrpc::compile
