#include "locrpc/generate.hpp"

#include <string>
#include <vector>

namespace locrpc::ty {

int min_depth(const TypePtr& goal) {
  if (const auto* a = std::get_if<Type::Arrow>(&goal->node)) return 1 + min_depth(a->cod);
  return 1;
}

namespace {

std::uint64_t roll(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

Loc random_loc(std::mt19937_64& rng) { return roll(rng, 2) == 0 ? Loc::Client : Loc::Server; }

Literal random_literal(std::mt19937_64& rng, BaseKind kind) {
  switch (kind) {
    case BaseKind::Int: return Literal::integer(static_cast<std::int64_t>(roll(rng, 100)));
    case BaseKind::Str: {
      static const char* words[] = {"a", "b", "hi", "rpc", "zz"};
      return Literal::text(words[roll(rng, 5)]);
    }
    case BaseKind::Unit: return Literal::unit();
  }
  return Literal::unit();
}

struct Generator {
  std::mt19937_64 rng;
  int name_counter = 0;

  std::string fresh_param() { return "v" + std::to_string(++name_counter); }

  src::TermPtr gen(const TypeEnv& env, Loc at, const TypePtr& goal, int depth) {
    enum Alt { MkConst, MkVar, MkLam, MkAppLamFun, MkAppVarFun };
    std::vector<Alt> alts;
    std::vector<int> weights;

    const auto* arrow_goal = std::get_if<Type::Arrow>(&goal->node);
    bool deep = depth > min_depth(goal);

    if (arrow_goal == nullptr && depth >= 1) {
      alts.push_back(MkConst);
      weights.push_back(deep ? 2 : 6);
    }
    std::vector<std::string> var_hits;
    for (const auto& [name, t] : env)
      if (type_equal(t, goal)) var_hits.push_back(name);
    if (!var_hits.empty() && depth >= 1) {
      alts.push_back(MkVar);
      weights.push_back(deep ? 3 : 6);
    }
    if (arrow_goal != nullptr && depth >= 1 + min_depth(arrow_goal->cod)) {
      alts.push_back(MkLam);
      weights.push_back(6);
    }
    // An application costs one node, the lambda in function position one
    // more, and its body must still reach the goal.
    if (depth >= 2 + min_depth(goal)) {
      alts.push_back(MkAppLamFun);
      weights.push_back(8);
    }
    // Local application of an arrow-typed variable: only functions located at
    // the ambient location, so inference commits to the same (local) rule.
    std::vector<std::pair<std::string, TypePtr>> fun_vars;
    if (depth >= 2) {
      for (const auto& [name, t] : env) {
        const auto* a = std::get_if<Type::Arrow>(&t->node);
        if (a != nullptr && a->loc == at && type_equal(a->cod, goal) &&
            depth >= 1 + min_depth(a->dom))
          fun_vars.emplace_back(name, t);
      }
      if (!fun_vars.empty()) {
        alts.push_back(MkAppVarFun);
        weights.push_back(6);
      }
    }

    if (alts.empty())
      throw Error(ErrorKind::GenerationExhausted,
                  "no term of type " + pretty(goal) + " fits in depth " + std::to_string(depth));

    int total = 0;
    for (int w : weights) total += w;
    int pick = static_cast<int>(roll(rng, static_cast<std::uint64_t>(total)));
    std::size_t chosen = 0;
    for (; chosen < alts.size(); ++chosen) {
      pick -= weights[chosen];
      if (pick < 0) break;
    }

    switch (alts[chosen]) {
      case MkConst:
        return src::lit(random_literal(rng, std::get<Type::Base>(goal->node).base));
      case MkVar:
        return src::var(var_hits[roll(rng, var_hits.size())]);
      case MkLam: {
        std::string param = fresh_param();
        TypeEnv inner = env;
        inner[param] = arrow_goal->dom;
        return src::lam(arrow_goal->loc, param,
                        gen(inner, arrow_goal->loc, arrow_goal->cod, depth - 1));
      }
      case MkAppLamFun: {
        // Any arrow location is typeable here: equal to the ambient location
        // it is a local application, otherwise a request (in the client) or a
        // call (in the server).
        Loc fun_loc = random_loc(rng);
        TypePtr dom = pick_arg_type(depth - 1);
        std::string param = fresh_param();
        TypeEnv inner = env;
        inner[param] = dom;
        src::TermPtr body = gen(inner, fun_loc, goal, depth - 2);
        src::TermPtr fun = src::lam(fun_loc, param, body);
        src::TermPtr arg = gen(env, at, dom, depth - 1);
        return src::app(fun, arg);
      }
      case MkAppVarFun: {
        const auto& [name, t] = fun_vars[roll(rng, fun_vars.size())];
        const auto& a = std::get<Type::Arrow>(t->node);
        return src::app(src::var(name), gen(env, at, a.dom, depth - 1));
      }
    }
    throw Error(ErrorKind::GenerationExhausted, "unreachable");
  }

  // Argument types stay shallow so arguments remain generatable within the
  // remaining budget.
  TypePtr pick_arg_type(int budget) {
    for (;;) {
      TypePtr t = random_type(rng, 2);
      if (min_depth(t) <= budget) return t;
    }
  }
};

}  // namespace

TypePtr random_base(std::mt19937_64& rng) {
  switch (roll(rng, 3)) {
    case 0: return base(BaseKind::Int);
    case 1: return base(BaseKind::Str);
    default: return base(BaseKind::Unit);
  }
}

TypePtr random_type(std::mt19937_64& rng, int depth) {
  if (depth <= 0 || roll(rng, 3) != 0) return random_base(rng);
  return arrow(random_type(rng, depth - 1), random_loc(rng), random_type(rng, depth - 1));
}

src::TermPtr generate_typed(std::uint64_t seed, int max_depth, Loc at, const TypePtr& goal,
                            const TypeEnv& env) {
  if (max_depth < 1)
    throw Error(ErrorKind::GenerationExhausted, "max_depth must be at least 1");
  Generator g{std::mt19937_64(seed)};
  return g.gen(env, at, goal, max_depth);
}

src::TermPtr generate_typed(std::uint64_t seed, int max_depth, Loc at, const TypePtr& goal) {
  return generate_typed(seed, max_depth, at, goal, TypeEnv{});
}

}  // namespace locrpc::ty
