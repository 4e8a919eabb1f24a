#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "helpers.hpp"

using namespace locrpc;

namespace {

anf::Value client_id() { return anf::vlam(Loc::Client, {"w"}, anf::val(anf::vvar("w"))); }

state::Stack sample_stack(int n) {
  state::Stack out;
  for (int i = 0; i < n; ++i) {
    std::string binder = "s" + std::to_string(i);
    out.push_back(state::Frame{
        binder, anf::let("d", anf::app(anf::vlam(Loc::Server, {"u"}, anf::val(anf::vvar("u"))),
                                       {anf::vvar(binder)}),
                         anf::val(anf::vvar("d")))});
  }
  return out;
}

bool stack_eq(const state::Stack& a, const state::Stack& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].binder != b[i].binder) return false;
    if (!anf::alpha_eq(a[i].body, b[i].body)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("the call/ret round trip preserves frame and stack") {
  // ServerRunning(LetK(z,Mz), D, let x = call(f)(5) in M)
  //   => ClientRunning(let z = f(5) in Mz, LetK(x,M).D)
  //   =>* ClientRunning(let z = ret(5) in Mz, LetK(x,M).D)
  //   => ServerRunning(LetK(z,Mz), D, let x = 5 in M)
  anf::TermPtr mz = anf::val(anf::vvar("z"));
  anf::TermPtr m = anf::val(anf::vvar("x"));
  anf::Value commute = anf::vlam(Loc::Client, {"a"}, anf::ret(anf::vvar("a")));
  state::Stack base = sample_stack(2);

  state::Config conf{
      anf::let("x", anf::call(commute, {anf::vconst(Literal::integer(5))}), m),
      state::Frame{"z", mz}, base};

  auto s1 = state::step(conf);
  CHECK(s1.rule == Rule::Call);
  CHECK_FALSE(s1.config.on_server());
  REQUIRE(s1.config.stack.size() == 3);
  CHECK(s1.config.stack.back().binder == "x");

  auto s2 = state::step(s1.config);  // AppC: commute(5) -> ret(5)
  CHECK(s2.rule == Rule::AppC);
  auto s3 = state::step(s2.config);  // LetC or Ret depending on shape
  state::Config at_ret = s3.config;
  state::StepResult ret_step = s3;
  while (ret_step.rule != Rule::Ret) {
    ret_step = state::step(at_ret);
    at_ret = ret_step.config;
  }
  CHECK(ret_step.rule == Rule::Ret);
  REQUIRE(at_ret.on_server());
  CHECK(at_ret.pending->binder == "z");
  CHECK(anf::alpha_eq(at_ret.pending->body, mz));
  CHECK(stack_eq(at_ret.stack, base));
  CHECK(anf::alpha_eq(at_ret.term,
                      anf::let("x", anf::val(anf::vconst(Literal::integer(5))), m)));
}

TEST_CASE("req preserves the stack and wraps the body") {
  anf::Value srv = anf::vlam(Loc::Server, {"y"}, anf::val(anf::vvar("y")));
  state::Stack base = sample_stack(1);
  state::Config conf{anf::let("x", anf::req(srv, {anf::vconst(Literal::integer(1))}),
                              anf::val(anf::vvar("x"))),
                     std::nullopt, base};
  auto s = state::step(conf);
  CHECK(s.rule == Rule::Req);
  REQUIRE(s.config.on_server());
  CHECK(stack_eq(s.config.stack, base));
  // let r = f(1) in r
  const auto& top = std::get<anf::Term::Let>(s.config.term->node);
  CHECK(std::holds_alternative<anf::Term::App>(top.bound->node));
  CHECK(std::holds_alternative<anf::Term::Val>(top.body->node));
}

TEST_CASE("ret with an empty stack is stuck") {
  state::Config conf{anf::let("x", anf::ret(anf::vconst(Literal::integer(1))),
                              anf::val(anf::vvar("x"))),
                     std::nullopt,
                     {}};
  CHECK_THROWS_AS(state::step(conf), Error);
}

TEST_CASE("run: values take zero steps; the running example agrees with the oracle") {
  auto r0 = state::run(anf::val(client_id()), 10);
  CHECK(r0.trace.empty());

  auto r = state::run(testing::compile_state(testing::kP0), testing::kFuel);
  CHECK(testing::literal_of(r.value) == Literal::integer(0));
  CHECK(state::is_call_return_balanced(r.trace));
}

TEST_CASE("run: two sequential client calls return the stack to zero") {
  auto r = state::run(testing::compile_state(testing::kTwoCalls), testing::kFuel);
  CHECK(testing::literal_of(r.value) == Literal::integer(1));
  int calls = 0, rets = 0;
  for (const auto& e : r.trace) {
    if (e.rule == Rule::Call) ++calls;
    if (e.rule == Rule::Ret) ++rets;
  }
  CHECK(calls == 2);
  CHECK(rets == 2);
  CHECK(r.trace.back().depth == 0);
  CHECK(state::is_call_return_balanced(r.trace));
}

TEST_CASE("compile: direct style on both sides") {
  compile::FreshNames names;
  // \s z. z compiles to itself (no continuation parameter).
  anf::TermPtr zid = compile::state_client(testing::annotate("\\s z. z"), names);
  CHECK(anf::alpha_eq(zid, anf::val(anf::vlam(Loc::Server, {"z"}, anf::val(anf::vvar("z"))))));

  CHECK(anf::pretty(compile::state_client(ty::ann_var("x", ty::base(BaseKind::Int)), names)) ==
        "x");

  // Remote request carries no continuation argument.
  ty::TypeEnv env{{"y", ty::base(BaseKind::Int)}};
  ty::InferResult r = ty::infer(env, src::parse("(\\s z. z) y"), Loc::Client);
  compile::FreshNames names2(src::all_names(src::parse("(\\s z. z) y")));
  anf::TermPtr out = compile::state_client(r.term, names2);
  const auto& lf = std::get<anf::Term::Let>(out->node);
  const auto& lx = std::get<anf::Term::Let>(lf.body->node);
  const auto& lr = std::get<anf::Term::Let>(lx.body->node);
  const auto& rq = std::get<anf::Term::Req>(lr.bound->node);
  CHECK(rq.args.size() == 1);
}

TEST_CASE("compile: the server-side call composes a commute function ending in ret") {
  ty::TypeEnv env{{"f", ty::arrow(ty::base(BaseKind::Int), Loc::Client, ty::base(BaseKind::Int))}};
  ty::InferResult r = ty::infer(env, src::parse("f 0"), Loc::Server);
  compile::FreshNames names(src::all_names(src::parse("f 0")));
  anf::TermPtr out = compile::state_server(r.term, names);
  // let f' = f in let x = 0 in let r = call(\c z. let y = f'(z) in ret(y))(x) in r
  const auto& lf = std::get<anf::Term::Let>(out->node);
  const auto& lx = std::get<anf::Term::Let>(lf.body->node);
  const auto& lr = std::get<anf::Term::Let>(lx.body->node);
  const auto& cl = std::get<anf::Term::Call>(lr.bound->node);
  const auto& commute = std::get<anf::Value::Lam>(cl.fun.node);
  CHECK(commute.loc == Loc::Client);
  const auto& cbody = std::get<anf::Term::Let>(commute.body->node);
  CHECK(std::holds_alternative<anf::Term::Ret>(cbody.body->node));
}

TEST_CASE("only server-side calls of client functions introduce call/ret") {
  std::function<void(const anf::TermPtr&, bool)> scan = [&](const anf::TermPtr& t,
                                                            bool in_commute) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, anf::Term::Let>) {
            scan(n.bound, in_commute);
            scan(n.body, in_commute);
          } else if constexpr (std::is_same_v<T, anf::Term::Val>) {
            if (const auto* lam = std::get_if<anf::Value::Lam>(&n.value.node))
              scan(lam->body, false);
          } else if constexpr (std::is_same_v<T, anf::Term::Ret>) {
            CHECK(in_commute);
          } else {
            if (const auto* lam = std::get_if<anf::Value::Lam>(&n.fun.node))
              scan(lam->body, std::is_same_v<T, anf::Term::Call>);
            for (const auto& a : n.args)
              if (const auto* lam = std::get_if<anf::Value::Lam>(&a.node))
                scan(lam->body, false);
          }
        },
        t->node);
  };
  for (const auto& t : testing::corpus(100, 6, false, 808))
    scan(compile::compile(ty::infer(t, Loc::Client).term, anf::Strategy::State), false);
}

TEST_CASE("balance checker: grammar cases") {
  using locrpc::Trace;
  CHECK(state::is_call_return_balanced(Trace{}));
  Trace one_call{{Rule::Call, 1}};
  CHECK_FALSE(state::is_call_return_balanced(one_call));
  Trace unmatched_ret{{Rule::Ret, 0}};
  CHECK_FALSE(state::is_call_return_balanced(unmatched_ret));
  Trace crossed{{Rule::Call, 1}, {Rule::Ret, 0}, {Rule::Ret, 0}, {Rule::Call, 1}};
  CHECK_FALSE(state::is_call_return_balanced(crossed));
  Trace nested{{Rule::Call, 1}, {Rule::Call, 2}, {Rule::Ret, 1}, {Rule::Ret, 0}};
  CHECK(state::is_call_return_balanced(nested));
}

TEST_CASE("correctness against the oracle, with balance, over the corpus") {
  for (const auto& t : testing::corpus(400, 6, true, 1002)) {
    src::TermPtr oracle = interp::evaluate(t, Loc::Client, testing::kFuel);
    auto run = state::run(compile::compile(ty::infer(t, Loc::Client).term, anf::Strategy::State),
                          testing::kFuel);
    REQUIRE(testing::literal_of(run.value) == testing::literal_of(oracle));
    REQUIRE(state::is_call_return_balanced(run.trace));
    REQUIRE(run.trace.empty() ? true : run.trace.back().depth == 0);
  }
}

TEST_CASE("frame preservation at every matched call/ret pair") {
  for (const auto& t : testing::corpus(150, 6, true, 5150)) {
    state::Config c{compile::compile(ty::infer(t, Loc::Client).term, anf::Strategy::State),
                    std::nullopt,
                    {}};
    struct Snapshot {
      state::Frame pending;
      state::Stack below;
    };
    std::vector<Snapshot> open;
    long fuel = testing::kFuel;
    while (!state::is_terminal(c)) {
      REQUIRE(fuel-- > 0);
      auto s = state::step(c);
      if (s.rule == Rule::Call) {
        REQUIRE(c.on_server());
        open.push_back({*c.pending, c.stack});
      } else if (s.rule == Rule::Ret) {
        REQUIRE_FALSE(open.empty());
        Snapshot snap = open.back();
        open.pop_back();
        REQUIRE(s.config.on_server());
        CHECK(s.config.pending->binder == snap.pending.binder);
        CHECK(anf::alpha_eq(s.config.pending->body, snap.pending.body));
        CHECK(stack_eq(s.config.stack, snap.below));
      }
      c = std::move(s.config);
    }
    CHECK(open.empty());
  }
}

TEST_CASE("composition under arbitrary initial stacks") {
  int idx = 0;
  for (const auto& t : testing::corpus(300, 5, true, 2500)) {
    state::Stack base = sample_stack(idx++ % 3);
    anf::TermPtr m = compile::compile(ty::infer(t, Loc::Client).term, anf::Strategy::State);

    // The direct run must finish on the same stack it started with.
    state::Config probe{m, std::nullopt, base};
    long fuel = testing::kFuel;
    while (!state::is_terminal(probe)) {
      REQUIRE(fuel-- > 0);
      probe = state::step(probe).config;
    }
    REQUIRE(stack_eq(probe.stack, base));
    anf::Value v = std::get<anf::Term::Val>(probe.term->node).value;

    anf::TermPtr m0 = anf::let("d", anf::app(client_id(), {anf::vvar("hole")}),
                               anf::val(anf::vvar("d")));
    state::Config c{anf::let("hole", m, m0), std::nullopt, base};
    anf::TermPtr expect = anf::let("hole", anf::val(v), m0);
    bool reached = false;
    fuel = testing::kFuel;
    while (fuel-- > 0) {
      if (!c.on_server() && anf::alpha_eq(c.term, expect) && stack_eq(c.stack, base)) {
        reached = true;
        break;
      }
      if (state::is_terminal(c)) break;
      c = state::step(c).config;
    }
    REQUIRE(reached);
  }
}

TEST_CASE("substitution commutes with the stateful compilation") {
  std::mt19937_64 rng(41);
  int done = 0;
  for (std::uint64_t seed = 8000; done < 300; ++seed) {
    ty::TypePtr tau1 = ty::random_type(rng, 1);
    ty::TypePtr tau2 = ty::random_type(rng, 1);
    Loc b = (rng() % 2) ? Loc::Client : Loc::Server;
    src::TermPtr lam_term, w_term;
    try {
      lam_term = ty::generate_typed(seed, 6, Loc::Client, ty::arrow(tau1, b, tau2));
      w_term = ty::generate_typed(seed + 1, 4, b, tau1);
    } catch (const Error&) {
      continue;
    }
    const auto* lam = std::get_if<src::Term::Lam>(&lam_term->node);
    if (lam == nullptr) continue;
    src::TermPtr w = interp::evaluate(w_term, b, testing::kFuel);

    src::TermPtr n_subst = src::substitute(lam->body, lam->param, w);
    ty::AnnPtr left_ann = ty::infer_expected({}, n_subst, b, tau2).term;
    ty::AnnPtr right_ann = ty::infer_expected({{lam->param, tau1}}, lam->body, b, tau2).term;
    ty::AnnPtr w_ann = ty::infer_expected({}, w, Loc::Client, tau1).term;

    compile::FreshNames names_w(src::all_names(w));
    anf::Subst replace;
    replace[lam->param] = compile::compile_value(w_ann, anf::Strategy::State, names_w);

    compile::FreshNames nl(src::all_names(n_subst));
    compile::FreshNames nr(src::all_names(lam->body));
    anf::TermPtr left, right;
    if (b == Loc::Client) {
      left = compile::state_client(left_ann, nl);
      right = anf::substitute(compile::state_client(right_ann, nr), replace);
    } else {
      left = compile::state_server(left_ann, nl);
      right = anf::substitute(compile::state_server(right_ann, nr), replace);
    }
    REQUIRE(anf::alpha_eq(left, right));
    ++done;
  }
  CHECK(done == 300);
}

TEST_CASE("req/reply and call/ret form a properly nested bracket language") {
  for (const auto& t : testing::corpus(200, 6, true, 9400)) {
    auto run = state::run(compile::compile(ty::infer(t, Loc::Client).term, anf::Strategy::State),
                          testing::kFuel);
    // 'R' opens a request, 'C' opens a call; they must close in LIFO order.
    std::vector<char> brackets;
    std::vector<int> req_depths;
    for (const auto& e : run.trace) {
      switch (e.rule) {
        case Rule::Req:
          brackets.push_back('R');
          req_depths.push_back(e.depth);
          break;
        case Rule::Call:
          REQUIRE_FALSE(brackets.empty());
          REQUIRE(brackets.back() == 'R');
          brackets.push_back('C');
          break;
        case Rule::Ret:
          REQUIRE_FALSE(brackets.empty());
          REQUIRE(brackets.back() == 'C');
          brackets.pop_back();
          break;
        case Rule::Reply: {
          REQUIRE_FALSE(brackets.empty());
          REQUIRE(brackets.back() == 'R');
          brackets.pop_back();
          // Stack neutrality: the stack at the reply equals the stack at
          // its matching request.
          REQUIRE(e.depth == req_depths.back());
          req_depths.pop_back();
          break;
        }
        default:
          break;
      }
    }
    REQUIRE(brackets.empty());
  }
}
