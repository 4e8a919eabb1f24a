#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

using namespace locrpc;

TEST_CASE("values evaluate to themselves anywhere") {
  src::TermPtr id = src::parse("\\c x. x");
  CHECK(src::alpha_eq(interp::evaluate(id, Loc::Server, 10), id));
  CHECK(src::alpha_eq(interp::evaluate(id, Loc::Client, 10), id));
  CHECK(interp::evaluate_traced(id, Loc::Client, 10).hops.empty());
}

TEST_CASE("the running example evaluates to 0") {
  src::TermPtr v = interp::evaluate(src::parse(testing::kP0), Loc::Client, 100);
  CHECK(testing::literal_of(v) == Literal::integer(0));
}

TEST_CASE("a single remote beta runs the body at the server") {
  auto res = interp::evaluate_traced(src::parse("(\\s x. x) 7"), Loc::Client, 10);
  CHECK(testing::literal_of(res.value) == Literal::integer(7));
  REQUIRE(res.hops.size() == 1);
  CHECK(res.hops[0].at == Loc::Client);
  CHECK(res.hops[0].fun_loc == Loc::Server);
}

TEST_CASE("local beta is a client-to-client hop") {
  auto res = interp::evaluate_traced(src::parse("(\\c x. x) 1"), Loc::Client, 10);
  REQUIRE(res.hops.size() == 1);
  CHECK(res.hops[0].at == Loc::Client);
  CHECK(res.hops[0].fun_loc == Loc::Client);
}

TEST_CASE("the running example hops client-server-client-server-server") {
  auto res = interp::evaluate_traced(src::parse(testing::kP0), Loc::Client, 100);
  REQUIRE(res.hops.size() == 4);
  auto hop = [&](int i) { return std::pair(res.hops[i].at, res.hops[i].fun_loc); };
  CHECK(hop(0) == std::pair(Loc::Client, Loc::Server));
  CHECK(hop(1) == std::pair(Loc::Server, Loc::Client));
  CHECK(hop(2) == std::pair(Loc::Client, Loc::Server));
  CHECK(hop(3) == std::pair(Loc::Server, Loc::Server));
}

TEST_CASE("errors: stuck application, free variable, fuel") {
  CHECK_THROWS_AS(interp::evaluate(src::parse("1 2"), Loc::Client, 10), Error);
  CHECK_THROWS_AS(interp::evaluate(src::parse("x"), Loc::Client, 10), Error);
  try {
    interp::evaluate(src::parse("(\\c x. x x) (\\c x. x x)"), Loc::Client, 1000);
    FAIL("expected fuel exhaustion");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FuelExhausted);
  }
}

TEST_CASE("determinism: identical values and traces across runs") {
  for (const auto& t : testing::corpus(100, 6, false, 909)) {
    auto a = interp::evaluate_traced(t, Loc::Client, testing::kFuel);
    auto b = interp::evaluate_traced(t, Loc::Client, testing::kFuel);
    REQUIRE(src::alpha_eq(a.value, b.value));
    REQUIRE(a.hops.size() == b.hops.size());
    for (std::size_t i = 0; i < a.hops.size(); ++i) {
      CHECK(a.hops[i].at == b.hops[i].at);
      CHECK(a.hops[i].fun_loc == b.hops[i].fun_loc);
    }
  }
}

TEST_CASE("termination: the generated corpus normalizes within the budget") {
  for (const auto& t : testing::corpus(300, 8, false, 4242)) {
    src::TermPtr v = interp::evaluate(t, Loc::Client, testing::kFuel);
    CHECK(src::is_value(*v));
  }
}
