#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include <memory>
#include <thread>

#include "helpers.hpp"
#include "locrpc/client.hpp"
#include "locrpc/server.hpp"
#include "locrpc/wire.hpp"

using namespace locrpc;

namespace {

struct TestServer {
  net::RpcServer server;
  std::thread thread;
  int port = 0;

  explicit TestServer(cs::FunctionStore store, int fixed_port = 0)
      : server(std::move(store)) {
    if (fixed_port == 0) {
      port = server.bind_any("127.0.0.1");
      REQUIRE(port > 0);
      thread = std::thread([this] { server.serve_bound(); });
    } else {
      port = fixed_port;
      thread = std::thread([this] { server.listen("127.0.0.1", port); });
    }
    REQUIRE(server.wait_ready());
  }

  ~TestServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port); }
};

bool events_equal(const std::vector<cs::SessionEvent>& a,
                  const std::vector<cs::SessionEvent>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("wire codec: canonical bytes round-trip") {
  net::WireRequest req = net::ReqMsg{
      std::nullopt, cs::vclo("g7", {}), {cs::vclo("g10", {}), cs::vconst(Literal::integer(3))}};
  std::string bytes = net::encode(req);
  net::WireRequest back = net::decode_request(bytes);
  CHECK(net::encode(back) == bytes);

  net::WireResponse resp = net::CallMsg{std::string("1"),
                                        cs::vclo("g2", {cs::vconst(Literal::text("hi"))}),
                                        {cs::vconst(Literal::unit())}};
  CHECK(net::encode(net::decode_response(net::encode(resp))) == net::encode(resp));
}

TEST_CASE("wire codec: generated messages survive a round trip") {
  std::mt19937_64 rng(99);
  auto rand_value = [&](auto&& self, int depth) -> cs::Value {
    switch (rng() % (depth > 0 ? 3 : 2)) {
      case 0: return cs::vconst(Literal::integer(static_cast<std::int64_t>(rng() % 1000)));
      case 1: return cs::vconst(Literal::text("s" + std::to_string(rng() % 10)));
      default: {
        std::size_t width = rng() % 3;
        std::vector<cs::Value> env;
        for (std::size_t i = 0; i < width; ++i) env.push_back(self(self, depth - 1));
        return cs::vclo("g" + std::to_string(rng() % 20), std::move(env));
      }
    }
  };
  for (int i = 0; i < 500; ++i) {
    cs::Value v = rand_value(rand_value, 3);
    net::WireRequest req =
        (rng() % 2) ? net::WireRequest(net::ReqMsg{std::nullopt, v, {v}})
                    : net::WireRequest(net::RetMsg{std::to_string(rng() % 5), v});
    net::WireRequest back = net::decode_request(net::encode(req));
    CHECK(net::encode(back) == net::encode(req));
    net::WireResponse resp = (rng() % 2)
                                 ? net::WireResponse(net::ReplyMsg{std::nullopt, v})
                                 : net::WireResponse(net::CallMsg{std::string("2"), v, {}});
    CHECK(net::encode(net::decode_response(net::encode(resp))) == net::encode(resp));
  }
}

TEST_CASE("wire codec: truncation and open values are rejected") {
  net::WireRequest req = net::ReqMsg{std::nullopt, cs::vclo("g1", {}), {}};
  std::string bytes = net::encode(req);
  for (std::size_t cut = 1; cut < bytes.size(); cut += 7) {
    try {
      net::decode_request(bytes.substr(0, cut));
      FAIL("expected a decode error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DecodeError);
    }
  }
  CHECK_THROWS_AS(net::encode(net::WireRequest(net::ReqMsg{std::nullopt, cs::vvar("x"), {}})),
                  Error);
  CHECK_THROWS_AS(net::decode_request(R"({"kind":"req","fun":{"t":"var","name":"x"},"args":[]})"),
                  Error);
}

TEST_CASE("the first enc server phase answers the commute call") {
  cs::FunctionStore store = testing::store_for(testing::kP0, anf::Strategy::Enc);
  TestServer ts(store);
  httplib::Client http(ts.endpoint());

  // main's request: req clo(g7)(clo(g10), clo(g11))
  const auto& lf = std::get<cs::Term::Let>(store.main->node);
  const auto& lx = std::get<cs::Term::Let>(lf.body->node);
  const auto& lr = std::get<cs::Term::Let>(lx.body->node);
  const auto& rq = std::get<cs::Term::Req>(lr.bound->node);
  // Resolve the two let-bound values by hand (they are closures).
  cs::Value fun = std::get<cs::Term::Val>(lf.bound->node).value;
  cs::Value arg0 = std::get<cs::Term::Val>(lx.bound->node).value;
  net::WireRequest req = net::ReqMsg{std::nullopt, fun, {arg0, rq.args[1]}};

  auto res = http.Post("/rpc", net::encode(req), "application/json");
  REQUIRE(res);
  REQUIRE(res->status == 200);
  net::WireResponse resp = net::decode_response(res->body);
  const auto* call = std::get_if<net::CallMsg>(&resp);
  REQUIRE(call != nullptr);
  CHECK_FALSE(call->session.has_value());
  const auto& commute = std::get<cs::Value::Clo>(call->fun.node);
  CHECK(store.find(commute.fun, Loc::Client) != nullptr);
  REQUIRE(call->args.size() == 1);
  CHECK(testing::literal_of(call->args[0]) == Literal::integer(0));
  CHECK(ts.server.open_sessions() == 0);
}

TEST_CASE("the first state request opens a session iff the response is a call") {
  cs::FunctionStore store = testing::store_for(testing::kP0, anf::Strategy::State);
  TestServer ts(store);
  httplib::Client http(ts.endpoint());

  const auto& lf = std::get<cs::Term::Let>(store.main->node);
  const auto& lx = std::get<cs::Term::Let>(lf.body->node);
  cs::Value fun = std::get<cs::Term::Val>(lf.bound->node).value;
  cs::Value arg = std::get<cs::Term::Val>(lx.bound->node).value;

  auto res = http.Post("/rpc", net::encode(net::WireRequest(net::ReqMsg{std::nullopt, fun, {arg}})),
                       "application/json");
  REQUIRE(res);
  REQUIRE(res->status == 200);
  net::WireResponse resp = net::decode_response(res->body);
  const auto* call = std::get_if<net::CallMsg>(&resp);
  REQUIRE(call != nullptr);
  REQUIRE(call->session.has_value());
  CHECK(*call->session == "1");
  CHECK(ts.server.open_sessions() == 1);

  // Unknown sessions are rejected with 409.
  auto bad = http.Post(
      "/rpc",
      net::encode(net::WireRequest(net::RetMsg{"77", cs::vconst(Literal::integer(1))})),
      "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 409);

  // Returning the call's value drives the program to completion.
  auto fin = http.Post(
      "/rpc",
      net::encode(net::WireRequest(net::RetMsg{*call->session, cs::vconst(Literal::integer(0))})),
      "application/json");
  REQUIRE(fin);
  REQUIRE(fin->status == 200);
}

TEST_CASE("protocol violations map to statuses") {
  TestServer ts(testing::store_for(testing::kP0, anf::Strategy::Enc));
  httplib::Client http(ts.endpoint());

  auto bad_json = http.Post("/rpc", "{oops", "application/json");
  REQUIRE(bad_json);
  CHECK(bad_json->status == 400);

  auto ret_under_enc = http.Post(
      "/rpc", net::encode(net::WireRequest(net::RetMsg{"1", cs::vconst(Literal::unit())})),
      "application/json");
  REQUIRE(ret_under_enc);
  CHECK(ret_under_enc->status == 400);

  auto unknown = http.Post(
      "/rpc",
      net::encode(net::WireRequest(net::ReqMsg{std::nullopt, cs::vclo("g999", {}), {}})),
      "application/json");
  REQUIRE(unknown);
  CHECK(unknown->status == 404);
}

TEST_CASE("distributed equals local for both strategies") {
  for (anf::Strategy strategy : {anf::Strategy::Enc, anf::Strategy::State}) {
    for (const auto& t : testing::corpus(20, 5, true, strategy == anf::Strategy::Enc ? 71 : 72)) {
      cs::FunctionStore store =
          cs::closure_convert(compile::compile(ty::infer(t, Loc::Client).term, strategy),
                              strategy);
      auto local = cs::run(store, testing::kFuel);
      TestServer ts(store);
      auto remote = net::run_client(store, ts.endpoint(), testing::kFuel);
      REQUIRE(testing::literal_of(remote.value) == testing::literal_of(local.value));
      REQUIRE(remote.round_trips == local.stats.round_trips);
      REQUIRE(events_equal(remote.events, local.events));
      REQUIRE(ts.server.open_sessions() == 0);
    }
  }
}

TEST_CASE("enc servers stay empty after every exchange") {
  cs::FunctionStore store = testing::store_for(testing::kP0, anf::Strategy::Enc);
  TestServer ts(store);
  int checked = 0;
  auto res = net::run_client(store, ts.endpoint(), testing::kFuel, [&](int) {
    CHECK(ts.server.open_sessions() == 0);
    ++checked;
  });
  CHECK(checked == 3);
  CHECK(ts.server.open_sessions() == 0);
  CHECK(testing::literal_of(res.value) == Literal::integer(0));
}

TEST_CASE("crash and restart: enc survives, state loses its session") {
  cs::FunctionStore enc_store = testing::store_for(testing::kP0, anf::Strategy::Enc);

  auto current = std::make_unique<TestServer>(enc_store);
  int port = current->port;
  auto restart = [&](const cs::FunctionStore& store) {
    return [&, store](int trip) {
      if (trip == 0) return;  // restart between round trips only
      current.reset();
      current = std::make_unique<TestServer>(store, port);
    };
  };

  auto res = net::run_client(enc_store, current->endpoint(), testing::kFuel, restart(enc_store));
  CHECK(testing::literal_of(res.value) == Literal::integer(0));
  CHECK(res.round_trips == 3);

  cs::FunctionStore st_store = testing::store_for(testing::kP0, anf::Strategy::State);
  current.reset();
  current = std::make_unique<TestServer>(st_store, port);
  try {
    net::run_client(st_store, current->endpoint(), testing::kFuel, restart(st_store));
    FAIL("expected the restarted server to reject the session");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownSession);
    CHECK(e.status() == 409);
  }
  current.reset();
}

TEST_CASE("one stateful server handles concurrent clients with separate sessions") {
  cs::FunctionStore store = testing::store_for(testing::kP0, anf::Strategy::State);
  TestServer ts(store);
  std::vector<std::thread> clients;
  std::vector<std::string> failures(4);
  for (int i = 0; i < 4; ++i) {
    clients.emplace_back([&, i] {
      try {
        for (int round = 0; round < 5; ++round) {
          auto res = net::run_client(store, ts.endpoint(), testing::kFuel);
          if (!(testing::literal_of(res.value) == Literal::integer(0)))
            failures[i] = "wrong value";
        }
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    });
  }
  for (auto& c : clients) c.join();
  for (const auto& f : failures) CHECK(f.empty());
  CHECK(ts.server.open_sessions() == 0);
}

TEST_CASE("a value main makes no network traffic") {
  cs::FunctionStore store;
  store.strategy = anf::Strategy::Enc;
  store.main = cs::val(cs::vconst(Literal::integer(5)));
  auto res = net::run_client(store, "http://127.0.0.1:1", 100);  // nothing is ever sent
  CHECK(testing::literal_of(res.value) == Literal::integer(5));
  CHECK(res.log.empty());
}

TEST_CASE("unreachable endpoints raise a transport error") {
  cs::FunctionStore store = testing::store_for(testing::kP0, anf::Strategy::Enc);
  try {
    net::run_client(store, "http://127.0.0.1:9", 1000);
    FAIL("expected transport failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Transport);
  }
}
