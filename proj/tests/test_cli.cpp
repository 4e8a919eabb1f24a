#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"

using namespace locrpc;
namespace fs = std::filesystem;

namespace {

std::string binary() {
  const char* bin = std::getenv("LOCRPC_BIN");
  REQUIRE(bin != nullptr);
  return bin;
}

struct Cmd {
  int status;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Cmd run_cli(const std::string& args) {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() / "locrpc_cli_tests";
  fs::create_directories(dir);
  fs::path out = dir / ("out" + std::to_string(++counter));
  fs::path err = dir / ("err" + std::to_string(counter));
  std::string cmd = binary() + " " + args + " >" + out.string() + " 2>" + err.string();
  int rc = std::system(cmd.c_str());
  return {WEXITSTATUS(rc), slurp(out), slurp(err)};
}

fs::path write_program(const std::string& name, const std::string& text) {
  fs::path dir = fs::temp_directory_path() / "locrpc_cli_tests";
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream(p) << text << "\n";
  return p;
}

}  // namespace

TEST_CASE("parse, typecheck, eval on the running example") {
  fs::path p0 = write_program("p0.rpc", testing::kP0);

  Cmd parse = run_cli("parse " + p0.string());
  CHECK(parse.status == 0);
  CHECK(parse.out == std::string(testing::kP0) + "\n");

  Cmd type = run_cli("typecheck " + p0.string());
  CHECK(type.status == 0);
  CHECK(type.out.find("Int\n") == 0);
  CHECK(type.out.find("@c") != std::string::npos);
  CHECK(type.out.find("@s") != std::string::npos);

  Cmd eval = run_cli("eval " + p0.string());
  CHECK(eval.status == 0);
  CHECK(eval.out == "0\n");
}

TEST_CASE("typecheck reports location mismatches with a repair hint") {
  fs::path bad = write_program("bad.rpc", testing::kMismatch);
  Cmd type = run_cli("typecheck " + bad.string());
  CHECK(type.status == 1);
  CHECK(type.err.find("error[LocationMismatch]") != std::string::npos);
  CHECK(type.err.find("--repair-locations") != std::string::npos);

  Cmd repaired = run_cli("typecheck " + bad.string() + " --repair-locations");
  CHECK(repaired.status == 0);
  CHECK(repaired.out.find("repaired:") != std::string::npos);
}

TEST_CASE("compile writes deterministic stores with the golden shapes") {
  fs::path p0 = write_program("p0.rpc", testing::kP0);
  fs::path dir = fs::temp_directory_path() / "locrpc_cli_tests" / "stores";

  Cmd enc = run_cli("compile " + p0.string() + " --strategy enc -o " + (dir / "enc").string());
  CHECK(enc.status == 0);
  std::string first = slurp(dir / "enc" / "store.json");
  CHECK(first.find("\"strategy\": \"enc\"") != std::string::npos);

  Cmd again = run_cli("compile " + p0.string() + " --strategy enc -o " + (dir / "enc").string());
  CHECK(again.status == 0);
  CHECK(slurp(dir / "enc" / "store.json") == first);

  cs::FunctionStore store = cs::store_from_json(first);
  CHECK(store.client.size() == 2);
  CHECK(store.server.size() == 9);

  Cmd st = run_cli("compile " + p0.string() + " --strategy state -o " + (dir / "state").string());
  CHECK(st.status == 0);
  cs::FunctionStore st_store = cs::store_from_json(slurp(dir / "state" / "store.json"));
  CHECK(st_store.client.size() == 2);
  CHECK(st_store.server.size() == 3);
}

TEST_CASE("run prints the value and session statistics") {
  fs::path p0 = write_program("p0.rpc", testing::kP0);

  Cmd enc = run_cli("run " + p0.string() + " --strategy enc --sessions");
  CHECK(enc.status == 0);
  CHECK(enc.out.find("0\n") == 0);
  CHECK(enc.out.find("sessions=3") != std::string::npos);

  Cmd st = run_cli("run " + p0.string() + " --strategy state --sessions --trace");
  CHECK(st.status == 0);
  CHECK(st.out.find("sessions=1") != std::string::npos);
  CHECK(st.out.find("roundTrips=3") != std::string::npos);
  CHECK(st.out.find(" Req C depth=0") != std::string::npos);

  fs::path bad = write_program("bad.rpc", testing::kMismatch);
  Cmd ill = run_cli("run " + bad.string() + " --strategy enc");
  CHECK(ill.status == 1);
  CHECK(ill.out.empty());
}

TEST_CASE("serve and client execute a store over loopback") {
  fs::path p0 = write_program("p0.rpc", testing::kP0);
  fs::path dir = fs::temp_directory_path() / "locrpc_cli_tests" / "net";
  REQUIRE(run_cli("compile " + p0.string() + " --strategy state -o " + dir.string()).status == 0);
  std::string store = (dir / "store.json").string();

  int port = 7391;
  fs::path pidfile = dir / "server.pid";
  std::string serve_cmd = binary() + " serve " + store + " --host 127.0.0.1 --port " +
                          std::to_string(port) + " >/dev/null 2>&1 & echo $! > " +
                          pidfile.string();
  REQUIRE(std::system(serve_cmd.c_str()) == 0);
  // Wait for the server to come up.
  bool ok = false;
  for (int i = 0; i < 100 && !ok; ++i) {
    std::system("sleep 0.05");
    Cmd ping = run_cli("client " + store + " --endpoint http://127.0.0.1:" +
                       std::to_string(port));
    if (ping.status == 0 && ping.out == "0\n") ok = true;
  }
  std::system(("kill $(cat " + pidfile.string() + ") >/dev/null 2>&1").c_str());
  CHECK(ok);
}

TEST_CASE("client against a dead endpoint fails with a transport error") {
  fs::path p0 = write_program("p0.rpc", testing::kP0);
  fs::path dir = fs::temp_directory_path() / "locrpc_cli_tests" / "dead";
  REQUIRE(run_cli("compile " + p0.string() + " --strategy enc -o " + dir.string()).status == 0);
  Cmd res = run_cli("client " + (dir / "store.json").string() +
                    " --endpoint http://127.0.0.1:9");
  CHECK(res.status == 1);
  CHECK(res.err.find("error[Transport]") != std::string::npos);
}

TEST_CASE("serve rejects malformed stores at startup") {
  fs::path broken = write_program("broken.json", "{\"strategy\":\"enc\"}");
  Cmd res = run_cli("serve " + broken.string() + " --port 7392");
  CHECK(res.status == 1);
  CHECK(res.err.find("error[") != std::string::npos);
}

TEST_CASE("gen produces deterministic, well-typed corpora") {
  fs::path dir = fs::temp_directory_path() / "locrpc_cli_tests" / "gen";
  fs::remove_all(dir);
  Cmd gen = run_cli("gen --count 3 --seed 7 --depth 5 -o " + (dir / "a").string());
  CHECK(gen.status == 0);

  int files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    ++files;
    Cmd type = run_cli("typecheck " + entry.path().string());
    CHECK(type.status == 0);
  }
  CHECK(files == 3);

  REQUIRE(run_cli("gen --count 3 --seed 7 --depth 5 -o " + (dir / "b").string()).status == 0);
  for (int i = 0; i < 3; ++i) {
    std::string name = "gen_" + std::to_string(i) + ".rpc";
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  }

  // Depth 1 leaves room only for constants.
  REQUIRE(run_cli("gen --count 5 --seed 3 --depth 1 -o " + (dir / "c").string()).status == 0);
  for (const auto& entry : fs::directory_iterator(dir / "c")) {
    src::TermPtr t = src::parse(slurp(entry.path()));
    CHECK(testing::is_literal(t));
  }
}

TEST_CASE("eval and run agree on generated corpora") {
  fs::path dir = fs::temp_directory_path() / "locrpc_cli_tests" / "agree";
  fs::remove_all(dir);
  REQUIRE(run_cli("gen --count 8 --seed 21 --depth 5 -o " + dir.string()).status == 0);
  int literal_outputs = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    Cmd eval = run_cli("eval " + entry.path().string());
    REQUIRE(eval.status == 0);
    // Literal results must agree verbatim; functional results print as source
    // lambdas under eval and as closures under run, so only success is
    // comparable there (structural agreement is covered by the unit suites).
    bool literal = !eval.out.empty() && eval.out.find('\\') == std::string::npos;
    for (const char* strategy : {"enc", "state"}) {
      Cmd run = run_cli("run " + entry.path().string() + " --strategy " + strategy);
      REQUIRE(run.status == 0);
      if (literal) CHECK(run.out == eval.out);
    }
    if (literal) ++literal_outputs;
  }
  CHECK(literal_outputs > 0);
}
