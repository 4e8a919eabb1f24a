#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "locrpc/client.hpp"
#include "locrpc/compile.hpp"
#include "locrpc/eval.hpp"
#include "locrpc/generate.hpp"
#include "locrpc/infer.hpp"
#include "locrpc/machine_cs.hpp"
#include "locrpc/server.hpp"
#include "locrpc/store_io.hpp"

namespace {

using namespace locrpc;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Transport, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int default_port() {
  if (const char* env = std::getenv("LOCRPC_PORT")) {
    int p = std::atoi(env);
    if (p > 0) return p;
  }
  return 7070;
}

anf::Strategy parse_strategy(const std::string& s) {
  if (s == "enc") return anf::Strategy::Enc;
  if (s == "state") return anf::Strategy::State;
  throw Error(ErrorKind::Transport, "strategy must be 'enc' or 'state'");
}

cs::FunctionStore build_store(const std::string& path, anf::Strategy strategy) {
  src::TermPtr program = src::parse(read_file(path));
  ty::InferResult inferred = ty::infer(program, Loc::Client);
  anf::TermPtr target = compile::compile(inferred.term, strategy);
  cs::FunctionStore store = cs::closure_convert(target, strategy);
  cs::validate_store(store);
  return store;
}

void print_session_stats(const cs::SessionStats& stats) {
  std::cout << "sessions=" << stats.sessions_created << " roundTrips=" << stats.round_trips
            << " maxOpen=" << stats.max_concurrent_open << " perSession=[";
  bool first = true;
  for (const auto& [sid, trips] : stats.per_session_round_trips) {
    if (!first) std::cout << ", ";
    std::cout << sid << ":" << trips;
    first = false;
  }
  std::cout << "]\n";
}

int cmd_parse(const std::string& file) {
  std::cout << src::pretty(src::parse(read_file(file))) << "\n";
  return 0;
}

int cmd_typecheck(const std::string& file, bool repair) {
  src::TermPtr program = src::parse(read_file(file));
  if (repair) {
    ty::RepairResult r = ty::infer_with_repair({}, program, Loc::Client);
    std::cout << ty::pretty(r.inferred.type) << "\n";
    if (r.changed) std::cout << "repaired: " << src::pretty(r.source) << "\n";
    std::cout << ty::pretty(r.inferred.term) << "\n";
    return 0;
  }
  try {
    ty::InferResult inferred = ty::infer(program, Loc::Client);
    std::cout << ty::pretty(inferred.type) << "\n";
    std::cout << ty::pretty(inferred.term) << "\n";
    return 0;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::LocationMismatch) {
      std::cerr << e.render(file) << "\n";
      std::cerr << "hint: an eta expansion can relocate the offending function; "
                   "rerun with --repair-locations\n";
      return 1;
    }
    throw;
  }
}

int cmd_eval(const std::string& file, long fuel, bool trace) {
  src::TermPtr program = src::parse(read_file(file));
  ty::infer(program, Loc::Client);  // reject ill-typed programs up front
  if (trace) {
    interp::TracedResult res = interp::evaluate_traced(program, Loc::Client, fuel);
    for (std::size_t i = 0; i < res.hops.size(); ++i)
      std::cout << (i + 1) << " " << to_string(res.hops[i].at) << " -> "
                << to_string(res.hops[i].fun_loc) << "\n";
    std::cout << src::pretty(res.value) << "\n";
  } else {
    std::cout << src::pretty(interp::evaluate(program, Loc::Client, fuel)) << "\n";
  }
  return 0;
}

int cmd_compile(const std::string& file, const std::string& strategy, const std::string& out_dir) {
  cs::FunctionStore store = build_store(file, parse_strategy(strategy));
  std::filesystem::create_directories(out_dir);
  std::string path = (std::filesystem::path(out_dir) / "store.json").string();
  cs::write_store_file(store, path);
  std::cout << path << "\n";
  return 0;
}

int cmd_run(const std::string& file, const std::string& strategy, long fuel, bool trace,
            bool sessions) {
  cs::FunctionStore store = build_store(file, parse_strategy(strategy));
  cs::RunResult res = cs::run(store, fuel);
  if (trace)
    std::cout << render_trace(res.trace, store.strategy == anf::Strategy::State);
  std::cout << cs::pretty(res.value) << "\n";
  if (sessions) print_session_stats(res.stats);
  return 0;
}

int cmd_serve(const std::string& store_file, const std::string& host, int port, bool debug) {
  cs::FunctionStore store = cs::read_store_file(store_file);
  net::ServerOptions options;
  options.debug_endpoints = debug;
  net::RpcServer server(std::move(store), options);
  std::cerr << "serving on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    std::cerr << "error[Transport] cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}

int cmd_client(const std::string& store_file, const std::string& endpoint, long fuel, bool log) {
  cs::FunctionStore store = cs::read_store_file(store_file);
  net::ClientRunResult res = net::run_client(store, endpoint, fuel);
  if (log)
    for (const auto& m : res.log)
      std::cout << (m.outgoing ? ">> " : "<< ") << m.body << "\n";
  std::cout << cs::pretty(res.value) << "\n";
  return 0;
}

int cmd_gen(int count, std::uint64_t seed, int depth, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (int i = 0; i < count; ++i) {
    std::mt19937_64 goal_rng(seed + static_cast<std::uint64_t>(i));
    ty::TypePtr goal = ty::random_type(goal_rng, 2);
    if (ty::min_depth(goal) > depth) goal = ty::random_base(goal_rng);
    src::TermPtr term =
        ty::generate_typed(seed + static_cast<std::uint64_t>(i), depth, Loc::Client, goal);
    ty::infer_expected({}, term, Loc::Client, goal);  // self-check
    std::ostringstream name;
    name << "gen_" << i << ".rpc";
    std::ofstream out(std::filesystem::path(out_dir) / name.str());
    out << src::pretty(term) << "\n";
    std::cout << name.str() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compiler and runtime for location-typed RPC programs"};
  app.require_subcommand(1);

  std::string file, strategy = "enc", out_dir = "out", host = "0.0.0.0";
  std::string store_file, endpoint;
  long fuel = 1'000'000;
  bool trace = false, sessions = false, repair = false, no_debug = false, log = false;
  int port = default_port();
  int count = 10, depth = 5;
  std::uint64_t seed = 1;

  CLI::App* parse_cmd = app.add_subcommand("parse", "Parse a program and print it back");
  parse_cmd->add_option("file", file)->required();

  CLI::App* type_cmd = app.add_subcommand("typecheck", "Infer the program type");
  type_cmd->add_option("file", file)->required();
  type_cmd->add_flag("--repair-locations", repair,
                     "eta-expand arguments whose arrow locations disagree");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate with the reference semantics");
  eval_cmd->add_option("file", file)->required();
  eval_cmd->add_option("--fuel", fuel);
  eval_cmd->add_flag("--trace", trace, "print beta hops");

  CLI::App* compile_cmd = app.add_subcommand("compile", "Compile to a client/server store");
  compile_cmd->add_option("file", file)->required();
  compile_cmd->add_option("--strategy", strategy, "enc or state")->required();
  compile_cmd->add_option("-o,--out", out_dir, "output directory");

  CLI::App* run_cmd = app.add_subcommand("run", "Compile and run on the local machine pair");
  run_cmd->add_option("file", file)->required();
  run_cmd->add_option("--strategy", strategy)->required();
  run_cmd->add_option("--fuel", fuel);
  run_cmd->add_flag("--trace", trace, "print one line per machine step");
  run_cmd->add_flag("--sessions", sessions, "print session statistics");

  CLI::App* serve_cmd = app.add_subcommand("serve", "Host the server half of a store");
  serve_cmd->add_option("store", store_file)->required();
  serve_cmd->add_option("--port", port);
  serve_cmd->add_option("--host", host);
  serve_cmd->add_flag("--no-debug", no_debug, "disable GET /debug/sessions");

  CLI::App* client_cmd = app.add_subcommand("client", "Run the client half against a server");
  client_cmd->add_option("store", store_file)->required();
  client_cmd->add_option("--endpoint", endpoint);
  client_cmd->add_option("--fuel", fuel);
  client_cmd->add_flag("--log", log, "print every wire message");

  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a corpus of well-typed programs");
  gen_cmd->add_option("--count", count);
  gen_cmd->add_option("--seed", seed);
  gen_cmd->add_option("--depth", depth);
  gen_cmd->add_option("-o,--out", out_dir);

  CLI11_PARSE(app, argc, argv);

  try {
    if (parse_cmd->parsed()) return cmd_parse(file);
    if (type_cmd->parsed()) return cmd_typecheck(file, repair);
    if (eval_cmd->parsed()) return cmd_eval(file, fuel, trace);
    if (compile_cmd->parsed()) return cmd_compile(file, strategy, out_dir);
    if (run_cmd->parsed()) return cmd_run(file, strategy, fuel, trace, sessions);
    if (serve_cmd->parsed()) return cmd_serve(store_file, host, port, !no_debug);
    if (client_cmd->parsed()) {
      if (endpoint.empty())
        endpoint = "http://127.0.0.1:" + std::to_string(default_port());
      return cmd_client(store_file, endpoint, fuel, log);
    }
    if (gen_cmd->parsed()) return cmd_gen(count, seed, depth, out_dir);
  } catch (const Error& e) {
    std::cerr << e.render(file.empty() ? store_file : file) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[Internal] " << e.what() << "\n";
    return 1;
  }
  return 0;
}
