#include <benchmark/benchmark.h>

#include "locrpc/compile.hpp"
#include "locrpc/eval.hpp"
#include "locrpc/generate.hpp"
#include "locrpc/infer.hpp"
#include "locrpc/machine_cs.hpp"
#include "locrpc/machine_enc.hpp"
#include "locrpc/machine_state.hpp"
#include "locrpc/store_io.hpp"
#include "locrpc/wire.hpp"

using namespace locrpc;

namespace {

constexpr long kFuel = 1'000'000;

std::vector<src::TermPtr> make_programs(int n, int depth) {
  std::vector<src::TermPtr> out;
  for (std::uint64_t seed = 1; static_cast<int>(out.size()) < n; ++seed) {
    std::mt19937_64 rng(seed);
    ty::TypePtr goal = ty::random_base(rng);
    out.push_back(ty::generate_typed(seed, depth, Loc::Client, goal));
  }
  return out;
}

const std::vector<src::TermPtr>& programs() {
  static std::vector<src::TermPtr> cache = make_programs(64, 6);
  return cache;
}

std::vector<ty::AnnPtr> annotated() {
  std::vector<ty::AnnPtr> out;
  for (const auto& p : programs()) out.push_back(ty::infer(p, Loc::Client).term);
  return out;
}

}  // namespace

static void BM_ParseAndInfer(benchmark::State& state) {
  std::vector<std::string> sources;
  for (const auto& p : programs()) sources.push_back(src::pretty(p));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& text = sources[i++ % sources.size()];
    benchmark::DoNotOptimize(ty::infer(src::parse(text), Loc::Client));
  }
}
BENCHMARK(BM_ParseAndInfer);

static void BM_Evaluate(benchmark::State& state) {
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& p = programs()[i++ % programs().size()];
    benchmark::DoNotOptimize(interp::evaluate(p, Loc::Client, kFuel));
  }
}
BENCHMARK(BM_Evaluate);

static void BM_CompileEnc(benchmark::State& state) {
  auto anns = annotated();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(compile::compile(anns[i++ % anns.size()], anf::Strategy::Enc));
  }
}
BENCHMARK(BM_CompileEnc);

static void BM_CompileState(benchmark::State& state) {
  auto anns = annotated();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(compile::compile(anns[i++ % anns.size()], anf::Strategy::State));
  }
}
BENCHMARK(BM_CompileState);

static void BM_RunEncMachine(benchmark::State& state) {
  std::vector<anf::TermPtr> compiled;
  for (const auto& a : annotated()) compiled.push_back(compile::compile(a, anf::Strategy::Enc));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(enc::run(compiled[i++ % compiled.size()], kFuel));
  }
}
BENCHMARK(BM_RunEncMachine);

static void BM_RunStateMachine(benchmark::State& state) {
  std::vector<anf::TermPtr> compiled;
  for (const auto& a : annotated())
    compiled.push_back(compile::compile(a, anf::Strategy::State));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(state::run(compiled[i++ % compiled.size()], kFuel));
  }
}
BENCHMARK(BM_RunStateMachine);

static void BM_ClosureConvertAndRun(benchmark::State& state) {
  std::vector<anf::TermPtr> compiled;
  for (const auto& a : annotated()) compiled.push_back(compile::compile(a, anf::Strategy::Enc));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& t = compiled[i++ % compiled.size()];
    cs::FunctionStore store = cs::closure_convert(t, anf::Strategy::Enc);
    benchmark::DoNotOptimize(cs::run(store, kFuel));
  }
}
BENCHMARK(BM_ClosureConvertAndRun);

static void BM_StoreJsonRoundTrip(benchmark::State& state) {
  cs::FunctionStore store = cs::closure_convert(
      compile::compile(annotated()[0], anf::Strategy::Enc), anf::Strategy::Enc);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cs::store_from_json(cs::store_to_json(store)));
  }
}
BENCHMARK(BM_StoreJsonRoundTrip);

static void BM_WireEncodeDecode(benchmark::State& state) {
  net::WireRequest msg = net::ReqMsg{
      std::nullopt, cs::vclo("g7", {}),
      {cs::vclo("g10", {cs::vconst(Literal::integer(1))}), cs::vconst(Literal::text("x"))}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(net::decode_request(net::encode(msg)));
  }
}
BENCHMARK(BM_WireEncodeDecode);

BENCHMARK_MAIN();
