#include <benchmark/benchmark.h>

#include "globest/kernels.hpp"
#include "globest/priors.hpp"
#include "globest/sdp.hpp"
#include "globest/solver.hpp"

using namespace globest;

namespace {

const ConicProblem& flagship_primal() {
  static const ConicProblem p = [] {
    auto avg = average_choi(ChannelSpec::preset("flagship"), 2, Prior::uniform());
    return build_primal(StrategyClass::general_ico(), SdpData::from(avg)).real;
  }();
  return p;
}

void solve_with(benchmark::State& state, bool parallel) {
  SolverConfig cfg;
  cfg.parallel = parallel;
  for (auto _ : state) {
    auto r = solve_sdp(flagship_primal(), cfg);
    benchmark::DoNotOptimize(r.primal_objective);
  }
}

void BM_SolveSerial(benchmark::State& s) { solve_with(s, false); }
void BM_SolveParallel(benchmark::State& s) { solve_with(s, true); }

void moments_with(benchmark::State& state, bool parallel) {
  auto ch = ChannelSpec::preset("flagship");
  auto q = prior_quadrature(Prior::uniform(), 201);
  auto f = [&](double t) {
    CMat e = kraus_to_choi(ch, t).matrix();
    return kron(kron(e, e), e);
  };
  for (auto _ : state) {
    auto m = parallel ? kernels::moments_parallel(f, q.theta, q.weight) : kernels::moments_serial(f, q.theta, q.weight);
    benchmark::DoNotOptimize(m.m2);
  }
}

void BM_MomentsSerial(benchmark::State& s) { moments_with(s, false); }
void BM_MomentsParallel(benchmark::State& s) { moments_with(s, true); }

}  // namespace

BENCHMARK(BM_SolveSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MomentsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MomentsParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
