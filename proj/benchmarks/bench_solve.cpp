#include <benchmark/benchmark.h>

#include "socopf/matpower.hpp"
#include "socopf/network.hpp"
#include "socopf/socp_model.hpp"
#include "socopf/solver.hpp"

static void BM_solve(benchmark::State& state, const char* name) {
  auto net = socopf::to_network(
      socopf::parse_matpower_file(std::string(SOCOPF_DATA_DIR) + "/" + name));
  auto [prog, map] = socopf::build_socp(net);
  for (auto _ : state) {
    auto res = socopf::solve(prog);
    benchmark::DoNotOptimize(res);
    if (res.status != socopf::SolveStatus::Optimal) state.SkipWithError("not optimal");
  }
}
BENCHMARK_CAPTURE(BM_solve, case9, "case9.m")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_solve, case30, "case30.m")->Unit(benchmark::kMillisecond);
