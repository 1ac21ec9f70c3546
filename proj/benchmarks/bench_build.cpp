#include <benchmark/benchmark.h>

#include "socopf/matpower.hpp"
#include "socopf/network.hpp"
#include "socopf/socp_model.hpp"

static void BM_build_socp(benchmark::State& state, const char* name) {
  auto net = socopf::to_network(
      socopf::parse_matpower_file(std::string(SOCOPF_DATA_DIR) + "/" + name));
  for (auto _ : state) {
    auto built = socopf::build_socp(net);
    benchmark::DoNotOptimize(built);
  }
}
BENCHMARK_CAPTURE(BM_build_socp, case9, "case9.m");
BENCHMARK_CAPTURE(BM_build_socp, case30, "case30.m");
