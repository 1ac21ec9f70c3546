#include <benchmark/benchmark.h>

#include "socopf/matpower.hpp"
#include "socopf/network.hpp"

static void BM_parse_case9(benchmark::State& state) {
  const std::string path = std::string(SOCOPF_DATA_DIR) + "/case9.m";
  for (auto _ : state) {
    auto raw = socopf::parse_matpower_file(path);
    benchmark::DoNotOptimize(raw);
  }
}
BENCHMARK(BM_parse_case9);

static void BM_to_network_case9(benchmark::State& state) {
  auto raw = socopf::parse_matpower_file(std::string(SOCOPF_DATA_DIR) + "/case9.m");
  for (auto _ : state) {
    auto net = socopf::to_network(raw);
    benchmark::DoNotOptimize(net);
  }
}
BENCHMARK(BM_to_network_case9);
