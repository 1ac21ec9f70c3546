#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"

using namespace socopf;
using namespace socopf::cli;
namespace fs = std::filesystem;

namespace {

std::string fixture(const char* name) {
  return std::string(SOCOPF_DATA_DIR) + "/" + name;
}

fs::path temp_dir(const char* tag) {
  fs::path dir = fs::temp_directory_path() / (std::string("socopf_test_") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("parse_grid") {
  CHECK(parse_grid("0.05,0.5,1") == std::vector<double>{0.05, 0.5, 1.0});
  CHECK(parse_grid("") == std::vector<double>{});
  CHECK_THROWS_AS(parse_grid("0.1,abc"), std::invalid_argument);
}

TEST_CASE("cmd_solve writes a JSON report and exits 0") {
  fs::path dir = temp_dir("solve");
  SolveArgs args;
  args.case_path = fixture("case9.m");
  args.out = (dir / "out.json").string();
  CHECK(cmd_solve(args) == kExitOk);
  auto j = nlohmann::json::parse(slurp(dir / "out.json"));
  CHECK(j["solution"]["objective"].get<double>() > 1000.0);
  CHECK(j["gap_report"]["gap_po_max"].get<double>() <= 1e-6);
  CHECK(j["solver"]["status"] == "Optimal");
}

TEST_CASE("cmd_solve with a penalty reports both objectives") {
  fs::path dir = temp_dir("solve_pen");
  SolveArgs args;
  args.case_path = fixture("case9.m");
  args.xi = 0.3;
  args.out = (dir / "out.json").string();
  CHECK(cmd_solve(args) == kExitOk);
  auto j = nlohmann::json::parse(slurp(dir / "out.json"));
  const double f = j["solution"]["objective"].get<double>();
  const double fm = j["solution"]["penalized_objective"].get<double>();
  CHECK(fm > f);
  CHECK(j["solution"]["xi"].get<double>() == 0.3);
}

TEST_CASE("cmd_solve rejects a non-positive load factor") {
  SolveArgs args;
  args.case_path = fixture("case9.m");
  args.common.load = -1.0;
  CHECK(cmd_solve(args) == kExitUsage);
}

TEST_CASE("cmd_solve rejects unreadable files") {
  SolveArgs args;
  args.case_path = "/nonexistent/case.m";
  CHECK(cmd_solve(args) == kExitUsage);
}

TEST_CASE("cmd_sweep_load emits two tables with the requested shape") {
  fs::path dir = temp_dir("sweep");
  SweepLoadArgs args;
  args.case_paths = {fixture("case9.m"), fixture("case14.m")};
  args.grid = {0.5, 1.0};
  args.out_dir = dir.string();
  CHECK(cmd_sweep_load(args) == kExitOk);
  const std::string active = slurp(dir / "gap_po.csv");
  const std::string reactive = slurp(dir / "gap_qo.csv");
  CHECK(count_lines(active) == 2 + 2);
  CHECK(active.find("load_pct,case9,case14") != std::string::npos);
  CHECK(reactive.find("# metric=gap_qo_max") == 0);
}

TEST_CASE("cmd_sweep_load wants at least one case") {
  SweepLoadArgs args;
  CHECK(cmd_sweep_load(args) == kExitUsage);
}

TEST_CASE("cmd_sweep_load rejects factors outside (0, 10]") {
  SweepLoadArgs args;
  args.case_paths = {fixture("case9.m")};
  args.grid = {0.0};
  CHECK(cmd_sweep_load(args) == kExitUsage);
  args.grid = {11.0};
  CHECK(cmd_sweep_load(args) == kExitUsage);
}

TEST_CASE("cmd_tra traces the penalty loop") {
  fs::path dir = temp_dir("tra");
  TraArgs args;
  args.case_path = fixture("case9.m");
  args.out_dir = dir.string();
  CHECK(cmd_tra(args) == kExitOk);
  const std::string trace = slurp(dir / "tra_trace.csv");
  CHECK(trace.find("k,xi,gap_po_max,gap_qo_max,objective,penalized_objective") !=
        std::string::npos);
  auto j = nlohmann::json::parse(slurp(dir / "solution.json"));
  CHECK(j["converged"].get<bool>());
}

TEST_CASE("cmd_tra exit 4 when the cap stops the loop early") {
  fs::path dir = temp_dir("tra_cap");
  TraArgs args;
  args.case_path = fixture("case9.m");
  args.options.xi0 = 1e-4;
  args.options.k_max = 1;
  args.out_dir = dir.string();
  CHECK(cmd_tra(args) == kExitNotConverged);
}

TEST_CASE("cmd_tra validates options") {
  TraArgs args;
  args.case_path = fixture("case9.m");
  args.options.xi0 = 2.0;
  CHECK(cmd_tra(args) == kExitUsage);
}

TEST_CASE("cmd_sweep_penalty emits the xi series") {
  fs::path dir = temp_dir("pen");
  SweepPenaltyArgs args;
  args.case_path = fixture("case9.m");
  args.grid = {0.0, 0.3};
  args.out = (dir / "series.csv").string();
  CHECK(cmd_sweep_penalty(args) == kExitOk);
  const std::string csv = slurp(dir / "series.csv");
  CHECK(csv.find("xi,gap_po_max,gap_qo_max,objective") != std::string::npos);
  CHECK(count_lines(csv) == 1 + 1 + 2);
}

TEST_CASE("cmd_sweep_penalty with an empty grid is a usage error") {
  SweepPenaltyArgs args;
  args.case_path = fixture("case9.m");
  CHECK(cmd_sweep_penalty(args) == kExitUsage);
}
