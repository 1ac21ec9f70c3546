#pragma once

#include <string>
#include <vector>

#include "socopf/solver.hpp"
#include "socopf/sweep.hpp"
#include "socopf/tra.hpp"

namespace socopf::cli {

// exit codes shared by every subcommand
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;     // bad arguments, unreadable or malformed case
inline constexpr int kExitSolve = 3;     // solver returned a non-Optimal status
inline constexpr int kExitNotConverged = 4;  // TRA hit the iteration cap

struct CommonArgs {
  double load = 1.0;
  UnitMode units = UnitMode::PerUnit;
  double gap_tol = 1e-6;
  double feas_tol = 1e-8;
  int max_iters = 200;
  bool verbose = false;
};

struct SolveArgs {
  std::string case_path;
  double xi = 0.0;
  PenaltyTarget target = PenaltyTarget::ReactiveLoss;
  std::string out;  // JSON path; empty writes nothing
  CommonArgs common;
};

struct SweepLoadArgs {
  std::vector<std::string> case_paths;
  std::vector<double> grid;  // load factors; empty selects the default grid
  double xi = 0.0;
  std::string out_dir = ".";
  int threads = 1;
  CommonArgs common;
};

struct TraArgs {
  std::string case_path;
  TraOptions options;
  std::string out_dir = ".";
  CommonArgs common;
};

struct SweepPenaltyArgs {
  std::string case_path;
  std::vector<double> grid;  // xi values
  std::string out;  // CSV path; empty prints to stdout
  CommonArgs common;
};

int cmd_solve(const SolveArgs& args);
int cmd_sweep_load(const SweepLoadArgs& args);
int cmd_tra(const TraArgs& args);
int cmd_sweep_penalty(const SweepPenaltyArgs& args);

// "0.05,0.5,1" -> {0.05, 0.5, 1.0}; throws std::invalid_argument on junk
std::vector<double> parse_grid(const std::string& spec);

}  // namespace socopf::cli
