#include <CLI11.hpp>

#include "commands.hpp"
#include "socopf/version.hpp"

using namespace socopf;
using namespace socopf::cli;

namespace {

void add_common(CLI::App* cmd, CommonArgs& common, std::string& units) {
  cmd->add_option("--load", common.load, "load scaling factor (1.0 = file loads)");
  cmd->add_option("--units", units, "gap output units: pu or mva")
      ->check(CLI::IsMember({"pu", "mva"}));
  cmd->add_option("--gap-tol", common.gap_tol, "AC-feasibility gap tolerance, p.u.");
  cmd->add_option("--feas-tol", common.feas_tol, "solver feasibility tolerance");
  cmd->add_option("--max-iters", common.max_iters, "solver iteration cap");
  cmd->add_flag("--verbose", common.verbose, "print solver iterations");
}

UnitMode to_units(const std::string& s) {
  return s == "mva" ? UnitMode::Mva : UnitMode::PerUnit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SOC relaxation of AC optimal power flow: solves, relaxation-gap "
               "reports, penalty tightening, and sweep tables"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  bool seed_free = false;
  app.add_flag("--seed-free", seed_free,
               "assert that no randomness is involved (reserved; always true)");

  SolveArgs solve_args;
  SweepLoadArgs sweep_load_args;
  TraArgs tra_args;
  SweepPenaltyArgs sweep_penalty_args;
  std::string solve_units = "pu", sweep_units = "pu", tra_units = "pu", pen_units = "pu";
  std::string sweep_grid_spec, pen_grid_spec;
  std::string tra_target = "reactive", solve_target = "reactive";

  CLI::App* solve_cmd = app.add_subcommand("solve", "single SOC-ACOPF solve + gap report");
  solve_cmd->add_option("--case", solve_args.case_path, "MATPOWER case file")->required();
  solve_cmd->add_option("--xi", solve_args.xi, "penalty coefficient (0 disables)");
  solve_cmd->add_option("--target", solve_target, "penalty target: reactive or both")
      ->check(CLI::IsMember({"reactive", "both"}));
  solve_cmd->add_option("--out", solve_args.out, "write solution + gap report JSON here");
  add_common(solve_cmd, solve_args.common, solve_units);

  CLI::App* sweep_cmd = app.add_subcommand("sweep-load", "load sweep over one or more cases");
  sweep_cmd->add_option("--case", sweep_load_args.case_paths, "MATPOWER case file(s)")
      ->required();
  sweep_cmd->add_option("--grid", sweep_grid_spec,
                        "comma-separated load factors (default 0.05..1.00 step 0.05)");
  sweep_cmd->add_option("--xi", sweep_load_args.xi, "penalty coefficient for every cell");
  sweep_cmd->add_option("--out", sweep_load_args.out_dir, "output directory for the two CSVs");
  sweep_cmd->add_option("--threads", sweep_load_args.threads, "worker pool size");
  add_common(sweep_cmd, sweep_load_args.common, sweep_units);

  CLI::App* tra_cmd = app.add_subcommand("tra", "heuristic penalty loop to an AC-feasible solution");
  tra_cmd->add_option("--case", tra_args.case_path, "MATPOWER case file")->required();
  tra_cmd->add_option("--xi0", tra_args.options.xi0, "initial penalty (0, 1)");
  tra_cmd->add_option("--dxi", tra_args.options.dxi, "penalty increment (0, 0.5]");
  tra_cmd->add_option("--gap-tol-po", tra_args.options.gap_tol_po, "active gap tolerance");
  tra_cmd->add_option("--gap-tol-qo", tra_args.options.gap_tol_qo, "reactive gap tolerance");
  tra_cmd->add_option("--kmax", tra_args.options.k_max, "maximum number of solves");
  tra_cmd->add_option("--target", tra_target, "penalty target: reactive or both")
      ->check(CLI::IsMember({"reactive", "both"}));
  tra_cmd->add_option("--out", tra_args.out_dir, "output directory (trace CSV + solution JSON)");
  add_common(tra_cmd, tra_args.common, tra_units);

  CLI::App* pen_cmd = app.add_subcommand("sweep-penalty", "independent solves over a xi grid");
  pen_cmd->add_option("--case", sweep_penalty_args.case_path, "MATPOWER case file")->required();
  pen_cmd->add_option("--grid", pen_grid_spec, "comma-separated xi values")->required();
  pen_cmd->add_option("--out", sweep_penalty_args.out, "CSV path (default: stdout)");
  add_common(pen_cmd, sweep_penalty_args.common, pen_units);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      solve_args.common.units = to_units(solve_units);
      solve_args.target =
          solve_target == "both" ? PenaltyTarget::ActivePlusReactiveLoss : PenaltyTarget::ReactiveLoss;
      return cmd_solve(solve_args);
    }
    if (sweep_cmd->parsed()) {
      sweep_load_args.common.units = to_units(sweep_units);
      if (!sweep_grid_spec.empty()) sweep_load_args.grid = parse_grid(sweep_grid_spec);
      return cmd_sweep_load(sweep_load_args);
    }
    if (tra_cmd->parsed()) {
      tra_args.common.units = to_units(tra_units);
      tra_args.options.target =
          tra_target == "both" ? PenaltyTarget::ActivePlusReactiveLoss : PenaltyTarget::ReactiveLoss;
      return cmd_tra(tra_args);
    }
    if (pen_cmd->parsed()) {
      sweep_penalty_args.common.units = to_units(pen_units);
      sweep_penalty_args.grid = parse_grid(pen_grid_spec);
      return cmd_sweep_penalty(sweep_penalty_args);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
