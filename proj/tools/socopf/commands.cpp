#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "socopf/feasibility.hpp"
#include "socopf/matpower.hpp"
#include "socopf/socp_model.hpp"
#include "socopf/version.hpp"

namespace socopf::cli {
namespace {

Network load_case(const std::string& path, double load_factor) {
  Network net = to_network(parse_matpower_file(path));
  if (load_factor != 1.0) net = scale_loads(net, load_factor);
  return net;
}

SolverOptions solver_options(const CommonArgs& common) {
  SolverOptions opts;
  opts.feas_tol = common.feas_tol;
  opts.max_iters = common.max_iters;
  opts.verbose = common.verbose;
  return opts;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

nlohmann::json solution_json(const OpfSolution& sol, const Network& net, double xi,
                             double penalized) {
  nlohmann::json j;
  j["case"] = net.name;
  j["objective"] = sol.objective;
  j["penalized_objective"] = penalized;
  j["xi"] = xi;
  j["voltage"] = std::vector<double>(sol.voltage.begin(), sol.voltage.end());
  j["theta"] = std::vector<double>(sol.theta.begin(), sol.theta.end());
  j["gen_p"] = std::vector<double>(sol.gen_p.begin(), sol.gen_p.end());
  j["gen_q"] = std::vector<double>(sol.gen_q.begin(), sol.gen_q.end());
  j["flow_p_send"] = std::vector<double>(sol.flow_p_send.begin(), sol.flow_p_send.end());
  j["flow_q_send"] = std::vector<double>(sol.flow_q_send.begin(), sol.flow_q_send.end());
  j["flow_p_recv"] = std::vector<double>(sol.flow_p_recv.begin(), sol.flow_p_recv.end());
  j["flow_q_recv"] = std::vector<double>(sol.flow_q_recv.begin(), sol.flow_q_recv.end());
  j["loss_p"] = std::vector<double>(sol.loss_p.begin(), sol.loss_p.end());
  j["loss_q"] = std::vector<double>(sol.loss_q.begin(), sol.loss_q.end());
  return j;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> values;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    size_t used = 0;
    double v = std::stod(token, &used);
    while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used])))
      ++used;
    if (used != token.size()) throw std::invalid_argument("bad grid entry: " + token);
    values.push_back(v);
  }
  return values;
}

int cmd_solve(const SolveArgs& args) {
  Network net;
  try {
    if (!(args.common.load > 0.0)) throw NonPositiveFactor("load factor must be positive");
    if (args.xi < 0.0) throw std::invalid_argument("xi must be nonnegative");
    net = load_case(args.case_path, args.common.load);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }

  PenaltySpec penalty{args.xi, args.target};
  auto [prog, map] = build_socp(net, penalty);
  SolverResult res = solve(prog, solver_options(args.common));
  if (res.status != SolveStatus::Optimal) {
    std::fprintf(stderr, "error: solve returned %s\n", to_string(res.status).c_str());
    return kExitSolve;
  }
  OpfSolution sol = extract_solution(res.x, map, net);
  GapReport report = line_gaps(sol, net, args.common.gap_tol);
  const double scale = args.common.units == UnitMode::Mva ? net.base_mva : 1.0;
  const double penalized = sol.objective + penalty_term(sol, penalty);

  std::printf("%s: objective %.6f $/h  gap_po_max %.3E  gap_qo_max %.3E  (%s)\n",
              net.name.c_str(), sol.objective, report.gap_po_max * scale,
              report.gap_qo_max * scale, report.feasible ? "feasible" : "loose");
  if (args.xi > 0.0) std::printf("penalized objective %.6f $/h (xi=%g)\n", penalized, args.xi);

  if (!args.out.empty()) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["units"] = args.common.units == UnitMode::Mva ? "mva" : "pu";
    j["load_factor"] = args.common.load;
    j["solution"] = solution_json(sol, net, args.xi, penalized);
    j["gap_report"] = nlohmann::json::parse(gap_report_json(report, scale));
    j["solver"] = {{"status", to_string(res.status)},
                   {"iterations", res.iterations},
                   {"seconds", res.solve_seconds}};
    if (!write_file(args.out, j.dump(2) + "\n")) {
      std::fprintf(stderr, "error: cannot write %s\n", args.out.c_str());
      return kExitUsage;
    }
  }
  return kExitOk;
}

int cmd_sweep_load(const SweepLoadArgs& args) {
  if (args.case_paths.empty()) {
    std::fprintf(stderr, "error: sweep-load needs at least one --case\n");
    return kExitUsage;
  }
  std::vector<double> grid = args.grid.empty() ? default_load_grid() : args.grid;
  for (double f : grid) {
    if (!(f > 0.0 && f <= 10.0)) {
      std::fprintf(stderr, "error: load factors must lie in (0, 10]\n");
      return kExitUsage;
    }
  }
  std::vector<Network> cases;
  try {
    for (const auto& path : args.case_paths) cases.push_back(load_case(path, 1.0));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }

  LoadSweepResult result =
      sweep_load(cases, grid, args.xi, solver_options(args.common), args.threads);
  const double scale = args.common.units == UnitMode::Mva ? 1.0 : 0.0;  // per-case below
  for (SweepTable* table : {&result.active, &result.reactive}) {
    table->gap_tol = args.common.gap_tol;
    table->units = args.common.units;
    if (args.common.units == UnitMode::Mva) {
      for (size_t r = 0; r < table->cells.size(); ++r)
        for (size_t c = 0; c < table->cells[r].size(); ++c)
          if (table->cells[r][c]) *table->cells[r][c] *= cases[c].base_mva;
    }
  }
  (void)scale;

  std::error_code ec;
  std::filesystem::create_directories(args.out_dir, ec);
  const std::string active_path = args.out_dir + "/gap_po.csv";
  const std::string reactive_path = args.out_dir + "/gap_qo.csv";
  if (!write_file(active_path, sweep_table_csv(result.active)) ||
      !write_file(reactive_path, sweep_table_csv(result.reactive))) {
    std::fprintf(stderr, "error: cannot write tables under %s\n", args.out_dir.c_str());
    return kExitUsage;
  }
  std::printf("wrote %s and %s (%d/%d solves ok)\n", active_path.c_str(),
              reactive_path.c_str(), result.active.solves_attempted - result.active.solves_failed,
              result.active.solves_attempted);
  return result.active.solves_failed == result.active.solves_attempted ? kExitSolve : kExitOk;
}

int cmd_tra(const TraArgs& args) {
  Network net;
  try {
    if (!(args.common.load > 0.0)) throw NonPositiveFactor("load factor must be positive");
    args.options.validate();
    net = load_case(args.case_path, args.common.load);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }

  TraResult result;
  try {
    result = run_tra(net, args.options, solver_options(args.common));
  } catch (const SolveFailed& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolve;
  }

  std::ostringstream csv;
  csv << "# case=" << net.name << " xi0=" << args.options.xi0 << " dxi=" << args.options.dxi
      << " gap_tol_po=" << args.options.gap_tol_po << " gap_tol_qo=" << args.options.gap_tol_qo
      << " kmax=" << args.options.k_max << " version=" << kVersion << "\n";
  csv << "k,xi,gap_po_max,gap_qo_max,objective,penalized_objective\n";
  for (const auto& it : result.iterates) {
    char line[200];
    std::snprintf(line, sizeof(line), "%d,%g,%.2E,%.2E,%.8g,%.8g\n", it.k, it.xi,
                  it.gap_po_max, it.gap_qo_max, it.objective, it.penalized_objective);
    csv << line;
  }

  std::error_code ec;
  std::filesystem::create_directories(args.out_dir, ec);
  const std::string trace_path = args.out_dir + "/tra_trace.csv";
  const std::string sol_path = args.out_dir + "/solution.json";
  nlohmann::json j;
  j["version"] = kVersion;
  j["converged"] = result.converged;
  j["xi_last_used"] = result.xi_last_used;
  j["xi_final"] = result.xi_final;
  j["solution"] = nlohmann::json::parse(
      gap_report_json(result.report, args.common.units == UnitMode::Mva ? net.base_mva : 1.0));
  j["objective"] = result.solution.objective;
  if (!write_file(trace_path, csv.str()) || !write_file(sol_path, j.dump(2) + "\n")) {
    std::fprintf(stderr, "error: cannot write outputs under %s\n", args.out_dir.c_str());
    return kExitUsage;
  }

  std::printf("TRA %s after %zu solve(s); last xi %.4g; gaps %.3E / %.3E\n",
              result.converged ? "converged" : "did not converge", result.iterates.size(),
              result.xi_last_used, result.report.gap_po_max, result.report.gap_qo_max);
  return result.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep_penalty(const SweepPenaltyArgs& args) {
  Network net;
  try {
    if (args.grid.empty()) throw std::invalid_argument("penalty grid must not be empty");
    if (!(args.common.load > 0.0)) throw NonPositiveFactor("load factor must be positive");
    net = load_case(args.case_path, args.common.load);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }

  std::vector<PenaltySweepEntry> entries;
  try {
    entries = penalty_sweep(net, args.grid, solver_options(args.common));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }

  std::ostringstream csv;
  csv << "# case=" << net.name << " load=" << args.common.load
      << " gap_tol=" << args.common.gap_tol << " version=" << kVersion << "\n";
  csv << "xi,gap_po_max,gap_qo_max,objective\n";
  int failures = 0;
  for (const auto& e : entries) {
    if (e.ok) {
      char line[160];
      std::snprintf(line, sizeof(line), "%g,%.2E,%.2E,%.8g\n", e.xi, e.gap_po_max,
                    e.gap_qo_max, e.objective);
      csv << line;
    } else {
      csv << e.xi << ",FAILED,FAILED,FAILED\n";
      ++failures;
    }
  }
  if (args.out.empty()) {
    std::fputs(csv.str().c_str(), stdout);
  } else if (!write_file(args.out, csv.str())) {
    std::fprintf(stderr, "error: cannot write %s\n", args.out.c_str());
    return kExitUsage;
  }
  return failures == static_cast<int>(entries.size()) ? kExitSolve : kExitOk;
}

}  // namespace socopf::cli
