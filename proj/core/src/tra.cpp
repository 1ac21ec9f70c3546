#include "socopf/tra.hpp"

#include <stdexcept>
#include <string>

namespace socopf {

void TraOptions::validate() const {
  if (!(xi0 > 0.0 && xi0 < 1.0))
    throw std::invalid_argument("xi0 must lie in (0, 1)");
  if (!(dxi > 0.0 && dxi <= 0.5))
    throw std::invalid_argument("dxi must lie in (0, 0.5]");
  if (!(gap_tol_po > 0.0 && gap_tol_qo > 0.0))
    throw std::invalid_argument("gap tolerances must be positive");
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
}

TraResult run_tra(const Network& net, const TraOptions& opts,
                  const SolverOptions& solver_opts) {
  opts.validate();
  TraResult result;
  double xi = opts.xi0;
  int k = 1;
  for (;;) {
    PenaltySpec penalty{xi, opts.target};
    auto [prog, map] = build_socp(net, penalty);
    SolverResult solve_result = solve(prog, solver_opts);
    if (solve_result.status != SolveStatus::Optimal)
      throw SolveFailed(net.name + ": penalized solve with xi=" + std::to_string(xi) +
                            " returned " + to_string(solve_result.status),
                        solve_result.status, result.iterates);
    OpfSolution sol = extract_solution(solve_result.x, map, net);
    GapReport report = line_gaps(sol, net, std::max(opts.gap_tol_po, opts.gap_tol_qo));

    TraIterate it;
    it.k = k;
    it.xi = xi;
    it.objective = sol.objective;
    it.penalized_objective = sol.objective + penalty_term(sol, penalty);
    it.gap_po_max = report.gap_po_max;
    it.gap_qo_max = report.gap_qo_max;
    result.iterates.push_back(it);

    result.solution = std::move(sol);
    result.report = std::move(report);
    result.xi_last_used = xi;
    xi += opts.dxi;
    result.xi_final = xi;
    k += 1;

    const bool tight = result.report.gap_po_max <= opts.gap_tol_po &&
                       result.report.gap_qo_max <= opts.gap_tol_qo;
    if (tight) {
      result.converged = true;
      break;
    }
    if (k > opts.k_max) {  // cap counts solves, not the post-increment index
      result.converged = false;
      break;
    }
  }
  return result;
}

std::vector<PenaltySweepEntry> penalty_sweep(const Network& net,
                                             const std::vector<double>& xis,
                                             const SolverOptions& solver_opts,
                                             PenaltyTarget target) {
  if (xis.empty()) throw std::invalid_argument("penalty grid must not be empty");
  for (double xi : xis)
    if (xi < 0.0) throw std::invalid_argument("penalty values must be nonnegative");

  std::vector<PenaltySweepEntry> entries(xis.size());
  for (size_t i = 0; i < xis.size(); ++i) {
    PenaltySweepEntry& entry = entries[i];
    entry.xi = xis[i];
    PenaltySpec penalty{xis[i], target};
    auto [prog, map] = build_socp(net, penalty);
    SolverResult solve_result = solve(prog, solver_opts);
    entry.status = solve_result.status;
    if (solve_result.status != SolveStatus::Optimal) continue;
    OpfSolution sol = extract_solution(solve_result.x, map, net);
    GapReport report = line_gaps(sol, net);
    entry.gap_po_max = report.gap_po_max;
    entry.gap_qo_max = report.gap_qo_max;
    entry.objective = sol.objective;
    entry.sum_loss_q = sol.loss_q.sum();
    entry.ok = true;
  }
  return entries;
}

}  // namespace socopf
