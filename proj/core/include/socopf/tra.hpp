#pragma once

#include <stdexcept>
#include <vector>

#include "socopf/feasibility.hpp"
#include "socopf/network.hpp"
#include "socopf/socp_model.hpp"
#include "socopf/solver.hpp"

namespace socopf {

struct TraOptions {
  double xi0 = 0.05;         // initial penalty, 0 < xi0 < 1
  double dxi = 0.05;         // increment, 0 < dxi <= 0.5
  double gap_tol_po = 1e-6;  // p.u.
  double gap_tol_qo = 1e-6;  // p.u.
  int k_max = 40;
  PenaltyTarget target = PenaltyTarget::ReactiveLoss;

  void validate() const;  // throws std::invalid_argument
};

struct TraIterate {
  int k = 0;            // 1-based
  double xi = 0.0;      // penalty used for this solve
  double objective = 0.0;            // unpenalized f
  double penalized_objective = 0.0;  // f^M = f + xi * penalty term
  double gap_po_max = 0.0;
  double gap_qo_max = 0.0;
};

struct TraResult {
  std::vector<TraIterate> iterates;
  OpfSolution solution;  // last solved iterate
  GapReport report;
  bool converged = false;
  double xi_last_used = 0.0;  // penalty of the final solve
  double xi_final = 0.0;      // after the post-solve increment
};

/// Thrown when a penalized solve returns a non-Optimal status; carries
/// the trace accumulated so far.
struct SolveFailed : std::runtime_error {
  SolveFailed(const std::string& what, SolveStatus status, std::vector<TraIterate> trace)
      : std::runtime_error(what), status(status), trace(std::move(trace)) {}
  SolveStatus status;
  std::vector<TraIterate> trace;
};

/// Heuristic penalty loop: solve with the current xi, then increase it,
/// until both recomputed gap maxima fall within tolerance or the
/// iteration cap is reached.
TraResult run_tra(const Network& net, const TraOptions& opts = {},
                  const SolverOptions& solver_opts = {});

struct PenaltySweepEntry {
  double xi = 0.0;
  double gap_po_max = 0.0;
  double gap_qo_max = 0.0;
  double objective = 0.0;  // unpenalized f
  double sum_loss_q = 0.0;
  bool ok = false;
  SolveStatus status = SolveStatus::NumericalError;
};

/// One independent penalized solve per xi value, results in input order.
/// Failed entries are recorded and the sweep continues.
std::vector<PenaltySweepEntry> penalty_sweep(const Network& net,
                                             const std::vector<double>& xis,
                                             const SolverOptions& solver_opts = {},
                                             PenaltyTarget target = PenaltyTarget::ReactiveLoss);

}  // namespace socopf
