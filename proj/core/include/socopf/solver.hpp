#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

#include "socopf/conic.hpp"

namespace socopf {

struct SolverOptions {
  double feas_tol = 1e-8;  // primal/dual residual target
  double gap_tol = 1e-8;   // relative duality gap target
  int max_iters = 200;
  bool verbose = false;
};

enum class SolveStatus {
  Optimal,
  PrimalInfeasible,
  DualInfeasible,
  IterationLimit,
  NumericalError,
};

std::string to_string(SolveStatus status);

/// Backend-agnostic solve result. Duals follow the Lagrangian
///   f(x) + y'(Ax-b) + lam'(Mx-d) + mu_up'(x-u) - mu_lo'(x-l) - sum_c z_c's_c(x)
/// so lam, mu_lo, mu_up >= 0 and z_c lies in the (self-dual) rotated cone.
struct SolverResult {
  SolveStatus status = SolveStatus::NumericalError;
  Eigen::VectorXd x;
  double objective = 0.0;
  Eigen::VectorXd eq_duals;
  Eigen::VectorXd ineq_duals;
  Eigen::VectorXd lower_duals;
  Eigen::VectorXd upper_duals;
  std::vector<Eigen::VectorXd> cone_duals;  // (u, v, w) coordinates per block
  double dual_objective = 0.0;
  int iterations = 0;
  double solve_seconds = 0.0;
  // residuals as seen by the backend at termination
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;  // relative
};

/// Residuals recomputed from scratch against the program definition;
/// never copied from backend internals.
struct Residuals {
  double eq_max = 0.0;            // max |A x - b|
  double ineq_max = 0.0;          // max positive part of Mx - d
  double box_max = 0.0;           // max box violation
  double cone_max = 0.0;          // max violation of 2uv >= |w|^2, u,v >= 0
  double stationarity = 0.0;      // inf-norm of the Lagrangian gradient
  double complementarity = 0.0;   // max |<slack, dual>| across blocks

  double max_primal() const;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solves the program with a Nesterov-Todd scaled primal-dual
/// interior-point method. Never throws on well-formed programs; failures
/// are reported through SolveStatus.
SolverResult solve(const ConicProgram& prog, const SolverOptions& opts = {});

Residuals kkt_residuals(const ConicProgram& prog, const SolverResult& res);

}  // namespace socopf
