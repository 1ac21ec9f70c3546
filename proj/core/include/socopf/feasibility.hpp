#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>

#include "socopf/network.hpp"
#include "socopf/socp_model.hpp"

namespace socopf {

/// Per-line relaxation gaps of a decoded solution:
///   gap_po_l = p_ol - (p_sl^2 + q_sl^2)/V_sl * R_l
///   gap_qo_l = q_ol - (p_sl^2 + q_sl^2)/V_sl * X_l
/// with sending-end quantities in p.u.
struct GapReport {
  Eigen::VectorXd gap_po;
  Eigen::VectorXd gap_qo;
  double gap_po_max = 0.0;
  double gap_qo_max = 0.0;
  int argmax_po = -1;  // line index, -1 when the network has no lines
  int argmax_qo = -1;
  double balance_p_max = 0.0;  // max |(1b) residual|
  double balance_q_max = 0.0;
  double tolerance = 1e-6;
  bool feasible = false;
};

GapReport line_gaps(const OpfSolution& sol, const Network& net, double tol = 1e-6);

/// Residuals of the nodal balance equations evaluated at the solution,
/// lhs - rhs, using the same incidence and shunt conventions as the
/// program builder.
std::pair<Eigen::VectorXd, Eigen::VectorXd> balance_residuals(const OpfSolution& sol,
                                                              const Network& net);

/// Both gap maxima and both balance maxima within tol.
bool is_ac_feasible(const GapReport& report, double tol);

/// JSON object with per-line gaps and the summary fields.
std::string gap_report_json(const GapReport& report, double unit_scale = 1.0);

/// One CSV data row: case,load_pct,gap_po_max,gap_qo_max,feasible.
std::string gap_report_csv_row(const GapReport& report, const std::string& case_name,
                               double load_pct, double unit_scale = 1.0);

}  // namespace socopf
