#include "socopf/feasibility.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace socopf {

GapReport line_gaps(const OpfSolution& sol, const Network& net, double tol) {
  const int nl = net.n_branches();
  if (sol.flow_p_send.size() != nl)
    throw std::invalid_argument("solution does not match the network");
  GapReport report;
  report.tolerance = tol;
  report.gap_po.resize(nl);
  report.gap_qo.resize(nl);
  report.gap_po_max = nl ? -std::numeric_limits<double>::infinity() : 0.0;
  report.gap_qo_max = nl ? -std::numeric_limits<double>::infinity() : 0.0;
  for (int l = 0; l < nl; ++l) {
    const auto& br = net.branches[l];
    const double v_send = sol.voltage_sq[br.from_bus] / (br.tap * br.tap);
    const double flow_sq = sol.flow_p_send[l] * sol.flow_p_send[l] +
                           sol.flow_q_send[l] * sol.flow_q_send[l];
    report.gap_po[l] = sol.loss_p[l] - flow_sq / v_send * br.r;
    report.gap_qo[l] = sol.loss_q[l] - flow_sq / v_send * br.x;
    if (report.gap_po[l] > report.gap_po_max) {
      report.gap_po_max = report.gap_po[l];
      report.argmax_po = l;
    }
    if (report.gap_qo[l] > report.gap_qo_max) {
      report.gap_qo_max = report.gap_qo[l];
      report.argmax_qo = l;
    }
  }
  auto [bp, bq] = balance_residuals(sol, net);
  report.balance_p_max = bp.size() ? bp.cwiseAbs().maxCoeff() : 0.0;
  report.balance_q_max = bq.size() ? bq.cwiseAbs().maxCoeff() : 0.0;
  report.feasible = is_ac_feasible(report, tol);
  return report;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> balance_residuals(const OpfSolution& sol,
                                                              const Network& net) {
  const int nb = net.n_buses();
  if (sol.voltage_sq.size() != nb)
    throw std::invalid_argument("solution does not match the network");
  Eigen::VectorXd rp = Eigen::VectorXd::Zero(nb);
  Eigen::VectorXd rq = Eigen::VectorXd::Zero(nb);
  // lhs - rhs of the balance equations: p_n - p_dn - sum_l(...) - G_n V_n
  for (int n = 0; n < nb; ++n) {
    const auto& bus = net.buses[n];
    rp[n] = -bus.p_load - bus.g_shunt * sol.voltage_sq[n];
    rq[n] = -bus.q_load + bus.b_shunt * sol.voltage_sq[n];
  }
  for (int g = 0; g < net.n_generators(); ++g) {
    rp[net.generators[g].bus] += sol.gen_p[g];
    rq[net.generators[g].bus] += sol.gen_q[g];
  }
  for (int l = 0; l < net.n_branches(); ++l) {
    const auto& br = net.branches[l];
    rp[br.from_bus] -= sol.flow_p_send[l];
    rq[br.from_bus] -= sol.flow_q_send[l];
    rp[br.to_bus] += sol.flow_p_send[l] - sol.loss_p[l];
    rq[br.to_bus] += sol.flow_q_send[l] - sol.loss_q[l];
  }
  return {rp, rq};
}

bool is_ac_feasible(const GapReport& report, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  return report.gap_po_max <= tol && report.gap_qo_max <= tol &&
         report.balance_p_max <= tol && report.balance_q_max <= tol;
}

std::string gap_report_json(const GapReport& report, double unit_scale) {
  nlohmann::json j;
  j["gap_po_max"] = report.gap_po_max * unit_scale;
  j["gap_qo_max"] = report.gap_qo_max * unit_scale;
  j["argmax_po"] = report.argmax_po;
  j["argmax_qo"] = report.argmax_qo;
  j["balance_p_max"] = report.balance_p_max * unit_scale;
  j["balance_q_max"] = report.balance_q_max * unit_scale;
  j["tolerance"] = report.tolerance;
  j["feasible"] = report.feasible;
  std::vector<double> po(report.gap_po.begin(), report.gap_po.end());
  std::vector<double> qo(report.gap_qo.begin(), report.gap_qo.end());
  for (auto& v : po) v *= unit_scale;
  for (auto& v : qo) v *= unit_scale;
  j["gap_po"] = po;
  j["gap_qo"] = qo;
  return j.dump(2);
}

std::string gap_report_csv_row(const GapReport& report, const std::string& case_name,
                               double load_pct, double unit_scale) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s,%g,%.2E,%.2E,%d", case_name.c_str(), load_pct,
                report.gap_po_max * unit_scale, report.gap_qo_max * unit_scale,
                report.feasible ? 1 : 0);
  return buf;
}

}  // namespace socopf
