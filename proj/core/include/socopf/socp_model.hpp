#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <utility>

#include "socopf/conic.hpp"
#include "socopf/network.hpp"

namespace socopf {

/// Index assignment of model variables into the program vector.
/// Layout: V_n | theta_n | p_g | q_g | p_s | q_s | p_o | q_o | theta_l.
struct VariableMap {
  int n_buses = 0;
  int n_gens = 0;
  int n_lines = 0;

  int voltage_sq(int bus) const { return bus; }
  int theta(int bus) const { return n_buses + bus; }
  int gen_p(int g) const { return 2 * n_buses + g; }
  int gen_q(int g) const { return 2 * n_buses + n_gens + g; }
  int flow_p(int l) const { return 2 * n_buses + 2 * n_gens + l; }
  int flow_q(int l) const { return 2 * n_buses + 2 * n_gens + n_lines + l; }
  int loss_p(int l) const { return 2 * n_buses + 2 * n_gens + 2 * n_lines + l; }
  int loss_q(int l) const { return 2 * n_buses + 2 * n_gens + 3 * n_lines + l; }
  int line_angle(int l) const { return 2 * n_buses + 2 * n_gens + 4 * n_lines + l; }
  int n_vars() const { return 2 * n_buses + 2 * n_gens + 5 * n_lines; }
};

enum class PenaltyTarget {
  ReactiveLoss,            // xi * sum_l q_ol
  ActivePlusReactiveLoss,  // xi * sum_l (p_ol + q_ol)
};

struct PenaltySpec {
  double xi = 0.0;
  PenaltyTarget target = PenaltyTarget::ReactiveLoss;
};

struct BuildOptions {
  PenaltySpec penalty;
  // Which line end feeds the loss cone and the ampacity surrogate.
  bool use_receiving_end = false;
};

/// Decoded physical quantities of a solved program.
struct OpfSolution {
  Eigen::VectorXd voltage_sq;  // V_n, p.u.^2
  Eigen::VectorXd voltage;     // v_n = sqrt(V_n), p.u.
  Eigen::VectorXd theta;       // rad
  Eigen::VectorXd gen_p;
  Eigen::VectorXd gen_q;
  Eigen::VectorXd flow_p_send;
  Eigen::VectorXd flow_q_send;
  Eigen::VectorXd loss_p;
  Eigen::VectorXd loss_q;
  Eigen::VectorXd line_angle;
  Eigen::VectorXd flow_p_recv;  // p_sl - p_ol
  Eigen::VectorXd flow_q_recv;  // q_sl - q_ol
  double objective = 0.0;       // unpenalized generation cost, $/h
};

struct NonPositiveVoltageSquare : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Builds the SOC relaxation of AC optimal power flow for the network,
/// optionally with the penalty-modified objective.
std::pair<ConicProgram, VariableMap> build_socp(const Network& net,
                                                const PenaltySpec& penalty = {});
std::pair<ConicProgram, VariableMap> build_socp(const Network& net,
                                                const BuildOptions& options);

/// Decodes a primal vector into physical per-bus/per-line quantities.
/// The objective is recomputed from the unpenalized cost curve.
OpfSolution extract_solution(const Eigen::VectorXd& x, const VariableMap& map,
                             const Network& net);

/// Penalty part of the modified objective at a solution: xi * sum of the
/// targeted losses. The penalized objective is solution.objective + this.
double penalty_term(const OpfSolution& sol, const PenaltySpec& penalty);

}  // namespace socopf
