#include "socopf/socp_model.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace socopf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::pair<ConicProgram, VariableMap> build_socp(const Network& net,
                                                const PenaltySpec& penalty) {
  BuildOptions options;
  options.penalty = penalty;
  return build_socp(net, options);
}

std::pair<ConicProgram, VariableMap> build_socp(const Network& net,
                                                const BuildOptions& options) {
  const int nb = net.n_buses();
  const int ng = net.n_generators();
  const int nl = net.n_branches();
  VariableMap map;
  map.n_buses = nb;
  map.n_gens = ng;
  map.n_lines = nl;
  const int nv = map.n_vars();

  ConicProgram prog;
  prog.n_vars = nv;
  prog.curvature = Eigen::VectorXd::Zero(nv);
  prog.linear_cost = Eigen::VectorXd::Zero(nv);
  prog.constant_cost = 0.0;
  prog.lower = Eigen::VectorXd::Constant(nv, -kInf);
  prog.upper = Eigen::VectorXd::Constant(nv, kInf);

  // objective: generation cost, plus the loss penalty when enabled
  for (int g = 0; g < ng; ++g) {
    const auto& gen = net.generators[g];
    prog.curvature[map.gen_p(g)] = gen.cost_a;
    prog.linear_cost[map.gen_p(g)] = gen.cost_b;
    prog.constant_cost += gen.cost_c;
  }
  if (options.penalty.xi > 0.0) {
    for (int l = 0; l < nl; ++l) {
      prog.linear_cost[map.loss_q(l)] += options.penalty.xi;
      if (options.penalty.target == PenaltyTarget::ActivePlusReactiveLoss)
        prog.linear_cost[map.loss_p(l)] += options.penalty.xi;
    }
  }

  // boxes
  for (int n = 0; n < nb; ++n) {
    const auto& bus = net.buses[n];
    prog.lower[map.voltage_sq(n)] = bus.v_min * bus.v_min;
    prog.upper[map.voltage_sq(n)] = bus.v_max * bus.v_max;
    prog.lower[map.theta(n)] = bus.theta_min;
    prog.upper[map.theta(n)] = bus.theta_max;
  }
  for (int g = 0; g < ng; ++g) {
    const auto& gen = net.generators[g];
    prog.lower[map.gen_p(g)] = gen.p_min;
    prog.upper[map.gen_p(g)] = gen.p_max;
    prog.lower[map.gen_q(g)] = gen.q_min;
    prog.upper[map.gen_q(g)] = gen.q_max;
  }
  for (int l = 0; l < nl; ++l) {
    const auto& br = net.branches[l];
    prog.lower[map.line_angle(l)] = br.angle_min;
    prog.upper[map.line_angle(l)] = br.angle_max;
  }
  for (int i = 0; i < nv; ++i)
    if (prog.lower[i] > prog.upper[i])
      throw InfeasibleBox(net.name + ": empty box for variable " + std::to_string(i));

  // equalities: nodal balance (2 per bus), then per line the voltage-drop
  // magnitude, the angle drop, the loss coupling, and the angle identity
  const int n_eq = 2 * nb + 4 * nl;
  std::vector<Eigen::Triplet<double>> eq;
  Eigen::VectorXd eq_rhs = Eigen::VectorXd::Zero(n_eq);
  const int row_bal_p = 0;
  const int row_bal_q = nb;
  const int row_vdrop = 2 * nb;
  const int row_adrop = 2 * nb + nl;
  const int row_losscouple = 2 * nb + 2 * nl;
  const int row_angle_id = 2 * nb + 3 * nl;

  for (int n = 0; n < nb; ++n) {
    const auto& bus = net.buses[n];
    eq.emplace_back(row_bal_p + n, map.voltage_sq(n), -bus.g_shunt);
    eq.emplace_back(row_bal_q + n, map.voltage_sq(n), bus.b_shunt);
    eq_rhs[row_bal_p + n] = bus.p_load;
    eq_rhs[row_bal_q + n] = bus.q_load;
  }
  for (int g = 0; g < ng; ++g) {
    const auto& gen = net.generators[g];
    eq.emplace_back(row_bal_p + gen.bus, map.gen_p(g), 1.0);
    eq.emplace_back(row_bal_q + gen.bus, map.gen_q(g), 1.0);
  }
  for (int l = 0; l < nl; ++l) {
    const auto& br = net.branches[l];
    const int s = br.from_bus;
    const int r = br.to_bus;
    // sending end exports the flow, receiving end gets flow minus loss
    eq.emplace_back(row_bal_p + s, map.flow_p(l), -1.0);
    eq.emplace_back(row_bal_p + r, map.flow_p(l), 1.0);
    eq.emplace_back(row_bal_p + r, map.loss_p(l), -1.0);
    eq.emplace_back(row_bal_q + s, map.flow_q(l), -1.0);
    eq.emplace_back(row_bal_q + r, map.flow_q(l), 1.0);
    eq.emplace_back(row_bal_q + r, map.loss_q(l), -1.0);

    const double inv_tap_sq = 1.0 / (br.tap * br.tap);
    // V_s/tap^2 - V_r = 2 R p_s + 2 X q_s - R p_o - X q_o
    eq.emplace_back(row_vdrop + l, map.voltage_sq(s), inv_tap_sq);
    eq.emplace_back(row_vdrop + l, map.voltage_sq(r), -1.0);
    eq.emplace_back(row_vdrop + l, map.flow_p(l), -2.0 * br.r);
    eq.emplace_back(row_vdrop + l, map.flow_q(l), -2.0 * br.x);
    eq.emplace_back(row_vdrop + l, map.loss_p(l), br.r);
    eq.emplace_back(row_vdrop + l, map.loss_q(l), br.x);

    // theta_l = X p_s - R q_s
    eq.emplace_back(row_adrop + l, map.line_angle(l), 1.0);
    eq.emplace_back(row_adrop + l, map.flow_p(l), -br.x);
    eq.emplace_back(row_adrop + l, map.flow_q(l), br.r);

    // p_o X = q_o R
    eq.emplace_back(row_losscouple + l, map.loss_p(l), br.x);
    eq.emplace_back(row_losscouple + l, map.loss_q(l), -br.r);

    // theta_l = (theta_s - shift) - theta_r
    eq.emplace_back(row_angle_id + l, map.line_angle(l), 1.0);
    eq.emplace_back(row_angle_id + l, map.theta(s), -1.0);
    eq.emplace_back(row_angle_id + l, map.theta(r), 1.0);
    eq_rhs[row_angle_id + l] = -br.shift;
  }
  prog.eq_matrix.resize(n_eq, nv);
  prog.eq_matrix.setFromTriplets(eq.begin(), eq.end());
  prog.eq_rhs = eq_rhs;

  // ampacity surrogate: q_o <= (K - V B^2 + 2 q B) X for rated lines
  std::vector<Eigen::Triplet<double>> ineq;
  std::vector<double> ineq_rhs;
  for (int l = 0; l < nl; ++l) {
    const auto& br = net.branches[l];
    if (br.rate <= 0.0) continue;  // unlimited
    const int row = static_cast<int>(ineq_rhs.size());
    const double cap = br.rate * br.rate;
    if (!options.use_receiving_end) {
      const double b = br.b_charge_send;
      const double v_coef = br.x * b * b / (br.tap * br.tap);
      ineq.emplace_back(row, map.loss_q(l), 1.0);
      if (v_coef != 0.0) ineq.emplace_back(row, map.voltage_sq(br.from_bus), v_coef);
      if (b != 0.0) ineq.emplace_back(row, map.flow_q(l), -2.0 * br.x * b);
    } else {
      const double b = br.b_charge_recv;
      // receiving-end flow is q_s - q_o
      ineq.emplace_back(row, map.loss_q(l), 1.0 + 2.0 * br.x * b);
      if (b != 0.0) ineq.emplace_back(row, map.voltage_sq(br.to_bus), br.x * b * b);
      if (b != 0.0) ineq.emplace_back(row, map.flow_q(l), -2.0 * br.x * b);
    }
    ineq_rhs.push_back(br.x * cap);
  }
  prog.ineq_matrix.resize(static_cast<int>(ineq_rhs.size()), nv);
  prog.ineq_matrix.setFromTriplets(ineq.begin(), ineq.end());
  prog.ineq_rhs = Eigen::Map<Eigen::VectorXd>(ineq_rhs.data(), ineq_rhs.size());

  // cones: loss relaxation 2 (q_o/2X) V_s >= p_s^2 + q_s^2 and the
  // angle-consistency cone V_s V_r sin^2(theta_max) >= theta_l^2
  prog.cones.reserve(2 * nl);
  for (int l = 0; l < nl; ++l) {
    const auto& br = net.branches[l];
    const double inv_tap_sq = 1.0 / (br.tap * br.tap);
    RotatedConeBlock loss;
    loss.u.terms = {{map.loss_q(l), 1.0 / (2.0 * br.x)}};
    if (!options.use_receiving_end) {
      loss.v.terms = {{map.voltage_sq(br.from_bus), inv_tap_sq}};
      loss.w.resize(2);
      loss.w[0].terms = {{map.flow_p(l), 1.0}};
      loss.w[1].terms = {{map.flow_q(l), 1.0}};
    } else {
      loss.v.terms = {{map.voltage_sq(br.to_bus), 1.0}};
      loss.w.resize(2);
      loss.w[0].terms = {{map.flow_p(l), 1.0}, {map.loss_p(l), -1.0}};
      loss.w[1].terms = {{map.flow_q(l), 1.0}, {map.loss_q(l), -1.0}};
    }
    prog.cones.push_back(std::move(loss));

    const double bound = std::max(std::abs(br.angle_min), std::abs(br.angle_max));
    const double sin_sq = std::sin(bound) * std::sin(bound);
    RotatedConeBlock angle;
    angle.u.terms = {{map.voltage_sq(br.from_bus), 0.5 * sin_sq * inv_tap_sq}};
    angle.v.terms = {{map.voltage_sq(br.to_bus), 1.0}};
    angle.w.resize(1);
    angle.w[0].terms = {{map.line_angle(l), 1.0}};
    prog.cones.push_back(std::move(angle));
  }

  return {std::move(prog), map};
}

OpfSolution extract_solution(const Eigen::VectorXd& x, const VariableMap& map,
                             const Network& net) {
  if (x.size() != map.n_vars())
    throw std::invalid_argument("primal vector length does not match the variable map");
  const int nb = map.n_buses;
  const int ng = map.n_gens;
  const int nl = map.n_lines;

  OpfSolution sol;
  sol.voltage_sq.resize(nb);
  sol.voltage.resize(nb);
  sol.theta.resize(nb);
  for (int n = 0; n < nb; ++n) {
    const double vsq = x[map.voltage_sq(n)];
    if (!(vsq > 0.0))
      throw NonPositiveVoltageSquare("V must be positive at bus " +
                                     std::to_string(net.buses[n].id));
    sol.voltage_sq[n] = vsq;
    sol.voltage[n] = std::sqrt(vsq);
    sol.theta[n] = x[map.theta(n)];
  }
  sol.gen_p.resize(ng);
  sol.gen_q.resize(ng);
  sol.objective = 0.0;
  for (int g = 0; g < ng; ++g) {
    const auto& gen = net.generators[g];
    sol.gen_p[g] = x[map.gen_p(g)];
    sol.gen_q[g] = x[map.gen_q(g)];
    sol.objective += gen.cost_a * sol.gen_p[g] * sol.gen_p[g] + gen.cost_b * sol.gen_p[g] +
                     gen.cost_c;
  }
  sol.flow_p_send.resize(nl);
  sol.flow_q_send.resize(nl);
  sol.loss_p.resize(nl);
  sol.loss_q.resize(nl);
  sol.line_angle.resize(nl);
  sol.flow_p_recv.resize(nl);
  sol.flow_q_recv.resize(nl);
  for (int l = 0; l < nl; ++l) {
    sol.flow_p_send[l] = x[map.flow_p(l)];
    sol.flow_q_send[l] = x[map.flow_q(l)];
    sol.loss_p[l] = x[map.loss_p(l)];
    sol.loss_q[l] = x[map.loss_q(l)];
    sol.line_angle[l] = x[map.line_angle(l)];
    sol.flow_p_recv[l] = sol.flow_p_send[l] - sol.loss_p[l];
    sol.flow_q_recv[l] = sol.flow_q_send[l] - sol.loss_q[l];
  }
  return sol;
}

double penalty_term(const OpfSolution& sol, const PenaltySpec& penalty) {
  if (penalty.xi <= 0.0) return 0.0;
  double losses = sol.loss_q.sum();
  if (penalty.target == PenaltyTarget::ActivePlusReactiveLoss) losses += sol.loss_p.sum();
  return penalty.xi * losses;
}

}  // namespace socopf
