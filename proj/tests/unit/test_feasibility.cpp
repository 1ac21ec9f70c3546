#include <doctest.h>

#include <cmath>

#include "socopf/feasibility.hpp"
#include "socopf/matpower.hpp"
#include "socopf/network.hpp"
#include "socopf/socp_model.hpp"
#include "socopf/solver.hpp"

using namespace socopf;

namespace {

Network case9() {
  static Network net =
      to_network(parse_matpower_file(std::string(SOCOPF_DATA_DIR) + "/case9.m"));
  return net;
}

Network single_line(double r = 0.01, double x = 0.1) {
  char text[640];
  std::snprintf(text, sizeof(text), R"(
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0  0  0 0 1 1 0 135 1 1.1 0.9;
  2 1 50 20 0 0 1 1 0 135 1 1.1 0.9;
];
mpc.gen = [ 1 0 0 300 -300 1 100 1 250 0 0 0 0 0 0 0 0 0 0 0 0; ];
mpc.branch = [ 1 2 %g %g 0 250 250 250 0 0 1 -360 360; ];
mpc.gencost = [ 2 0 0 3 0.1 5 100; ];
)", r, x);
  return to_network(parse_matpower_string(text, "single_line"));
}

OpfSolution zero_solution(const Network& net) {
  auto [prog, map] = build_socp(net);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(prog.n_vars);
  for (int n = 0; n < net.n_buses(); ++n) x[map.voltage_sq(n)] = 1.0;
  return extract_solution(x, map, net);
}

}  // namespace

TEST_CASE("zero flow means zero gaps") {
  Network net = single_line();
  OpfSolution sol = zero_solution(net);
  GapReport report = line_gaps(sol, net);
  CHECK(report.gap_po[0] == 0.0);
  CHECK(report.gap_qo[0] == 0.0);
  CHECK(report.gap_po_max == 0.0);
  CHECK(report.gap_qo_max == 0.0);
}

TEST_CASE("tight cone by construction") {
  Network net = single_line(0.0025, 0.1);
  OpfSolution sol = zero_solution(net);
  sol.flow_p_send[0] = 0.3;
  sol.flow_q_send[0] = 0.4;
  sol.loss_q[0] = 0.025;  // (0.09 + 0.16) / 1.0 * 0.1
  GapReport report = line_gaps(sol, net);
  CHECK(report.gap_qo[0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("argmax and maxima are recomputable") {
  Network net = case9();
  OpfSolution sol = zero_solution(net);
  sol.loss_q[3] = 0.7;
  sol.loss_q[5] = 0.2;
  sol.loss_p[5] = 0.1;
  GapReport report = line_gaps(sol, net);
  CHECK(report.gap_qo_max == doctest::Approx(0.7));
  CHECK(report.argmax_qo == 3);
  CHECK(report.gap_po_max == doctest::Approx(0.1));
  CHECK(report.argmax_po == 5);
  CHECK(report.gap_po_max == report.gap_po.maxCoeff());
  CHECK(report.gap_qo_max == report.gap_qo.maxCoeff());
}

TEST_CASE("is_ac_feasible thresholds") {
  GapReport report;
  report.gap_po = Eigen::VectorXd::Zero(1);
  report.gap_qo = Eigen::VectorXd::Zero(1);

  SUBCASE("all-zero gaps pass") {
    CHECK(is_ac_feasible(report, 1e-6));
  }
  SUBCASE("a 3.98 reactive gap fails") {
    report.gap_qo_max = 3.98;
    CHECK_FALSE(is_ac_feasible(report, 1e-6));
  }
  SUBCASE("slightly negative maxima pass") {
    report.gap_po_max = -3.78e-13;
    CHECK(is_ac_feasible(report, 1e-6));
  }
  SUBCASE("balance residuals gate feasibility too") {
    report.balance_p_max = 1e-3;
    CHECK_FALSE(is_ac_feasible(report, 1e-6));
  }
  SUBCASE("non-positive tolerance is rejected") {
    CHECK_THROWS_AS(is_ac_feasible(report, 0.0), std::invalid_argument);
  }
}

TEST_CASE("balance residuals vanish on a dead network") {
  const char* text = R"(
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 0 1 1 0 135 1 1.1 0.9;
  2 1 0 0 0 0 1 1 0 135 1 1.1 0.9;
];
mpc.gen = [ 1 0 0 300 -300 1 100 1 250 0 0 0 0 0 0 0 0 0 0 0 0; ];
mpc.branch = [ 1 2 0.01 0.1 0 250 250 250 0 0 1 -360 360; ];
mpc.gencost = [ 2 0 0 3 0 0 0; ];
)";
  Network net = to_network(parse_matpower_string(text, "dead"));
  OpfSolution sol = zero_solution(net);
  auto [rp, rq] = balance_residuals(sol, net);
  CHECK(rp.cwiseAbs().maxCoeff() == 0.0);
  CHECK(rq.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("perturbing one load shifts that bus residual exactly") {
  Network net = case9();
  auto [prog, map] = build_socp(net);
  SolverResult res = solve(prog);
  REQUIRE(res.status == SolveStatus::Optimal);
  OpfSolution sol = extract_solution(res.x, map, net);

  auto [rp0, rq0] = balance_residuals(sol, net);
  Network bumped = net;
  const double delta = 0.017;
  bumped.buses[4].p_load += delta;
  auto [rp1, rq1] = balance_residuals(sol, bumped);
  CHECK(rp1[4] - rp0[4] == doctest::Approx(-delta).epsilon(1e-12));
  for (int n = 0; n < net.n_buses(); ++n)
    if (n != 4) CHECK(rp1[n] == rp0[n]);
}

TEST_CASE("optimal solves satisfy the balance within 10x feas_tol") {
  Network net = case9();
  auto [prog, map] = build_socp(net);
  SolverOptions opts;
  SolverResult res = solve(prog, opts);
  REQUIRE(res.status == SolveStatus::Optimal);
  OpfSolution sol = extract_solution(res.x, map, net);
  auto [rp, rq] = balance_residuals(sol, net);
  CHECK(rp.cwiseAbs().maxCoeff() <= 10 * opts.feas_tol);
  CHECK(rq.cwiseAbs().maxCoeff() <= 10 * opts.feas_tol);
}

TEST_CASE("gap coupling identity follows the loss coupling row") {
  Network net = case9();
  auto [prog, map] = build_socp(net);
  SolverResult res = solve(prog);
  REQUIRE(res.status == SolveStatus::Optimal);
  OpfSolution sol = extract_solution(res.x, map, net);
  GapReport report = line_gaps(sol, net);
  for (int l = 0; l < net.n_branches(); ++l) {
    const auto& br = net.branches[l];
    // gap_po * X = gap_qo * R whenever p_o X = q_o R holds
    CHECK(report.gap_po[l] * br.x - report.gap_qo[l] * br.r ==
          doctest::Approx(0.0).epsilon(1e-9));
  }
  // cone feasibility keeps reactive gaps above -10 * feas_tol
  CHECK(report.gap_qo.minCoeff() >= -1e-7);
}

TEST_CASE("feasibility ranking is ordered by the larger max gap") {
  GapReport tight, loose;
  tight.gap_po_max = 1e-9;
  tight.gap_qo_max = 1e-8;
  loose.gap_po_max = 1e-3;
  loose.gap_qo_max = 2e-2;
  auto rank = [](const GapReport& r) { return std::max(r.gap_po_max, r.gap_qo_max); };
  CHECK(rank(tight) < rank(loose));
}

TEST_CASE("gap report serialization") {
  Network net = single_line();
  OpfSolution sol = zero_solution(net);
  GapReport report = line_gaps(sol, net);
  const std::string json = gap_report_json(report);
  CHECK(json.find("\"gap_po_max\"") != std::string::npos);
  CHECK(json.find("\"feasible\"") != std::string::npos);
  const std::string row = gap_report_csv_row(report, "single_line", 100.0);
  CHECK(row.substr(0, 16) == "single_line,100,");
  // mva units scale by the base
  const std::string scaled = gap_report_csv_row(report, "single_line", 100.0, net.base_mva);
  CHECK(scaled.find("single_line,100,") == 0);
}
