#include <doctest.h>

#include <cmath>
#include <queue>

#include "socopf/matpower.hpp"
#include "socopf/network.hpp"

using namespace socopf;

namespace {

RawCase raw_case(const std::string& name) {
  return parse_matpower_file(std::string(SOCOPF_DATA_DIR) + "/" + name);
}

RawCase two_bus_raw() {
  const char* text = R"(
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0  0  5 -30 1 1 0 135 1 1.1 0.9;
  2 1 50 20 0 0   1 1 0 135 1 1.1 0.9;
];
mpc.gen = [ 1 0 0 300 -300 1 100 1 250 0 0 0 0 0 0 0 0 0 0 0 0; ];
mpc.branch = [ 1 2 0.01 0.1 0 250 250 250 0 0 1 -360 360; ];
mpc.gencost = [ 2 0 0 3 0.1 5 100; ];
)";
  return parse_matpower_string(text, "two_bus");
}

// independent connectivity oracle for the property check
bool bfs_connected(const Network& net) {
  std::vector<std::vector<int>> adj(net.n_buses());
  for (const auto& br : net.branches) {
    adj[br.from_bus].push_back(br.to_bus);
    adj[br.to_bus].push_back(br.from_bus);
  }
  std::vector<bool> seen(net.n_buses(), false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int found = 1;
  while (!q.empty()) {
    int at = q.front();
    q.pop();
    for (int n : adj[at])
      if (!seen[n]) {
        seen[n] = true;
        ++found;
        q.push(n);
      }
  }
  return found == net.n_buses();
}

}  // namespace

TEST_CASE("case9 network conversion") {
  Network net = to_network(raw_case("case9.m"));
  CHECK(net.base_mva == 100.0);
  CHECK(net.n_buses() == 9);
  CHECK(net.n_branches() == 9);
  CHECK(net.n_generators() == 3);
  for (const auto& br : net.branches) CHECK(br.tap == 1.0);
  CHECK(net.slack_bus() == 0);
  // per-unit round trip against the file's MW values
  CHECK(net.buses[4].p_load * net.base_mva == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(net.buses[8].q_load * net.base_mva == doctest::Approx(50.0).epsilon(1e-12));
  // cost rebasing: f(p_pu) must equal the file's f(P_MW)
  const auto& g = net.generators[0];
  const double p_mw = 120.0;
  const double f_file = 0.11 * p_mw * p_mw + 5.0 * p_mw + 150.0;
  const double p_pu = p_mw / net.base_mva;
  CHECK(g.cost_a * p_pu * p_pu + g.cost_b * p_pu + g.cost_c ==
        doctest::Approx(f_file).epsilon(1e-12));
}

TEST_CASE("shunts divide by the MVA base before charging fold") {
  Network net = to_network(two_bus_raw());
  CHECK(net.buses[0].g_shunt == doctest::Approx(0.05));
  CHECK(net.buses[0].b_shunt == doctest::Approx(-0.30));
}

TEST_CASE("line charging folds b/2 into each terminal bus") {
  RawCase raw = two_bus_raw();
  raw.branch_rows[0][4] = 0.2;  // total charging, already per-unit
  Network net = to_network(raw);
  CHECK(net.branches[0].b_charge_send == doctest::Approx(0.1));
  CHECK(net.branches[0].b_charge_recv == doctest::Approx(0.1));
  CHECK(net.buses[0].b_shunt == doctest::Approx(-0.30 + 0.1));
  CHECK(net.buses[1].b_shunt == doctest::Approx(0.1));
}

TEST_CASE("zero reactance is rejected") {
  RawCase raw = two_bus_raw();
  raw.branch_rows[0][3] = 0.0;
  CHECK_THROWS_AS(to_network(raw), NonPositiveReactance);
}

TEST_CASE("slack count is validated") {
  RawCase raw = two_bus_raw();
  raw.bus_rows[0][1] = 1;  // demote the slack
  CHECK_THROWS_AS(to_network(raw), NoSlack);
  raw.bus_rows[0][1] = 3;
  raw.bus_rows[1][1] = 3;
  CHECK_THROWS_AS(to_network(raw), MultipleSlack);
}

TEST_CASE("disconnected networks are rejected") {
  RawCase raw = two_bus_raw();
  raw.branch_rows[0][10] = 0;  // take the only line out of service
  CHECK_THROWS_AS(to_network(raw), IslandedNetwork);
}

TEST_CASE("out-of-service branches are dropped") {
  RawCase raw = raw_case("case9.m");
  // case9 stays connected without branch 4->5 (ring topology)
  raw.branch_rows[1][10] = 0;
  Network net = to_network(raw);
  CHECK(net.n_branches() == 8);
}

TEST_CASE("scale_loads") {
  Network net = to_network(raw_case("case9.m"));

  SUBCASE("factor 1 is the identity") {
    Network same = scale_loads(net, 1.0);
    for (int n = 0; n < net.n_buses(); ++n) {
      CHECK(same.buses[n].p_load == net.buses[n].p_load);
      CHECK(same.buses[n].q_load == net.buses[n].q_load);
    }
  }
  SUBCASE("factor 0.05 gives the smallest sweep level") {
    Network low = scale_loads(net, 0.05);
    for (int n = 0; n < net.n_buses(); ++n)
      CHECK(low.buses[n].p_load == net.buses[n].p_load * 0.05);
  }
  SUBCASE("0.5 then 2.0 composes back exactly") {
    Network twice = scale_loads(scale_loads(net, 0.5), 2.0);
    for (int n = 0; n < net.n_buses(); ++n) {
      CHECK(twice.buses[n].p_load == net.buses[n].p_load);
      CHECK(twice.buses[n].q_load == net.buses[n].q_load);
    }
  }
  SUBCASE("input is not mutated") {
    const double before = net.buses[4].p_load;
    (void)scale_loads(net, 0.3);
    CHECK(net.buses[4].p_load == before);
  }
  SUBCASE("non-positive factors are rejected") {
    CHECK_THROWS_AS(scale_loads(net, 0.0), NonPositiveFactor);
    CHECK_THROWS_AS(scale_loads(net, -1.0), NonPositiveFactor);
  }
}

TEST_CASE("incidence of a 2-bus single line network") {
  Network net = to_network(two_bus_raw());
  Incidence inc = incidence(net);
  REQUIRE(inc.a_plus.rows() == 2);
  REQUIRE(inc.a_plus.cols() == 1);
  CHECK(inc.a_plus.coeff(0, 0) == 1.0);
  CHECK(inc.a_plus.coeff(1, 0) == -1.0);
  CHECK(inc.a_minus.coeff(0, 0) == 0.0);
  CHECK(inc.a_minus.coeff(1, 0) == -1.0);
}

TEST_CASE("incidence columns sum to zero on case9") {
  Network net = to_network(raw_case("case9.m"));
  Incidence inc = incidence(net);
  Eigen::VectorXd colsum = Eigen::RowVectorXd::Ones(net.n_buses()) * inc.a_plus;
  CHECK(colsum.cwiseAbs().maxCoeff() == 0.0);
  // a_minus has exactly one -1 per column
  Eigen::VectorXd msum = Eigen::RowVectorXd::Ones(net.n_buses()) * inc.a_minus;
  CHECK((msum.array() == -1.0).all());
}

TEST_CASE("reversing a line flips its incidence column") {
  Network net = to_network(two_bus_raw());
  Network reversed = net;
  std::swap(reversed.branches[0].from_bus, reversed.branches[0].to_bus);
  Incidence a = incidence(net);
  Incidence b = incidence(reversed);
  CHECK(b.a_plus.coeff(0, 0) == -a.a_plus.coeff(0, 0));
  CHECK(b.a_plus.coeff(1, 0) == -a.a_plus.coeff(1, 0));
  CHECK(b.a_minus.coeff(0, 0) == -1.0);
  CHECK(b.a_minus.coeff(1, 0) == 0.0);
}

TEST_CASE("connectivity check agrees with a brute-force search on fixtures") {
  for (const char* name : {"case9.m", "case14.m", "case30.m"}) {
    Network net = to_network(raw_case(name));
    CHECK(is_connected(net) == bfs_connected(net));
    CHECK(is_connected(net));
  }
}

TEST_CASE("branch angle limits fall back to +-pi/3 outside (-pi/2, pi/2)") {
  RawCase raw = two_bus_raw();
  raw.branch_rows[0][11] = -30.0;
  raw.branch_rows[0][12] = 45.0;
  Network net = to_network(raw);
  CHECK(net.branches[0].angle_min == doctest::Approx(-30.0 * M_PI / 180.0));
  CHECK(net.branches[0].angle_max == doctest::Approx(45.0 * M_PI / 180.0));

  raw.branch_rows[0][11] = -360.0;
  raw.branch_rows[0][12] = 360.0;
  net = to_network(raw);
  CHECK(net.branches[0].angle_min == doctest::Approx(-M_PI / 3));
  CHECK(net.branches[0].angle_max == doctest::Approx(M_PI / 3));
}
