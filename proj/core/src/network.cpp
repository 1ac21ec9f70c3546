#include "socopf/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <unordered_map>

namespace socopf {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;

// MATPOWER column positions (0-based).
enum BusCol { BUS_I = 0, BUS_TYPE = 1, PD = 2, QD = 3, GS = 4, BS = 5, VMAX = 11, VMIN = 12 };
enum GenCol { GEN_BUS = 0, QMAX = 3, QMIN = 4, GEN_STATUS = 7, PMAX = 8, PMIN = 9 };
enum BranchCol {
  F_BUS = 0,
  T_BUS = 1,
  BR_R = 2,
  BR_X = 3,
  BR_B = 4,
  RATE_A = 5,
  TAP = 8,
  SHIFT = 9,
  BR_STATUS = 10,
  ANGMIN = 11,
  ANGMAX = 12
};

}  // namespace

int Network::slack_bus() const {
  for (int n = 0; n < n_buses(); ++n)
    if (buses[n].kind == BusKind::Slack) return n;
  return -1;
}

Network to_network(const RawCase& raw) {
  Network net;
  net.name = raw.name;
  net.base_mva = raw.base_mva;
  const double base = raw.base_mva;

  std::unordered_map<int, int> bus_index;
  int slack_count = 0;
  for (const auto& row : raw.bus_rows) {
    Bus bus;
    bus.id = static_cast<int>(row[BUS_I]);
    const int type = static_cast<int>(row[BUS_TYPE]);
    bus.kind = type == 3 ? BusKind::Slack : (type == 2 ? BusKind::Generator : BusKind::Load);
    bus.p_load = row[PD] / base;
    bus.q_load = row[QD] / base;
    bus.g_shunt = row[GS] / base;
    bus.b_shunt = row[BS] / base;
    bus.v_max = row[VMAX];
    bus.v_min = row[VMIN];
    if (!(bus.v_min > 0.0 && bus.v_min <= bus.v_max))
      throw std::invalid_argument(net.name + ": bad voltage bounds at bus " +
                                  std::to_string(bus.id));
    if (bus.kind == BusKind::Slack) {
      bus.theta_min = 0.0;
      bus.theta_max = 0.0;
      ++slack_count;
    } else {
      bus.theta_min = -kPi;
      bus.theta_max = kPi;
    }
    bus_index.emplace(bus.id, net.n_buses());
    net.buses.push_back(bus);
  }
  if (slack_count == 0) throw NoSlack(net.name + ": no slack bus");
  if (slack_count > 1) throw MultipleSlack(net.name + ": more than one slack bus");

  for (const auto& row : raw.branch_rows) {
    if (row[BR_STATUS] == 0.0) continue;  // out of service
    Branch br;
    br.id = net.n_branches();
    auto from = bus_index.find(static_cast<int>(row[F_BUS]));
    auto to = bus_index.find(static_cast<int>(row[T_BUS]));
    if (from == bus_index.end() || to == bus_index.end())
      throw MalformedFile(net.name + ": branch references unknown bus");
    br.from_bus = from->second;
    br.to_bus = to->second;
    br.r = row[BR_R];
    br.x = row[BR_X];
    if (br.x <= 0.0)
      throw NonPositiveReactance(net.name + ": branch " + std::to_string(br.id) +
                                 " has x <= 0");
    if (br.r < 0.0)
      throw std::invalid_argument(net.name + ": negative branch resistance");
    br.b_charge_send = row[BR_B] / 2.0;
    br.b_charge_recv = row[BR_B] / 2.0;
    br.tap = row[TAP] == 0.0 ? 1.0 : row[TAP];
    if (br.tap <= 0.0) throw std::invalid_argument(net.name + ": non-positive tap ratio");
    br.shift = row[SHIFT] * kDegToRad;
    br.rate = row[RATE_A] / base;  // 0 stays 0: unlimited

    // File angle limits are used only when they fit inside (-pi/2, pi/2);
    // MATPOWER's 0/0 and +-360 conventions mean "unconstrained".
    const double amin = row[ANGMIN] * kDegToRad;
    const double amax = row[ANGMAX] * kDegToRad;
    const bool usable = amin < amax && amin > -kPi / 2 && amax < kPi / 2 &&
                        !(row[ANGMIN] == 0.0 && row[ANGMAX] == 0.0);
    if (usable) {
      br.angle_min = amin;
      br.angle_max = amax;
    } else {
      br.angle_min = -kPi / 3;
      br.angle_max = kPi / 3;
    }

    // Fold the charging halves into the terminal bus shunts for the
    // balance equations.
    net.buses[br.from_bus].b_shunt += br.b_charge_send;
    net.buses[br.to_bus].b_shunt += br.b_charge_recv;

    net.branches.push_back(br);
  }

  const size_t n_gen_rows = raw.gen_rows.size();
  for (size_t i = 0; i < n_gen_rows; ++i) {
    const auto& row = raw.gen_rows[i];
    if (row[GEN_STATUS] <= 0.0) continue;
    Generator gen;
    auto at = bus_index.find(static_cast<int>(row[GEN_BUS]));
    if (at == bus_index.end())
      throw MalformedFile(net.name + ": generator references unknown bus");
    gen.bus = at->second;
    gen.p_max = row[PMAX] / base;
    gen.p_min = row[PMIN] / base;
    gen.q_max = row[QMAX] / base;
    gen.q_min = row[QMIN] / base;
    if (gen.p_min > gen.p_max || gen.q_min > gen.q_max)
      throw std::invalid_argument(net.name + ": empty generator range");

    // gencost row i belongs to gen row i (reactive cost rows, if any,
    // follow after all active rows and are ignored).
    const auto& cost = raw.gencost_rows[i];
    const int ncost = static_cast<int>(cost[3]);
    double c2 = 0.0, c1 = 0.0, c0 = 0.0;
    if (ncost >= 3) {
      c2 = cost[4];
      c1 = cost[5];
      c0 = cost[6];
    } else if (ncost == 2) {
      c1 = cost[4];
      c0 = cost[5];
    } else if (ncost == 1) {
      c0 = cost[4];
    }
    gen.cost_a = c2 * base * base;
    gen.cost_b = c1 * base;
    gen.cost_c = c0;
    if (gen.cost_a < 0.0)
      throw std::invalid_argument(net.name + ": concave generation cost");
    net.generators.push_back(gen);
  }

  if (!is_connected(net)) throw IslandedNetwork(net.name + ": network is not connected");
  return net;
}

Network scale_loads(const Network& net, double factor) {
  if (!(factor > 0.0)) throw NonPositiveFactor("load factor must be positive");
  Network scaled = net;
  for (auto& bus : scaled.buses) {
    bus.p_load *= factor;
    bus.q_load *= factor;
  }
  return scaled;
}

Incidence incidence(const Network& net) {
  const int n = net.n_buses();
  const int m = net.n_branches();
  Incidence inc;
  inc.a_plus.resize(n, m);
  inc.a_minus.resize(n, m);
  std::vector<Eigen::Triplet<double>> plus, minus;
  plus.reserve(2 * m);
  minus.reserve(m);
  for (const auto& br : net.branches) {
    plus.emplace_back(br.from_bus, br.id, 1.0);
    plus.emplace_back(br.to_bus, br.id, -1.0);
    minus.emplace_back(br.to_bus, br.id, -1.0);
  }
  inc.a_plus.setFromTriplets(plus.begin(), plus.end());
  inc.a_minus.setFromTriplets(minus.begin(), minus.end());
  return inc;
}

bool is_connected(const Network& net) {
  const int n = net.n_buses();
  if (n == 0) return false;
  std::vector<std::vector<int>> adj(n);
  for (const auto& br : net.branches) {
    adj[br.from_bus].push_back(br.to_bus);
    adj[br.to_bus].push_back(br.from_bus);
  }
  std::vector<bool> seen(n, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int count = 1;
  while (!frontier.empty()) {
    int at = frontier.front();
    frontier.pop();
    for (int next : adj[at]) {
      if (!seen[next]) {
        seen[next] = true;
        ++count;
        frontier.push(next);
      }
    }
  }
  return count == n;
}

}  // namespace socopf
