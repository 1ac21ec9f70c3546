#pragma once

#include <Eigen/SparseCore>
#include <stdexcept>
#include <string>
#include <vector>

#include "socopf/matpower.hpp"

namespace socopf {

enum class BusKind { Slack, Generator, Load };

/// Per-unit bus. Line charging is folded into b_shunt for the balance
/// equations; the charging halves stay on Branch for the ampacity bound.
struct Bus {
  int id = 0;  // external bus number from the case file
  BusKind kind = BusKind::Load;
  double p_load = 0.0;
  double q_load = 0.0;
  double g_shunt = 0.0;
  double b_shunt = 0.0;
  double v_min = 0.0;
  double v_max = 0.0;
  double theta_min = 0.0;  // rad
  double theta_max = 0.0;  // rad
};

struct Branch {
  int id = 0;        // 0-based line index
  int from_bus = 0;  // internal bus index (sending end)
  int to_bus = 0;    // internal bus index (receiving end)
  double r = 0.0;
  double x = 0.0;
  double b_charge_send = 0.0;  // half of total line charging
  double b_charge_recv = 0.0;
  double tap = 1.0;
  double shift = 0.0;  // rad
  double rate = 0.0;   // p.u. apparent power; 0 = unlimited
  double angle_min = 0.0;
  double angle_max = 0.0;
};

struct Generator {
  int bus = 0;  // internal bus index
  double p_min = 0.0, p_max = 0.0;
  double q_min = 0.0, q_max = 0.0;
  double cost_a = 0.0;  // $/h per p.u.^2
  double cost_b = 0.0;  // $/h per p.u.
  double cost_c = 0.0;  // $/h
};

struct Network {
  std::string name;
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;

  int n_buses() const { return static_cast<int>(buses.size()); }
  int n_branches() const { return static_cast<int>(branches.size()); }
  int n_generators() const { return static_cast<int>(generators.size()); }
  int slack_bus() const;  // internal index of the unique slack bus
};

/// Node-to-branch incidence. Per line column: a_plus holds +1 at the
/// sending end and -1 at the receiving end; a_minus holds -1 at the
/// receiving end only.
struct Incidence {
  Eigen::SparseMatrix<double> a_plus;
  Eigen::SparseMatrix<double> a_minus;
};

struct IslandedNetwork : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoSlack : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MultipleSlack : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonPositiveReactance : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonPositiveFactor : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Converts a RawCase to a validated per-unit Network. Out-of-service
/// branches and generators are dropped; cost coefficients are rebased to
/// $/h with power in p.u.
Network to_network(const RawCase& raw);

/// Returns a copy with every nodal load multiplied by factor.
Network scale_loads(const Network& net, double factor);

Incidence incidence(const Network& net);

/// True when the in-service branch graph connects all buses.
bool is_connected(const Network& net);

}  // namespace socopf
