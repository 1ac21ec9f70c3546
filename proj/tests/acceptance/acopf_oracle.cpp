#include "acopf_oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace socopf::testing {

OracleResult brute_force_acopf(const Network& net, double resolution) {
  if (net.n_buses() != 2 || net.n_branches() != 1 || net.n_generators() != 1)
    throw std::invalid_argument("oracle handles 2-bus, 1-line, 1-generator instances");
  const Bus& load_bus = net.buses[1];
  const Branch& br = net.branches[0];
  const Generator& gen = net.generators[0];
  if (br.from_bus != 0 || br.to_bus != 1 || br.b_charge_send != 0.0 || br.tap != 1.0)
    throw std::invalid_argument("oracle expects a bare series line from bus 1 to bus 2");

  // exact series-element power flow for V1 = v1<0, V2 = v2<-theta
  const double denom = br.r * br.r + br.x * br.x;
  const double g = br.r / denom;
  const double b = -br.x / denom;

  // A true feasible point sits within half a grid step per axis of some
  // grid point; bound the balance drift across that box and accept grid
  // points whose mismatch stays inside it.
  const double vmax = std::max(net.buses[0].v_max, load_bus.v_max);
  const double lip_v = (std::abs(g) + std::abs(b)) * 3.0 * vmax;   // per voltage axis
  const double lip_t = (std::abs(g) + std::abs(b)) * vmax * vmax;  // per angle axis
  const double accept_tol = (2.0 * lip_v + lip_t) * resolution / 2.0;

  OracleResult best;
  best.objective = std::numeric_limits<double>::infinity();

  const int n_theta = static_cast<int>((br.angle_max - br.angle_min) / resolution) + 1;
  const int n_v1 =
      static_cast<int>((net.buses[0].v_max - net.buses[0].v_min) / resolution) + 1;
  const int n_v2 = static_cast<int>((load_bus.v_max - load_bus.v_min) / resolution) + 1;

  for (int it = 0; it < n_theta; ++it) {
    const double theta = br.angle_min + it * resolution;
    const double ct = std::cos(theta), st = std::sin(theta);
    for (int i1 = 0; i1 < n_v1; ++i1) {
      const double v1 = net.buses[0].v_min + i1 * resolution;
      for (int i2 = 0; i2 < n_v2; ++i2) {
        const double v2 = load_bus.v_min + i2 * resolution;
        const double cross = v1 * v2;
        // power leaving bus 2 into the line must equal minus the load
        const double p_out2 = g * (v2 * v2 - cross * ct) + b * cross * st;
        const double q_out2 = -b * v2 * v2 + b * cross * ct + g * cross * st;
        if (std::abs(p_out2 + load_bus.p_load) > accept_tol) continue;
        if (std::abs(q_out2 + load_bus.q_load) > accept_tol) continue;
        // sending-end injection is the generator dispatch
        const double p_g = g * (v1 * v1 - cross * ct) - b * cross * st;
        const double q_g = -b * v1 * v1 + b * cross * ct - g * cross * st;
        if (p_g < gen.p_min || p_g > gen.p_max) continue;
        if (q_g < gen.q_min || q_g > gen.q_max) continue;
        const double cost = gen.cost_a * p_g * p_g + gen.cost_b * p_g + gen.cost_c;
        if (cost < best.objective) {
          best.objective = cost;
          best.v1 = v1;
          best.v2 = v2;
          best.theta = theta;
          best.feasible = true;
        }
      }
    }
  }
  if (best.feasible) {
    // the accepted band lets the oracle shed up to accept_tol of load;
    // translate that into an objective error bound at the incumbent
    const double p_at_best =
        g * (best.v1 * best.v1 - best.v1 * best.v2 * std::cos(best.theta)) -
        b * best.v1 * best.v2 * std::sin(best.theta);
    const double dcost_dp = std::abs(2.0 * gen.cost_a * p_at_best + gen.cost_b);
    best.grid_error = 2.0 * dcost_dp * accept_tol;
  }
  return best;
}

}  // namespace socopf::testing
