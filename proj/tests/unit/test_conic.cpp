#include <doctest.h>

#include "socopf/conic.hpp"
#include "socopf/matpower.hpp"
#include "socopf/network.hpp"
#include "socopf/socp_model.hpp"

using namespace socopf;

namespace {

Network case9() {
  static Network net =
      to_network(parse_matpower_file(std::string(SOCOPF_DATA_DIR) + "/case9.m"));
  return net;
}

}  // namespace

TEST_CASE("affine expressions evaluate") {
  AffineExpr e;
  e.terms = {{0, 2.0}, {2, -1.0}};
  e.constant = 0.5;
  Eigen::VectorXd x(3);
  x << 1.0, 10.0, 3.0;
  CHECK(e.eval(x) == doctest::Approx(2.0 - 3.0 + 0.5));
}

TEST_CASE("program dump is deterministic across rebuilds") {
  Network net = case9();
  auto [a, ma] = build_socp(net);
  auto [b, mb] = build_socp(net);
  CHECK(dump_program(a) == dump_program(b));
  CHECK(dump_program_json(a) == dump_program_json(b));
}

TEST_CASE("dump lists every structural section") {
  Network net = case9();
  auto [prog, map] = build_socp(net);
  std::string text = dump_program(prog);
  CHECK(text.find("vars 69") != std::string::npos);
  CHECK(text.find("equalities") != std::string::npos);
  CHECK(text.find("cones 18") != std::string::npos);  // two per line
  CHECK(text.find("boxes") != std::string::npos);
}

TEST_CASE("infeasible boxes are caught at build time") {
  Network net = case9();
  net.buses[3].v_min = 1.2;  // above v_max = 1.1
  CHECK_THROWS_AS(build_socp(net), InfeasibleBox);
}
