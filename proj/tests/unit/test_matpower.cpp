#include <doctest.h>

#include <fstream>
#include <sstream>

#include "socopf/matpower.hpp"

using namespace socopf;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(SOCOPF_DATA_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kTinyCase = R"(
function mpc = tiny
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0  0  0 0 1 1 0 135 1 1.1 0.9;
  2 1 50 20 0 0 1 1 0 135 1 1.1 0.9;
];
mpc.gen = [
  1 0 0 300 -300 1 100 1 250 10 0 0 0 0 0 0 0 0 0 0 0;
];
mpc.branch = [
  1 2 0.01 0.1 0 250 250 250 0 0 1 -360 360;
];
mpc.gencost = [
  2 0 0 3 0.1 5 100;
];
)";

}  // namespace

TEST_CASE("shipped case9 parses with the published dimensions") {
  RawCase raw = parse_matpower_file(std::string(SOCOPF_DATA_DIR) + "/case9.m");
  CHECK(raw.base_mva == 100.0);
  CHECK(raw.bus_rows.size() == 9);
  CHECK(raw.branch_rows.size() == 9);
  CHECK(raw.gen_rows.size() == 3);
  CHECK(raw.gencost_rows.size() == 3);
  CHECK(raw.name == "case9");
}

TEST_CASE("inline comments are transparent") {
  const std::string text = read_fixture("case9.m");
  RawCase plain = parse_matpower_string(text, "case9");
  // splice a comment into the middle of the bus matrix
  auto pos = text.find("2	2");
  REQUIRE(pos != std::string::npos);
  std::string commented = text;
  commented.insert(pos, "% a comment inside the matrix\n\t");
  RawCase with_comment = parse_matpower_string(commented, "case9");
  CHECK(plain.bus_rows == with_comment.bus_rows);
  CHECK(plain.branch_rows == with_comment.branch_rows);
  CHECK(plain.gen_rows == with_comment.gen_rows);
  CHECK(plain.gencost_rows == with_comment.gencost_rows);
}

TEST_CASE("empty branch matrix is a missing section") {
  std::string text(kTinyCase);
  auto pos = text.find("mpc.branch = [");
  text.replace(pos, text.find("];", pos) + 2 - pos, "mpc.branch = [\n];");
  CHECK_THROWS_AS(parse_matpower_string(text, "tiny"), MissingSection);
}

TEST_CASE("absent gen section is a missing section") {
  std::string text(kTinyCase);
  auto pos = text.find("mpc.gen = [");
  text.erase(pos, text.find("];", pos) + 2 - pos);
  CHECK_THROWS_AS(parse_matpower_string(text, "tiny"), MissingSection);
}

TEST_CASE("garbage inside a matrix is malformed") {
  std::string text(kTinyCase);
  auto pos = text.find("0.01 0.1");
  text.replace(pos, 4, "oops");
  CHECK_THROWS_AS(parse_matpower_string(text, "tiny"), MalformedFile);
}

TEST_CASE("unterminated matrix is malformed") {
  std::string text(kTinyCase);
  auto pos = text.find("];", text.find("mpc.gencost"));
  text.erase(pos);
  CHECK_THROWS_AS(parse_matpower_string(text, "tiny"), MalformedFile);
}

TEST_CASE("ragged matrix rows are malformed") {
  std::string text(kTinyCase);
  auto pos = text.find("2 1 50 20 0 0 1 1 0 135 1 1.1 0.9;");
  text.insert(pos + 34, "\n  3 1 10;");
  CHECK_THROWS_AS(parse_matpower_string(text, "tiny"), MalformedFile);
}

TEST_CASE("piecewise-linear gencost is unsupported") {
  std::string text(kTinyCase);
  auto pos = text.find("2 0 0 3 0.1 5 100;");
  text.replace(pos, 18, "1 0 0 2 0 0 250 625;");
  CHECK_THROWS_AS(parse_matpower_string(text, "tiny"), UnsupportedCost);
}

TEST_CASE("cubic polynomial cost is unsupported") {
  std::string text(kTinyCase);
  auto pos = text.find("2 0 0 3 0.1 5 100;");
  text.replace(pos, 18, "2 0 0 4 0.001 0.1 5 100;");
  CHECK_THROWS_AS(parse_matpower_string(text, "tiny"), UnsupportedCost);
}

TEST_CASE("tiny case round-trips numbers verbatim") {
  RawCase raw = parse_matpower_string(kTinyCase, "tiny");
  CHECK(raw.bus_rows[1][2] == 50.0);
  CHECK(raw.branch_rows[0][3] == 0.1);
  CHECK(raw.gencost_rows[0][4] == 0.1);
}
