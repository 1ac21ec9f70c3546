#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace socopf {

/// Raw numeric matrices of a MATPOWER case file, exactly as read.
struct RawCase {
  std::string name;
  double base_mva = 0.0;
  std::vector<std::vector<double>> bus_rows;
  std::vector<std::vector<double>> gen_rows;
  std::vector<std::vector<double>> branch_rows;
  std::vector<std::vector<double>> gencost_rows;
};

struct MalformedFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingSection : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedCost : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses MATPOWER `.m` case text (baseMVA, bus, gen, branch, gencost
/// matrices). Comments and unknown assignments are ignored.
RawCase parse_matpower(std::istream& text, const std::string& name = "case");
RawCase parse_matpower_string(const std::string& text, const std::string& name = "case");
RawCase parse_matpower_file(const std::string& path);

}  // namespace socopf
