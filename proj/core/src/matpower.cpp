#include "socopf/matpower.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace socopf {
namespace {

// Strips '%' comments and carriage returns, keeping line structure.
std::string strip_comments(std::istream& in) {
  std::string out;
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find('%');
    if (pos != std::string::npos) line.erase(pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    out += line;
    out += '\n';
  }
  return out;
}

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Parses whitespace/';'-separated rows of doubles until ']'.
std::vector<std::vector<double>> parse_matrix(const std::string& text, size_t& pos,
                                              const std::string& what) {
  std::vector<std::vector<double>> rows;
  std::vector<double> row;
  auto flush_row = [&] {
    if (!row.empty()) {
      rows.push_back(row);
      row.clear();
    }
  };
  while (pos < text.size()) {
    char c = text[pos];
    if (c == ']') {
      ++pos;
      flush_row();
      if (!rows.empty()) {
        size_t ncols = rows.front().size();
        for (const auto& r : rows) {
          if (r.size() != ncols)
            throw MalformedFile(what + ": ragged matrix rows");
        }
      }
      return rows;
    }
    if (c == ';' || c == '\n') {
      ++pos;
      flush_row();
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      ++pos;
      continue;
    }
    const char* start = text.c_str() + pos;
    char* end = nullptr;
    double value = std::strtod(start, &end);
    if (end == start) throw MalformedFile(what + ": unparseable token in matrix");
    row.push_back(value);
    pos += static_cast<size_t>(end - start);
  }
  throw MalformedFile(what + ": missing closing ']'");
}

double parse_scalar(const std::string& text, size_t& pos, const std::string& what) {
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  const char* start = text.c_str() + pos;
  char* end = nullptr;
  double value = std::strtod(start, &end);
  if (end == start) throw MalformedFile(what + ": expected a number");
  pos += static_cast<size_t>(end - start);
  return value;
}

}  // namespace

RawCase parse_matpower(std::istream& text, const std::string& name) {
  const std::string src = strip_comments(text);
  RawCase raw;
  raw.name = name;
  bool saw_base = false, saw_bus = false, saw_gen = false, saw_branch = false,
       saw_gencost = false;

  size_t pos = 0;
  while (pos < src.size()) {
    if (!is_ident_char(src[pos])) {
      ++pos;
      continue;
    }
    size_t start = pos;
    while (pos < src.size() && (is_ident_char(src[pos]) || src[pos] == '.')) ++pos;
    std::string ident = src.substr(start, pos - start);
    auto dot = ident.rfind('.');
    std::string field = (dot == std::string::npos) ? ident : ident.substr(dot + 1);

    size_t look = pos;
    while (look < src.size() && std::isspace(static_cast<unsigned char>(src[look]))) ++look;
    if (look >= src.size() || src[look] != '=') continue;
    ++look;
    while (look < src.size() && std::isspace(static_cast<unsigned char>(src[look]))) ++look;

    if (field == "baseMVA") {
      pos = look;
      raw.base_mva = parse_scalar(src, pos, "baseMVA");
      saw_base = true;
    } else if (field == "bus" || field == "gen" || field == "branch" || field == "gencost") {
      if (look >= src.size() || src[look] != '[') continue;  // not a matrix assignment
      pos = look + 1;
      auto rows = parse_matrix(src, pos, field);
      if (field == "bus") {
        raw.bus_rows = std::move(rows);
        saw_bus = true;
      } else if (field == "gen") {
        raw.gen_rows = std::move(rows);
        saw_gen = true;
      } else if (field == "branch") {
        raw.branch_rows = std::move(rows);
        saw_branch = true;
      } else {
        raw.gencost_rows = std::move(rows);
        saw_gencost = true;
      }
    }
  }

  if (!saw_base) throw MissingSection(name + ": no baseMVA");
  if (!saw_bus || raw.bus_rows.empty()) throw MissingSection(name + ": no bus data");
  if (!saw_gen || raw.gen_rows.empty()) throw MissingSection(name + ": no gen data");
  if (!saw_branch || raw.branch_rows.empty()) throw MissingSection(name + ": no branch data");
  if (!saw_gencost || raw.gencost_rows.empty()) throw MissingSection(name + ": no gencost data");

  if (raw.base_mva <= 0.0) throw MalformedFile(name + ": baseMVA must be positive");
  if (raw.bus_rows.front().size() < 13) throw MalformedFile(name + ": bus matrix needs >= 13 columns");
  if (raw.gen_rows.front().size() < 10) throw MalformedFile(name + ": gen matrix needs >= 10 columns");
  if (raw.branch_rows.front().size() < 13)
    throw MalformedFile(name + ": branch matrix needs >= 13 columns");
  if (raw.gencost_rows.front().size() < 4)
    throw MalformedFile(name + ": gencost matrix needs >= 4 columns");

  const size_t n_gen = raw.gen_rows.size();
  if (raw.gencost_rows.size() != n_gen && raw.gencost_rows.size() != 2 * n_gen)
    throw MalformedFile(name + ": gencost row count does not match gen");

  for (const auto& row : raw.gencost_rows) {
    if (row[0] == 1.0) throw UnsupportedCost(name + ": piecewise-linear gencost");
    if (row[0] != 2.0) throw UnsupportedCost(name + ": unknown gencost model");
    if (row[3] > 3.0) throw UnsupportedCost(name + ": polynomial cost degree > 2");
  }

  return raw;
}

RawCase parse_matpower_string(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  return parse_matpower(in, name);
}

RawCase parse_matpower_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedFile("cannot open case file: " + path);
  auto slash = path.find_last_of("/\\");
  std::string base = (slash == std::string::npos) ? path : path.substr(slash + 1);
  auto ext = base.rfind('.');
  if (ext != std::string::npos) base.erase(ext);
  return parse_matpower(in, base);
}

}  // namespace socopf
