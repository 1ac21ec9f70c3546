#include "socopf/conic.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace socopf {
namespace {

void append_expr(std::ostringstream& out, const AffineExpr& e) {
  for (const auto& t : e.terms) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%+.17g*x%d ", t.coef, t.var);
    out << buf;
  }
  if (e.constant != 0.0 || e.terms.empty()) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%+.17g", e.constant);
    out << buf;
  }
}

nlohmann::json expr_json(const AffineExpr& e) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : e.terms) terms.push_back({t.var, t.coef});
  return {{"terms", terms}, {"constant", e.constant}};
}

void append_rows(std::ostringstream& out, const Eigen::SparseMatrix<double>& m,
                 const Eigen::VectorXd& rhs, const char* rel) {
  // row-wise listing for diffing; matrix is column-major so gather first
  std::vector<std::vector<std::pair<int, double>>> rows(m.rows());
  for (int j = 0; j < m.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, j); it; ++it)
      rows[it.row()].emplace_back(j, it.value());
  for (int i = 0; i < m.rows(); ++i) {
    out << "  ";
    for (auto& [var, coef] : rows[i]) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%+.17g*x%d ", coef, var);
      out << buf;
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s %.17g\n", rel, rhs[i]);
    out << buf;
  }
}

}  // namespace

double AffineExpr::eval(const Eigen::VectorXd& x) const {
  double value = constant;
  for (const auto& t : terms) value += t.coef * x[t.var];
  return value;
}

double ConicProgram::objective(const Eigen::VectorXd& x) const {
  double value = constant_cost + linear_cost.dot(x);
  for (int i = 0; i < n_vars; ++i) value += curvature[i] * x[i] * x[i];
  return value;
}

std::string dump_program(const ConicProgram& prog) {
  std::ostringstream out;
  out << "vars " << prog.n_vars << "\n";
  out << "objective\n";
  for (int i = 0; i < prog.n_vars; ++i) {
    if (prog.curvature[i] != 0.0 || prog.linear_cost[i] != 0.0) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "  x%d: quad %.17g lin %.17g\n", i, prog.curvature[i],
                    prog.linear_cost[i]);
      out << buf;
    }
  }
  char cbuf[48];
  std::snprintf(cbuf, sizeof(cbuf), "  const %.17g\n", prog.constant_cost);
  out << cbuf;
  out << "equalities " << prog.n_eq() << "\n";
  append_rows(out, prog.eq_matrix, prog.eq_rhs, "=");
  out << "inequalities " << prog.n_ineq() << "\n";
  append_rows(out, prog.ineq_matrix, prog.ineq_rhs, "<=");
  out << "cones " << prog.cones.size() << "\n";
  for (const auto& cone : prog.cones) {
    out << "  u: ";
    append_expr(out, cone.u);
    out << " | v: ";
    append_expr(out, cone.v);
    for (size_t k = 0; k < cone.w.size(); ++k) {
      out << " | w" << k << ": ";
      append_expr(out, cone.w[k]);
    }
    out << "\n";
  }
  out << "boxes\n";
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < prog.n_vars; ++i) {
    if (prog.lower[i] != -inf || prog.upper[i] != inf) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "  x%d in [%.17g, %.17g]\n", i, prog.lower[i],
                    prog.upper[i]);
      out << buf;
    }
  }
  return out.str();
}

std::string dump_program_json(const ConicProgram& prog) {
  nlohmann::json j;
  j["n_vars"] = prog.n_vars;
  j["curvature"] = std::vector<double>(prog.curvature.begin(), prog.curvature.end());
  j["linear_cost"] = std::vector<double>(prog.linear_cost.begin(), prog.linear_cost.end());
  j["constant_cost"] = prog.constant_cost;
  auto matrix_json = [](const Eigen::SparseMatrix<double>& m, const Eigen::VectorXd& rhs) {
    nlohmann::json rows = nlohmann::json::array();
    std::vector<std::vector<std::pair<int, double>>> gathered(m.rows());
    for (int jcol = 0; jcol < m.outerSize(); ++jcol)
      for (Eigen::SparseMatrix<double>::InnerIterator it(m, jcol); it; ++it)
        gathered[it.row()].emplace_back(jcol, it.value());
    for (int i = 0; i < m.rows(); ++i) {
      nlohmann::json terms = nlohmann::json::array();
      for (auto& [var, coef] : gathered[i]) terms.push_back({var, coef});
      rows.push_back({{"terms", terms}, {"rhs", rhs[i]}});
    }
    return rows;
  };
  j["equalities"] = matrix_json(prog.eq_matrix, prog.eq_rhs);
  j["inequalities"] = matrix_json(prog.ineq_matrix, prog.ineq_rhs);
  nlohmann::json cones = nlohmann::json::array();
  for (const auto& cone : prog.cones) {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& e : cone.w) w.push_back(expr_json(e));
    cones.push_back({{"u", expr_json(cone.u)}, {"v", expr_json(cone.v)}, {"w", w}});
  }
  j["cones"] = cones;
  nlohmann::json boxes = nlohmann::json::array();
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < prog.n_vars; ++i) {
    nlohmann::json box;
    box["var"] = i;
    if (prog.lower[i] != -inf) box["lower"] = prog.lower[i];
    if (prog.upper[i] != inf) box["upper"] = prog.upper[i];
    if (box.size() > 1) boxes.push_back(box);
  }
  j["boxes"] = boxes;
  return j.dump(2);
}

}  // namespace socopf
