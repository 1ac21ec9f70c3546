#pragma once

#include <Eigen/SparseCore>
#include <stdexcept>
#include <string>
#include <vector>

namespace socopf {

/// One linear term coef * x[var].
struct Coefficient {
  int var = 0;
  double coef = 0.0;
};

/// Sparse affine expression sum_i coef_i * x[var_i] + constant.
struct AffineExpr {
  std::vector<Coefficient> terms;
  double constant = 0.0;

  double eval(const Eigen::VectorXd& x) const;
};

/// Rotated second-order cone 2 u v >= |w|^2, u >= 0, v >= 0 over affine
/// expressions of the program variables.
struct RotatedConeBlock {
  AffineExpr u;
  AffineExpr v;
  std::vector<AffineExpr> w;
};

/// Quadratic-objective conic program in standard form:
///   minimize    sum_i curvature_i x_i^2 + linear_cost' x + constant_cost
///   subject to  eq_matrix x = eq_rhs
///               ineq_matrix x <= ineq_rhs
///               lower <= x <= upper          (+-inf where absent)
///               every RotatedConeBlock holds
struct ConicProgram {
  int n_vars = 0;
  Eigen::VectorXd curvature;
  Eigen::VectorXd linear_cost;
  double constant_cost = 0.0;
  Eigen::SparseMatrix<double> eq_matrix;
  Eigen::VectorXd eq_rhs;
  Eigen::SparseMatrix<double> ineq_matrix;
  Eigen::VectorXd ineq_rhs;
  std::vector<RotatedConeBlock> cones;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  double objective(const Eigen::VectorXd& x) const;
  int n_eq() const { return static_cast<int>(eq_matrix.rows()); }
  int n_ineq() const { return static_cast<int>(ineq_matrix.rows()); }
};

struct InfeasibleBox : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solver-independent plain-text dump (objective, rows, cones, boxes),
/// deterministic for identical programs.
std::string dump_program(const ConicProgram& prog);

/// Same content as JSON.
std::string dump_program_json(const ConicProgram& prog);

}  // namespace socopf
