#pragma once

#include <optional>
#include <string>
#include <vector>

#include "socopf/network.hpp"
#include "socopf/solver.hpp"
#include "socopf/socp_model.hpp"

namespace socopf {

enum class UnitMode { PerUnit, Mva };

/// Load-sweep result grid: one row per load level, one column per case.
/// Empty cells mark failed solves.
struct SweepTable {
  std::vector<double> load_levels;     // factors, e.g. 0.05 .. 1.00
  std::vector<std::string> case_names;
  std::vector<std::vector<std::optional<double>>> cells;  // [row][col]
  double xi = 0.0;
  double gap_tol = 1e-6;
  UnitMode units = UnitMode::PerUnit;
  std::string metric;     // "gap_po_max" or "gap_qo_max"
  std::string timestamp;  // RFC3339, recorded when the sweep ran
  int solves_attempted = 0;
  int solves_failed = 0;
};

struct LoadSweepResult {
  SweepTable active;    // gap_po_max per cell
  SweepTable reactive;  // gap_qo_max per cell
};

/// Default 5%..100% grid in 5% steps (20 levels, the four-table layout).
std::vector<double> default_load_grid();

/// Solves every (case, load level) cell with the given penalty and fills
/// both gap tables. Cells of failed solves stay empty and the sweep
/// continues. threads <= 1 runs sequentially; cells are independent.
LoadSweepResult sweep_load(const std::vector<Network>& cases,
                           const std::vector<double>& load_grid, double xi,
                           const SolverOptions& solver_opts = {}, int threads = 1);

/// CSV with a leading metadata comment line (tolerance, xi, units,
/// version, timestamp), a header row, and one row per load level.
/// Gap cells use scientific notation with 3 significant digits; failed
/// cells hold "FAILED".
std::string sweep_table_csv(const SweepTable& table);

/// Formats one gap value the way the result tables do, e.g. "3.24E-02".
std::string format_gap(double value);

}  // namespace socopf
