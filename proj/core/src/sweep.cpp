#include "socopf/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>
#include <thread>

#include "socopf/feasibility.hpp"
#include "socopf/version.hpp"

namespace socopf {
namespace {

std::string rfc3339_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<double> default_load_grid() {
  std::vector<double> grid;
  for (int pct = 5; pct <= 100; pct += 5) grid.push_back(pct / 100.0);
  return grid;
}

LoadSweepResult sweep_load(const std::vector<Network>& cases,
                           const std::vector<double>& load_grid, double xi,
                           const SolverOptions& solver_opts, int threads) {
  LoadSweepResult result;
  const int n_rows = static_cast<int>(load_grid.size());
  const int n_cols = static_cast<int>(cases.size());
  auto init_table = [&](SweepTable& t, const char* metric) {
    t.load_levels = load_grid;
    for (const auto& net : cases) t.case_names.push_back(net.name);
    t.cells.assign(n_rows, std::vector<std::optional<double>>(n_cols));
    t.xi = xi;
    t.metric = metric;
    t.timestamp = rfc3339_now();
    t.solves_attempted = n_rows * n_cols;
  };
  init_table(result.active, "gap_po_max");
  init_table(result.reactive, "gap_qo_max");

  std::atomic<int> next{0};
  std::atomic<int> failed{0};
  const int total = n_rows * n_cols;
  auto worker = [&] {
    for (;;) {
      const int cell = next.fetch_add(1);
      if (cell >= total) return;
      const int row = cell / n_cols;
      const int col = cell % n_cols;
      try {
        Network net = scale_loads(cases[col], load_grid[row]);
        auto [prog, map] = build_socp(net, PenaltySpec{xi, PenaltyTarget::ReactiveLoss});
        SolverResult sr = solve(prog, solver_opts);
        if (sr.status != SolveStatus::Optimal) {
          failed.fetch_add(1);
          continue;
        }
        OpfSolution sol = extract_solution(sr.x, map, net);
        GapReport report = line_gaps(sol, net);
        result.active.cells[row][col] = report.gap_po_max;
        result.reactive.cells[row][col] = report.gap_qo_max;
      } catch (const std::exception&) {
        failed.fetch_add(1);
      }
    }
  };

  const int n_workers = std::clamp(threads, 1, std::max(1, total));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  result.active.solves_failed = failed.load();
  result.reactive.solves_failed = failed.load();
  return result;
}

std::string format_gap(double value) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%.2E", value);
  return buf;
}

std::string sweep_table_csv(const SweepTable& table) {
  std::ostringstream out;
  out << "# metric=" << table.metric << " xi=" << table.xi << " gap_tol=" << table.gap_tol
      << " units=" << (table.units == UnitMode::PerUnit ? "pu" : "mva")
      << " version=" << kVersion << " generated=" << table.timestamp << "\n";
  out << "load_pct";
  for (const auto& name : table.case_names) out << "," << name;
  out << "\n";
  for (size_t row = 0; row < table.load_levels.size(); ++row) {
    char pct[24];
    std::snprintf(pct, sizeof(pct), "%g", table.load_levels[row] * 100.0);
    out << pct;
    for (size_t col = 0; col < table.case_names.size(); ++col) {
      const auto& cell = table.cells[row][col];
      out << ",";
      out << (cell.has_value() ? format_gap(*cell) : std::string("FAILED"));
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace socopf
