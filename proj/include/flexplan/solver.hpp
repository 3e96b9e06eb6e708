#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flexplan/conic_program.hpp"

namespace flexplan {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterLimit };

std::string to_string(SolveStatus s);

struct IterInfo {
  double pcost = 0.0;
  double dcost = 0.0;
  double gap = 0.0;
  double pres = 0.0;
  double dres = 0.0;
  double mu = 0.0;
  double step = 0.0;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::IterLimit;
  std::vector<double> x;  // primal point in program variable order
  double objective = 0.0;
  // duals in program order; empty for rows eliminated by fixings
  std::vector<double> dual_rows;
  std::vector<std::vector<double>> dual_socs;
  std::vector<std::vector<double>> dual_rsocs;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  std::vector<IterInfo> history;
  std::string message;

  // branch-and-bound extras
  double best_bound = 0.0;
  double mip_gap = 0.0;
  long nodes = 0;
};

struct ContinuousSettings {
  double tol = 1e-8;        // feasibility and relative-gap tolerance
  int max_iters = 200;
  double static_reg = 1e-10;
  int refine_steps = 2;
  int equilibrate_iters = 3;
  bool record_history = true;
};

struct BranchBoundParams {
  double rel_gap = 1e-6;
  double abs_gap = 1e-9;
  long node_limit = 200000;
  double time_limit_sec = 1e9;
  double int_tol = 1e-6;
  std::uint64_t seed = 0;  // recorded for provenance; the search itself is deterministic
  ContinuousSettings relax;

  void validate() const;
};

/// Pinned variable values used by the branch-and-bound overlay; also handy to
/// solve a program with a frozen binary pattern.
using Fixings = std::vector<std::pair<int, double>>;

/// Interior-point solve of the continuous relaxation (integrality dropped).
ConicSolution solve_continuous(const ConicProgram& p, const ContinuousSettings& settings = {},
                               const Fixings& fixings = {});

/// Branch-and-bound over the continuous conic solver: most-fractional
/// branching, best-bound node selection, deterministic in single-thread mode.
ConicSolution solve_misocp(const ConicProgram& p, const BranchBoundParams& bb = {});

/// Minimal 2-norm projection of x onto the equality face implied by the
/// program's equality rows, the given fixings, and the big-M product links
/// evaluated at the (rounded) bit values. Run on integer-feasible incumbents
/// so that balances hold to solver-independent precision.
void polish_equalities(const ConicProgram& p, const Fixings& fixings, std::vector<double>* x);

struct ViolationEntry {
  std::string kind;  // "row", "soc", "rsoc", "bound", "integrality"
  int index = 0;
  std::string tag;
  double violation = 0.0;
};

struct FeasibilityReport {
  bool feasible = false;
  double max_violation = 0.0;
  std::vector<ViolationEntry> entries;  // all checked items, violation >= 0
};

/// Per-row / per-cone violation magnitudes of a candidate point.
FeasibilityReport verify_point(const ConicProgram& p, const std::vector<double>& x,
                               double tol = 1e-8);

/// Writes the solution as "name,value" CSV plus a status record; `load`
/// inverts it against a program with matching variable names.
void write_solution_csv(const ConicProgram& p, const ConicSolution& sol, const std::string& path,
                        const std::string& provenance);
std::vector<double> load_solution_csv(const ConicProgram& p, const std::string& path);

}  // namespace flexplan
