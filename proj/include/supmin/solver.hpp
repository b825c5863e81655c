#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "supmin/energy.hpp"
#include "supmin/lagrangian.hpp"
#include "supmin/path.hpp"

namespace supmin {

struct SolveOptions {
  int max_iters = 2000;
  double grad_tol = 1e-8;
  double initial_step = 1.0;
  double backtrack = 0.5;
  double sufficient_decrease = 1e-4;
  int history = 10;
  int max_backtracks = 60;

  void validate() const;
};

struct SolveStats {
  int iterations = 0;
  double grad_inf_norm = 0.0;
  double objective = 0.0;
  bool converged = false;           // grad_inf_norm < grad_tol
  bool line_search_failed = false;  // best iterate returned
  bool stagnated = false;  // f stopped changing before grad_tol was met
};

struct SolveResult {
  Path path;
  SolveStats stats;
};

/// Minimizes the normalized m-energy over paths whose end values are
/// pinned to b(a), b(b), starting from `init` (end values overwritten).
SolveResult minimize_power(const LagrangianModel& model, const Grid& grid,
                           const AffineMap& b, int m, const Path& init,
                           const SolveOptions& opts,
                           Exec exec = Exec::kParallel);

struct SweepSchedule {
  int m_start = 2;
  int factor = 2;
  int m_max = 1024;
  double tol_sweep = 1e-4;

  void validate() const;
};

struct SweepRecord {
  int m = 0;
  Path path;
  double normalized_root = 0.0;
  SolveStats stats;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  std::vector<double> C_sequence;
  Path candidate;
  double sup_of_candidate = 0.0;
  bool aborted = false;
  std::string failure;  // set when aborted
};

/// Geometric m-sweep with warm starts, stopping at m_max or when the
/// normalized root stalls.
SweepResult m_sweep(const LagrangianModel& model, const Grid& grid,
                    const AffineMap& b, const SweepSchedule& schedule,
                    const SolveOptions& opts, Exec exec = Exec::kParallel);

/// Same, starting from a given initial path.
SweepResult m_sweep_from(const LagrangianModel& model, const Grid& grid,
                         const AffineMap& b, const SweepSchedule& schedule,
                         const SolveOptions& opts, const Path& init,
                         Exec exec = Exec::kParallel);

struct MultiStartResult {
  std::vector<SweepResult> runs;
  std::size_t best_index = 0;
  std::vector<double> sups;  // one per start, start 0 is the affine guess
  /// Starts whose sup ties with the best but whose path differs.
  std::vector<std::size_t> alternatives;

  [[nodiscard]] const SweepResult& best() const { return runs[best_index]; }
};

/// Start 0 is the affine interpolant; starts 1..restarts add seeded
/// random interior perturbations.
MultiStartResult multi_start_sweep(const LagrangianModel& model,
                                   const Grid& grid, const AffineMap& b,
                                   const SweepSchedule& schedule,
                                   const SolveOptions& opts, int restarts,
                                   std::uint64_t seed,
                                   Exec exec = Exec::kParallel);

}  // namespace supmin
