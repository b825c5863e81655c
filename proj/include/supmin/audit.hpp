#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "supmin/energy.hpp"
#include "supmin/lagrangian.hpp"
#include "supmin/path.hpp"
#include "supmin/solver.hpp"

namespace supmin {

struct AuditConfig {
  int num_subintervals = 20;
  int min_elements = 3;
  std::uint64_t seed = 0;
  SweepSchedule schedule;
  SolveOptions solve;
  double tol_audit = 1e-3;

  void validate() const;
};

struct AuditEntry {
  double alpha = 0.0;
  double beta = 0.0;
  int first_node = 0;
  int last_node = 0;
  double sup_global_restricted = 0.0;
  double sup_local_solution = 0.0;
  double deficit = 0.0;
  bool violation = false;
  bool inconclusive = false;
  std::string message;
};

struct AuditReport {
  std::vector<AuditEntry> entries;
  std::vector<std::size_t> violations;  // indices into entries
  std::size_t inconclusive = 0;
  double max_deficit = 0.0;
  double tol_audit = 0.0;
};

/// Seeded node pairs (i, j) with j - i >= min_elements.
std::vector<std::pair<int, int>> sample_subintervals(const Grid& grid,
                                                     const AuditConfig& config);

/// Re-solves the sweep on random subintervals against the candidate's own
/// boundary values and compares sup energies. A deficit beyond
/// tol_audit (1 + sup) refutes absolute minimality.
AuditReport audit_absolute_minimality(const LagrangianModel& model,
                                      const Path& candidate,
                                      const AuditConfig& config,
                                      Exec exec = Exec::kParallel);

/// Cheap variant: random compactly supported perturbations instead of
/// local re-solves. sup_local_solution holds the best perturbed sup.
AuditReport perturbation_audit(const LagrangianModel& model,
                               const Path& candidate, const AuditConfig& config,
                               int perturbations_per_subinterval,
                               Exec exec = Exec::kParallel);

struct ComparisonMap {
  Path path;
  double delta_left = 0.0;   // snapped layer widths
  double delta_right = 0.0;
  int left_node = 0;   // node at a + delta_left
  int right_node = 0;  // node at b - delta_right
};

/// Glues affine boundary layers to psi: the affine interpolation from
/// u_left to psi(a + delta) on the left layer, psi in the middle, and the
/// affine interpolation from psi(b - delta) to u_right on the right layer.
/// delta is snapped down to the grid.
ComparisonMap build_comparison(const Vec& u_left, const Vec& u_right,
                               const Path& psi, double delta);

struct SemicontinuityResult {
  double lhs = 0.0;
  std::vector<double> rhs;
  double liminf_estimate = 0.0;
  bool pass = false;
};

SemicontinuityResult semicontinuity_check(
    const LagrangianModel& model,
    const std::vector<std::pair<int, Path>>& approx_paths,
    const Path& limit_path, Subinterval sub, double tol_audit = 1e-3);

struct LayerSample {
  double delta = 0.0;
  Vec quotient;
  double layer_sup = 0.0;
  double boundary_deviation = 0.0;  // max |psi_delta - psi(end)| on the layer
};

struct QuotientScan {
  std::vector<LayerSample> left;
  std::vector<LayerSample> right;
  double global_sup = 0.0;
  Vec left_quotient_limit;
  Vec right_quotient_limit;
  double left_sup_limit = 0.0;
  double right_sup_limit = 0.0;
  bool left_cauchy = false;
  bool right_cauchy = false;
  bool bound_holds = false;  // both layer limits <= global_sup + tol
};

/// delta_i = 2^-i * 0.3 * length for i = 1..count.
std::vector<double> default_delta_schedule(double length, int count = 8);

QuotientScan endpoint_quotient_scan(const LagrangianModel& model,
                                    const Path& psi,
                                    const std::vector<double>& delta_schedule,
                                    double tol_audit = 1e-3);

}  // namespace supmin
