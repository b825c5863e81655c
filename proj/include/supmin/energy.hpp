#pragma once

#include <optional>
#include <vector>

#include "supmin/lagrangian.hpp"
#include "supmin/path.hpp"
#include "supmin/types.hpp"

namespace supmin {

struct Subinterval {
  double alpha = 0.0;
  double beta = 0.0;

  [[nodiscard]] double length() const { return beta - alpha; }
  static Subinterval whole(const Grid& g) { return {g.a(), g.b()}; }
};

/// Result of evaluating E_m (finite m) or E_inf (m empty) on a subinterval.
struct EnergyReport {
  std::optional<int> m;  // empty means m = infinity
  double raw = 0.0;      // +inf when overflow is set
  bool overflow = false;
  double normalized_root = 0.0;  // ((1/|sub|) E_m)^(1/m)
  double sup = 0.0;  // max of the quadrature samples used
  double alpha = 0.0;
  double beta = 0.0;
};

/// ess sup of L(x, u, u') over the subinterval, sampled at the endpoints
/// and midpoint of each (clipped) element.
double sup_energy(const LagrangianModel& model, const Path& path,
                  Subinterval sub, Exec exec = Exec::kParallel);

/// Integral of L^m by midpoint quadrature, with the largest sample factored
/// out so the normalized root stays finite for large m.
EnergyReport power_energy(const LagrangianModel& model, const Path& path,
                          int m, Subinterval sub, Exec exec = Exec::kParallel);

/// sup_energy packaged as an m = infinity report.
EnergyReport sup_energy_report(const LagrangianModel& model, const Path& path,
                               Subinterval sub, Exec exec = Exec::kParallel);

/// Normalized root and its gradient with respect to the nodal values.
/// Rows of nodes not strictly inside the subinterval are zero.
struct PowerObjective {
  double value = 0.0;
  NodeMatrix gradient;
};

PowerObjective power_objective(const LagrangianModel& model, const Path& path,
                               int m, Subinterval sub,
                               Exec exec = Exec::kParallel);

NodeMatrix power_energy_gradient(const LagrangianModel& model,
                                 const Path& path, int m, Subinterval sub,
                                 Exec exec = Exec::kParallel);

/// max_i L(P_i) - L(sum_i w_i P_i). Nonnegative (up to tolerance) for
/// level-convex L.
double jensen_gap(const LagrangianModel& model, double x, const Vec& eta,
                  const std::vector<double>& weights,
                  const std::vector<Vec>& P_list);

}  // namespace supmin
