#include "supmin/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "supmin/error.hpp"
#include "supmin/kernels.hpp"
#include "supmin/parallel.hpp"
#include "supmin/random.hpp"

namespace supmin {

void AuditConfig::validate() const {
  if (num_subintervals < 1) {
    throw Error(ErrorKind::kInvalidArgument, "audit: num_subintervals >= 1");
  }
  if (min_elements < 1) {
    throw Error(ErrorKind::kInvalidArgument, "audit: min_elements >= 1");
  }
  if (!(tol_audit > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "audit: tol_audit > 0");
  }
  schedule.validate();
  solve.validate();
}

std::vector<std::pair<int, int>> sample_subintervals(const Grid& grid,
                                                     const AuditConfig& config) {
  config.validate();
  const int M = grid.elements();
  const int span = std::max(config.min_elements, 2);
  if (M < span) {
    throw Error(ErrorKind::kGridTooCoarse,
                "grid has fewer elements than the audit minimum");
  }
  Rng rng(config.seed);
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(config.num_subintervals));
  for (int k = 0; k < config.num_subintervals; ++k) {
    const int i = rng.integer(0, M - span);
    const int j = rng.integer(i + span, M);
    out.emplace_back(i, j);
  }
  return out;
}

namespace {

AuditReport assemble(std::vector<AuditEntry> entries, double tol) {
  AuditReport report;
  report.tol_audit = tol;
  report.entries = std::move(entries);
  report.max_deficit = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < report.entries.size(); ++k) {
    auto& e = report.entries[k];
    if (e.inconclusive) {
      ++report.inconclusive;
      continue;
    }
    e.violation = e.deficit > tol * (1.0 + e.sup_global_restricted);
    if (e.violation) report.violations.push_back(k);
    report.max_deficit = std::max(report.max_deficit, e.deficit);
  }
  if (report.inconclusive == report.entries.size()) report.max_deficit = 0.0;
  return report;
}

}  // namespace

AuditReport audit_absolute_minimality(const LagrangianModel& model,
                                      const Path& candidate,
                                      const AuditConfig& config, Exec exec) {
  const auto& grid = candidate.grid();
  const auto pairs = sample_subintervals(grid, config);
  std::vector<AuditEntry> entries(pairs.size());
  // Subintervals are independent; each task owns its solver state.
  parallel_for(static_cast<long>(pairs.size()), exec == Exec::kParallel,
               [&](long k) {
                 const auto [i, j] = pairs[static_cast<std::size_t>(k)];
                 AuditEntry& e = entries[static_cast<std::size_t>(k)];
                 e.first_node = i;
                 e.last_node = j;
                 e.alpha = grid.node(i);
                 e.beta = grid.node(j);
                 try {
                   e.sup_global_restricted = sup_energy(
                       model, candidate, {e.alpha, e.beta}, Exec::kSerial);
                   const Grid local = grid.slice(i, j);
                   const AffineMap chord = AffineMap::chord(
                       e.alpha, candidate.node_value(i), e.beta,
                       candidate.node_value(j));
                   const SweepResult sweep =
                       m_sweep(model, local, chord, config.schedule,
                               config.solve, Exec::kSerial);
                   if (sweep.aborted) {
                     e.inconclusive = true;
                     e.message = sweep.failure;
                     return;
                   }
                   e.sup_local_solution = sweep.sup_of_candidate;
                   e.deficit = e.sup_global_restricted - e.sup_local_solution;
                 } catch (const Error& err) {
                   e.inconclusive = true;
                   e.message = err.what();
                 }
               });
  return assemble(std::move(entries), config.tol_audit);
}

AuditReport perturbation_audit(const LagrangianModel& model,
                               const Path& candidate, const AuditConfig& config,
                               int perturbations_per_subinterval, Exec exec) {
  if (perturbations_per_subinterval < 1) {
    throw Error(ErrorKind::kInvalidArgument, "perturbations per subinterval >= 1");
  }
  const auto& grid = candidate.grid();
  const auto pairs = sample_subintervals(grid, config);
  const double amplitude =
      0.05 * (1.0 + candidate.values().cwiseAbs().maxCoeff());

  // Draw all perturbations serially so the report is schedule independent.
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::vector<NodeMatrix>> perturbations(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    for (int r = 0; r < perturbations_per_subinterval; ++r) {
      NodeMatrix v = candidate.values();
      for (int node = i + 1; node < j; ++node) {
        for (long c = 0; c < v.cols(); ++c) {
          v(node, c) += rng.uniform(-amplitude, amplitude);
        }
      }
      perturbations[k].push_back(std::move(v));
    }
  }

  std::vector<AuditEntry> entries(pairs.size());
  parallel_for(static_cast<long>(pairs.size()), exec == Exec::kParallel,
               [&](long k) {
                 const auto [i, j] = pairs[static_cast<std::size_t>(k)];
                 AuditEntry& e = entries[static_cast<std::size_t>(k)];
                 e.first_node = i;
                 e.last_node = j;
                 e.alpha = grid.node(i);
                 e.beta = grid.node(j);
                 const Subinterval sub{e.alpha, e.beta};
                 try {
                   e.sup_global_restricted =
                       sup_energy(model, candidate, sub, Exec::kSerial);
                   double best = std::numeric_limits<double>::infinity();
                   for (const auto& v : perturbations[static_cast<std::size_t>(k)]) {
                     best = std::min(best, sup_energy(model, Path(grid, v), sub,
                                                      Exec::kSerial));
                   }
                   e.sup_local_solution = best;
                   e.deficit = e.sup_global_restricted - best;
                 } catch (const Error& err) {
                   e.inconclusive = true;
                   e.message = err.what();
                 }
               });
  return assemble(std::move(entries), config.tol_audit);
}

ComparisonMap build_comparison(const Vec& u_left, const Vec& u_right,
                               const Path& psi, double delta) {
  const auto& g = psi.grid();
  const double a = g.a();
  const double b = g.b();
  const double len = g.length();
  if (!(delta > 0.0) || !(delta < len / 3.0)) {
    throw Error(ErrorKind::kBadDelta, "need 0 < delta < length / 3");
  }
  if (u_left.size() != psi.dim() || u_right.size() != psi.dim()) {
    throw Error(ErrorKind::kInvalidArgument, "boundary values must be in R^N");
  }

  // Largest node offset <= delta whose mirror b - offset is also a node.
  const double match_tol = 1e-12 * len;
  int left = -1;
  int right = -1;
  for (int k = 1; k < g.num_nodes() && g.node(k) - a <= delta; ++k) {
    const double target = b - (g.node(k) - a);
    const auto& nodes = g.nodes();
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), target - match_tol);
    if (it != nodes.end() && std::abs(*it - target) <= match_tol) {
      left = k;
      right = static_cast<int>(it - nodes.begin());
    }
  }
  if (left < 0) {
    throw Error(ErrorKind::kGridTooCoarse, "no grid node inside (0, delta]");
  }

  const double d_left = g.node(left) - a;
  const double d_right = b - g.node(right);
  const Vec psi_left = psi.node_value(left);
  const Vec psi_right = psi.node_value(right);
  NodeMatrix v = psi.values();
  for (int i = 0; i <= left; ++i) {
    const double s = g.node(i) - a;
    v.row(i) = (((d_left - s) / d_left) * u_left + (s / d_left) * psi_left).transpose();
  }
  for (int i = right; i < g.num_nodes(); ++i) {
    const double x = g.node(i);
    v.row(i) = (((b - x) / d_right) * psi_right +
                ((x - g.node(right)) / d_right) * u_right)
                   .transpose();
  }
  v.row(0) = u_left.transpose();
  v.row(g.num_nodes() - 1) = u_right.transpose();
  return {Path(g, std::move(v)), d_left, d_right, left, right};
}

SemicontinuityResult semicontinuity_check(
    const LagrangianModel& model,
    const std::vector<std::pair<int, Path>>& approx_paths,
    const Path& limit_path, Subinterval sub, double tol_audit) {
  if (approx_paths.size() < 3) {
    throw Error(ErrorKind::kTooFewEntries, "need at least 3 approximants");
  }
  for (std::size_t k = 1; k < approx_paths.size(); ++k) {
    if (!(approx_paths[k].first > approx_paths[k - 1].first)) {
      throw Error(ErrorKind::kInvalidArgument, "m values must increase");
    }
  }
  SemicontinuityResult r;
  r.lhs = sup_energy(model, limit_path, sub);
  for (const auto& [m, p] : approx_paths) {
    r.rhs.push_back(power_energy(model, p, m, sub).normalized_root);
  }
  const std::size_t tail = r.rhs.size() / 2;
  r.liminf_estimate =
      *std::min_element(r.rhs.begin() + static_cast<long>(tail), r.rhs.end());
  r.pass = r.lhs <= r.liminf_estimate + tol_audit * (1.0 + r.lhs);
  return r;
}

std::vector<double> default_delta_schedule(double length, int count) {
  std::vector<double> out;
  for (int i = 1; i <= count; ++i) out.push_back(std::ldexp(0.3 * length, -i));
  return out;
}

namespace {

// max of L(x, glued(x), slope) over endpoint/midpoint samples of the
// elements first..last-1.
double layer_sup(const LagrangianModel& model, const Path& glued, int first,
                 int last, const Vec& slope) {
  const auto& g = glued.grid();
  double best = 0.0;
  for (int e = first; e < last; ++e) {
    const double lo = g.node(e);
    const double hi = g.node(e + 1);
    for (const double x : {lo, 0.5 * (lo + hi), hi}) {
      best = std::max(best, model.eval(x, kernels::value_on_element(glued, e, x),
                                       slope));
    }
  }
  return best;
}

}  // namespace

QuotientScan endpoint_quotient_scan(const LagrangianModel& model,
                                    const Path& psi,
                                    const std::vector<double>& delta_schedule,
                                    double tol_audit) {
  if (delta_schedule.empty()) {
    throw Error(ErrorKind::kBadDelta, "empty delta schedule");
  }
  for (std::size_t k = 1; k < delta_schedule.size(); ++k) {
    if (!(delta_schedule[k] < delta_schedule[k - 1])) {
      throw Error(ErrorKind::kBadDelta, "delta schedule must decrease");
    }
  }
  const auto& g = psi.grid();
  const Vec start = psi.node_value(0);
  const Vec end = psi.node_value(g.num_nodes() - 1);

  QuotientScan scan;
  scan.global_sup = sup_energy(model, psi, Subinterval::whole(g));
  for (const double delta : delta_schedule) {
    const ComparisonMap glued = build_comparison(start, end, psi, delta);

    LayerSample left;
    left.delta = glued.delta_left;
    left.quotient = difference_quotient(psi, g.a(), glued.delta_left);
    left.layer_sup = layer_sup(model, glued.path, 0, glued.left_node, left.quotient);
    for (int i = 0; i <= glued.left_node; ++i) {
      left.boundary_deviation = std::max(
          left.boundary_deviation, (glued.path.node_value(i) - start).norm());
    }

    LayerSample right;
    right.delta = glued.delta_right;
    right.quotient = difference_quotient(psi, g.b(), -glued.delta_right);
    right.layer_sup = layer_sup(model, glued.path, glued.right_node, g.elements(),
                                right.quotient);
    for (int i = glued.right_node; i < g.num_nodes(); ++i) {
      right.boundary_deviation = std::max(
          right.boundary_deviation, (glued.path.node_value(i) - end).norm());
    }

    scan.left.push_back(std::move(left));
    scan.right.push_back(std::move(right));
  }

  auto cauchy = [&](const std::vector<LayerSample>& s) {
    if (s.size() < 2) return false;
    const auto& a = s[s.size() - 1];
    const auto& b = s[s.size() - 2];
    return (a.quotient - b.quotient).norm() < tol_audit &&
           std::abs(a.layer_sup - b.layer_sup) < tol_audit;
  };
  scan.left_quotient_limit = scan.left.back().quotient;
  scan.right_quotient_limit = scan.right.back().quotient;
  scan.left_sup_limit = scan.left.back().layer_sup;
  scan.right_sup_limit = scan.right.back().layer_sup;
  scan.left_cauchy = cauchy(scan.left);
  scan.right_cauchy = cauchy(scan.right);
  scan.bound_holds =
      std::max(scan.left_sup_limit, scan.right_sup_limit) <=
      scan.global_sup + tol_audit;
  return scan;
}

}  // namespace supmin
