#include "supmin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "supmin/error.hpp"
#include "supmin/parallel.hpp"
#include "supmin/random.hpp"

namespace supmin {

void SolveOptions::validate() const {
  if (max_iters < 1 || !(grad_tol > 0.0) || !(initial_step > 0.0) ||
      !(sufficient_decrease > 0.0) || history < 1 || max_backtracks < 1) {
    throw Error(ErrorKind::kInvalidArgument, "solve options must be positive");
  }
  if (!(backtrack > 0.0 && backtrack < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "solve: backtrack in (0, 1)");
  }
}

void SweepSchedule::validate() const {
  if (m_start < 1) throw Error(ErrorKind::kInvalidArgument, "schedule: m_start >= 1");
  if (factor < 2) throw Error(ErrorKind::kInvalidArgument, "schedule: factor >= 2");
  if (m_max < m_start) {
    throw Error(ErrorKind::kInvalidArgument, "schedule: m_max >= m_start");
  }
  if (!(tol_sweep > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "schedule: tol_sweep > 0");
  }
}

namespace {

// Interior rows of the nodal matrix as one flat vector, and back.
Vec pack_interior(const NodeMatrix& v) {
  const long rows = v.rows() - 2;
  Vec out(rows * v.cols());
  for (long i = 0; i < rows; ++i) {
    out.segment(i * v.cols(), v.cols()) = v.row(i + 1).transpose();
  }
  return out;
}

void unpack_interior(const Vec& flat, NodeMatrix& v) {
  const long rows = v.rows() - 2;
  for (long i = 0; i < rows; ++i) {
    v.row(i + 1) = flat.segment(i * v.cols(), v.cols()).transpose();
  }
}

struct Curvature {
  Vec s, y;
  double rho;
};

// Two-loop recursion: returns -H g.
constexpr int kStagnationSteps = 10;

Vec lbfgs_direction(const std::deque<Curvature>& pairs, const Vec& g) {
  Vec q = g;
  std::vector<double> alpha(pairs.size());
  for (std::size_t k = pairs.size(); k-- > 0;) {
    alpha[k] = pairs[k].rho * pairs[k].s.dot(q);
    q -= alpha[k] * pairs[k].y;
  }
  if (!pairs.empty()) {
    const auto& last = pairs.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double beta = pairs[k].rho * pairs[k].y.dot(q);
    q += (alpha[k] - beta) * pairs[k].s;
  }
  return -q;
}

}  // namespace

SolveResult minimize_power(const LagrangianModel& model, const Grid& grid,
                           const AffineMap& b, int m, const Path& init,
                           const SolveOptions& opts, Exec exec) {
  opts.validate();
  if (init.grid().num_nodes() != grid.num_nodes() ||
      init.dim() != model.dim() || b.b0.size() != model.dim()) {
    throw Error(ErrorKind::kInvalidArgument,
                "initial path, model and boundary map must agree in shape");
  }
  const Subinterval whole = Subinterval::whole(grid);
  NodeMatrix values = init.values();
  values.row(0) = b(grid.a()).transpose();
  values.row(grid.num_nodes() - 1) = b(grid.b()).transpose();
  Path current(grid, values);

  auto evaluate = [&](const Path& p) {
    return power_objective(model, p, m, whole, exec);
  };

  PowerObjective obj = evaluate(current);
  Vec x = pack_interior(current.values());
  Vec g = pack_interior(obj.gradient);
  double f = obj.value;

  SolveStats stats;
  stats.objective = f;
  stats.grad_inf_norm = g.size() ? g.lpNorm<Eigen::Infinity>() : 0.0;

  std::deque<Curvature> pairs;
  NodeMatrix trial_values = current.values();
  int flat_steps = 0;
  while (stats.grad_inf_norm >= opts.grad_tol && stats.iterations < opts.max_iters) {
    Vec d = lbfgs_direction(pairs, g);
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      pairs.clear();
      d = -g;
      slope = -g.squaredNorm();
    }

    double step = opts.initial_step;
    bool accepted = false;
    Vec x_new;
    PowerObjective trial;
    for (int bt = 0; bt < opts.max_backtracks; ++bt, step *= opts.backtrack) {
      x_new = x + step * d;
      unpack_interior(x_new, trial_values);
      try {
        trial = evaluate(Path(grid, trial_values));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNonFinite) throw;
        continue;
      }
      if (trial.value <= f + opts.sufficient_decrease * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      stats.line_search_failed = true;
      break;
    }

    const Vec g_new = pack_interior(trial.gradient);
    const Vec s = x_new - x;
    const Vec y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      pairs.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(pairs.size()) > opts.history) pairs.pop_front();
    }
    // Accepted steps that leave f unchanged mean the objective has run out
    // of floating-point resolution.
    flat_steps = trial.value < f ? 0 : flat_steps + 1;
    x = x_new;
    g = g_new;
    f = trial.value;
    ++stats.iterations;
    stats.objective = f;
    stats.grad_inf_norm = g.lpNorm<Eigen::Infinity>();
    if (flat_steps >= kStagnationSteps) {
      stats.stagnated = true;
      break;
    }
  }
  stats.converged = stats.grad_inf_norm < opts.grad_tol;

  unpack_interior(x, values);
  return {Path(grid, values), stats};
}

SweepResult m_sweep_from(const LagrangianModel& model, const Grid& grid,
                         const AffineMap& b, const SweepSchedule& schedule,
                         const SolveOptions& opts, const Path& init,
                         Exec exec) {
  schedule.validate();
  opts.validate();
  SweepResult result{{}, {}, init, 0.0, false, {}};
  Path current = init;
  const Subinterval whole = Subinterval::whole(grid);
  for (long m = schedule.m_start; m <= schedule.m_max; m *= schedule.factor) {
    try {
      SolveResult solved =
          minimize_power(model, grid, b, static_cast<int>(m), current, opts, exec);
      const double root =
          power_energy(model, solved.path, static_cast<int>(m), whole, exec)
              .normalized_root;
      result.records.push_back(
          {static_cast<int>(m), solved.path, root, solved.stats});
      result.C_sequence.push_back(root);
      current = std::move(solved.path);
    } catch (const Error& e) {
      result.aborted = true;
      result.failure = "m = " + std::to_string(m) + ": " + e.what();
      break;
    }
    const auto k = result.C_sequence.size();
    if (k >= 2) {
      const double root = result.C_sequence[k - 1];
      if (std::abs(root - result.C_sequence[k - 2]) <=
          schedule.tol_sweep * (1.0 + root)) {
        break;
      }
    }
  }
  result.candidate = current;
  if (!result.records.empty()) {
    result.sup_of_candidate = sup_energy(model, result.candidate, whole, exec);
  }
  return result;
}

SweepResult m_sweep(const LagrangianModel& model, const Grid& grid,
                    const AffineMap& b, const SweepSchedule& schedule,
                    const SolveOptions& opts, Exec exec) {
  return m_sweep_from(model, grid, b, schedule, opts, interpolate_affine(b, grid),
                      exec);
}

MultiStartResult multi_start_sweep(const LagrangianModel& model,
                                   const Grid& grid, const AffineMap& b,
                                   const SweepSchedule& schedule,
                                   const SolveOptions& opts, int restarts,
                                   std::uint64_t seed, Exec exec) {
  if (restarts < 0) {
    throw Error(ErrorKind::kInvalidArgument, "restarts must be >= 0");
  }
  const Path affine = interpolate_affine(b, grid);
  const double amplitude =
      0.1 * ((b(grid.b()) - b(grid.a())).norm() + grid.length());

  // Initial guesses are drawn up front so they do not depend on scheduling.
  std::vector<Path> inits{affine};
  Rng rng(seed);
  for (int r = 0; r < restarts; ++r) {
    NodeMatrix v = affine.values();
    for (long i = 1; i + 1 < v.rows(); ++i) {
      for (long k = 0; k < v.cols(); ++k) {
        v(i, k) += rng.uniform(-amplitude, amplitude);
      }
    }
    inits.emplace_back(grid, std::move(v));
  }

  MultiStartResult out;
  out.runs.resize(inits.size(), SweepResult{{}, {}, affine, 0.0, false, {}});
  parallel_for(static_cast<long>(inits.size()),
               exec == Exec::kParallel && inits.size() > 1, [&](long r) {
                 out.runs[static_cast<std::size_t>(r)] = m_sweep_from(
                     model, grid, b, schedule, opts,
                     inits[static_cast<std::size_t>(r)], exec);
               });

  out.sups.reserve(out.runs.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < out.runs.size(); ++r) {
    const auto& run = out.runs[r];
    const double sup = run.aborted ? std::numeric_limits<double>::infinity()
                                   : run.sup_of_candidate;
    out.sups.push_back(sup);
    if (sup < best) {
      best = sup;
      out.best_index = r;
    }
  }
  const auto& best_values = out.best().candidate.values();
  const double scale = 1.0 + best_values.cwiseAbs().maxCoeff();
  for (std::size_t r = 0; r < out.runs.size(); ++r) {
    if (r == out.best_index || out.runs[r].aborted) continue;
    const bool tie =
        std::abs(out.sups[r] - best) <= schedule.tol_sweep * (1.0 + best);
    const double diff =
        (out.runs[r].candidate.values() - best_values).cwiseAbs().maxCoeff();
    if (tie && diff > 1e-6 * scale) out.alternatives.push_back(r);
  }
  return out;
}

}  // namespace supmin
