#include "supmin/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "supmin/error.hpp"
#include "supmin/kernels.hpp"

namespace supmin {

namespace {

void check_m(int m) {
  if (m < 1) throw Error(ErrorKind::kInvalidArgument, "power m must be >= 1");
}

struct PowerSums {
  double max_sample = 0.0;
  double scaled_sum = 0.0;  // sum_i w_i (L_i / S)^m
};

PowerSums power_sums(std::span<const kernels::ClippedElement> elements,
                     std::span<const double> values, int m) {
  PowerSums s;
  for (const double v : values) s.max_sample = std::max(s.max_sample, v);
  if (s.max_sample == 0.0) return s;
  const double md = static_cast<double>(m);
  for (std::size_t i = 0; i < elements.size(); ++i) {
    s.scaled_sum += elements[i].length() * std::pow(values[i] / s.max_sample, md);
  }
  return s;
}

}  // namespace

double sup_energy(const LagrangianModel& model, const Path& path,
                  Subinterval sub, Exec exec) {
  const auto elements = kernels::clip_elements(path.grid(), sub.alpha, sub.beta);
  std::vector<double> maxima(elements.size());
  kernels::element_maxima(model, path, elements, maxima, exec);
  double best = 0.0;
  for (const double v : maxima) best = std::max(best, v);
  return best;
}

EnergyReport sup_energy_report(const LagrangianModel& model, const Path& path,
                               Subinterval sub, Exec exec) {
  EnergyReport r;
  r.sup = sup_energy(model, path, sub, exec);
  r.raw = r.sup;
  r.normalized_root = r.sup;
  r.alpha = sub.alpha;
  r.beta = sub.beta;
  return r;
}

EnergyReport power_energy(const LagrangianModel& model, const Path& path,
                          int m, Subinterval sub, Exec exec) {
  check_m(m);
  const auto elements = kernels::clip_elements(path.grid(), sub.alpha, sub.beta);
  std::vector<double> values(elements.size());
  kernels::midpoint_values(model, path, elements, values, exec);
  const PowerSums s = power_sums(elements, values, m);

  EnergyReport r;
  r.m = m;
  r.alpha = sub.alpha;
  r.beta = sub.beta;
  r.sup = s.max_sample;
  if (s.max_sample == 0.0) return r;

  const double md = static_cast<double>(m);
  const double scale = std::pow(s.max_sample, md);
  r.raw = scale * s.scaled_sum;
  if (!std::isfinite(r.raw)) {
    r.raw = std::numeric_limits<double>::infinity();
    r.overflow = true;
  }
  r.normalized_root =
      s.max_sample * std::pow(s.scaled_sum / sub.length(), 1.0 / md);
  return r;
}

PowerObjective power_objective(const LagrangianModel& model, const Path& path,
                               int m, Subinterval sub, Exec exec) {
  check_m(m);
  const auto& grid = path.grid();
  const auto elements = kernels::clip_elements(grid, sub.alpha, sub.beta);
  std::vector<double> values(elements.size());
  NodeMatrix L_P, L_eta;
  kernels::midpoint_first_order(model, path, elements, values, L_P, L_eta, exec);
  const PowerSums s = power_sums(elements, values, m);

  PowerObjective out;
  out.gradient = NodeMatrix::Zero(grid.num_nodes(), path.dim());
  if (s.max_sample == 0.0 && m > 1) return out;

  const double md = static_cast<double>(m);
  const double len = sub.length();
  double outer = 1.0;
  if (s.max_sample > 0.0) {
    const double R = s.scaled_sum / len;
    out.value = s.max_sample * std::pow(R, 1.0 / md);
    outer = std::pow(R, 1.0 / md - 1.0);
  }

  // Ascending element order keeps the assembly reproducible.
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& c = elements[i];
    const int e = c.element;
    double ratio = 1.0;
    if (m > 1) ratio = std::pow(values[i] / s.max_sample, md - 1.0);
    const double coef = outer * c.length() * ratio / len;
    if (coef == 0.0) continue;
    const double h = grid.element_length(e);
    const double theta = (c.mid() - grid.node(e)) / h;
    const auto lp = L_P.row(static_cast<long>(i));
    const auto le = L_eta.row(static_cast<long>(i));
    out.gradient.row(e) += coef * ((1.0 - theta) * le - lp / h);
    out.gradient.row(e + 1) += coef * (theta * le + lp / h);
  }

  // Clamp nodes on or outside the subinterval boundary.
  for (int i = 0; i < grid.num_nodes(); ++i) {
    const double x = grid.node(i);
    if (!(x > sub.alpha && x < sub.beta)) out.gradient.row(i).setZero();
  }
  if (!out.gradient.allFinite() || !std::isfinite(out.value)) {
    throw Error(ErrorKind::kNonFinite, "power energy gradient overflowed");
  }
  return out;
}

NodeMatrix power_energy_gradient(const LagrangianModel& model,
                                 const Path& path, int m, Subinterval sub,
                                 Exec exec) {
  return power_objective(model, path, m, sub, exec).gradient;
}

double jensen_gap(const LagrangianModel& model, double x, const Vec& eta,
                  const std::vector<double>& weights,
                  const std::vector<Vec>& P_list) {
  if (P_list.empty() || weights.size() != P_list.size()) {
    throw Error(ErrorKind::kBadWeights,
                "need one weight per P and a nonempty list");
  }
  double total = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorKind::kBadWeights, "negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::kBadWeights, "weights must sum to 1");
  }
  if (P_list.size() == 1) return 0.0;
  Vec mean = Vec::Zero(P_list.front().size());
  double top = 0.0;
  for (std::size_t i = 0; i < P_list.size(); ++i) {
    mean += weights[i] * P_list[i];
    top = std::max(top, model.eval(x, eta, P_list[i]));
  }
  return top - model.eval(x, eta, mean);
}

}  // namespace supmin
