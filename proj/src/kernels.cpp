#include "supmin/kernels.hpp"

#include <algorithm>

#include "supmin/error.hpp"
#include "supmin/parallel.hpp"

namespace supmin::kernels {

std::vector<ClippedElement> clip_elements(const Grid& grid, double alpha,
                                          double beta) {
  if (!(alpha < beta)) {
    throw Error(ErrorKind::kEmptyInterval, "subinterval needs alpha < beta");
  }
  if (alpha < grid.a() || beta > grid.b()) {
    throw Error(ErrorKind::kOutOfDomain, "subinterval outside [a, b]");
  }
  std::vector<ClippedElement> out;
  for (int e = 0; e < grid.elements(); ++e) {
    if (grid.node(e + 1) <= alpha) continue;
    if (grid.node(e) >= beta) break;
    out.push_back({e, std::max(alpha, grid.node(e)),
                   std::min(beta, grid.node(e + 1))});
  }
  return out;
}

Vec value_on_element(const Path& path, int element, double x) {
  const auto& g = path.grid();
  const auto left = path.values().row(element).transpose();
  if (x == g.node(element + 1)) return path.values().row(element + 1).transpose();
  if (x == g.node(element)) return left;
  const auto right = path.values().row(element + 1).transpose();
  const double theta = (x - g.node(element)) / g.element_length(element);
  return left + theta * (right - left);
}

namespace {

template <typename Body>
void for_each_element(long n, Exec exec, Body&& body) {
  parallel_for(n, exec == Exec::kParallel && n >= kParallelThreshold,
               std::forward<Body>(body));
}

}  // namespace

void midpoint_values(const LagrangianModel& model, const Path& path,
                     std::span<const ClippedElement> elements,
                     std::span<double> out, Exec exec) {
  for_each_element(static_cast<long>(elements.size()), exec, [&](long i) {
    const auto& c = elements[static_cast<std::size_t>(i)];
    const double xm = c.mid();
    out[static_cast<std::size_t>(i)] =
        model.eval(xm, value_on_element(path, c.element, xm),
                   path.element_slope(c.element));
  });
}

void element_maxima(const LagrangianModel& model, const Path& path,
                    std::span<const ClippedElement> elements,
                    std::span<double> out, Exec exec) {
  for_each_element(static_cast<long>(elements.size()), exec, [&](long i) {
    const auto& c = elements[static_cast<std::size_t>(i)];
    const Vec slope = path.element_slope(c.element);
    double best = 0.0;
    for (const double x : {c.lo, c.mid(), c.hi}) {
      best = std::max(best,
                      model.eval(x, value_on_element(path, c.element, x), slope));
    }
    out[static_cast<std::size_t>(i)] = best;
  });
}

void midpoint_first_order(const LagrangianModel& model, const Path& path,
                          std::span<const ClippedElement> elements,
                          std::span<double> values, NodeMatrix& L_P,
                          NodeMatrix& L_eta, Exec exec) {
  const auto n = static_cast<long>(elements.size());
  L_P.resize(n, path.dim());
  L_eta.resize(n, path.dim());
  for_each_element(n, exec, [&](long i) {
    const auto& c = elements[static_cast<std::size_t>(i)];
    const double xm = c.mid();
    double L = 0.0;
    Vec lp, le;
    model.first_order(xm, value_on_element(path, c.element, xm),
                      path.element_slope(c.element), L, lp, le);
    values[static_cast<std::size_t>(i)] = L;
    L_P.row(i) = lp.transpose();
    L_eta.row(i) = le.transpose();
  });
}

}  // namespace supmin::kernels
