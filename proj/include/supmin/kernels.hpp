#pragma once

#include <span>
#include <vector>

#include "supmin/lagrangian.hpp"
#include "supmin/path.hpp"
#include "supmin/types.hpp"

// Element-wise sampling kernels behind the energy functionals. Each kernel
// writes one slot per element so the OpenMP and serial variants produce
// identical outputs; reductions over the slots happen in ascending element
// order in the caller.
namespace supmin::kernels {

/// Part of element `element` that lies inside the subinterval.
struct ClippedElement {
  int element = 0;
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] double length() const { return hi - lo; }
  [[nodiscard]] double mid() const { return 0.5 * (lo + hi); }
};

/// Elements meeting the open interval (alpha, beta), clipped to it.
std::vector<ClippedElement> clip_elements(const Grid& grid, double alpha,
                                          double beta);

/// u(x) evaluated on a known element.
Vec value_on_element(const Path& path, int element, double x);

/// Below this many elements the parallel variants run serially.
inline constexpr int kParallelThreshold = 512;

/// out[i] = L at the midpoint of clipped element i.
void midpoint_values(const LagrangianModel& model, const Path& path,
                     std::span<const ClippedElement> elements,
                     std::span<double> out, Exec exec);

/// out[i] = max of L over the two clipped endpoints and the midpoint.
void element_maxima(const LagrangianModel& model, const Path& path,
                    std::span<const ClippedElement> elements,
                    std::span<double> out, Exec exec);

/// Midpoint value plus L_P and L_eta per clipped element (rows).
void midpoint_first_order(const LagrangianModel& model, const Path& path,
                          std::span<const ClippedElement> elements,
                          std::span<double> values, NodeMatrix& L_P,
                          NodeMatrix& L_eta, Exec exec);

}  // namespace supmin::kernels
