#pragma once

#include <exception>
#include <limits>

namespace supmin {

/// Runs body(i) for i in [0, n), in an OpenMP loop when `parallel` is set.
/// An exception thrown by any iteration is rethrown after the loop; when
/// several iterations fail, the one with the lowest index wins, so the
/// outcome does not depend on scheduling.
template <typename Body>
void parallel_for(long n, bool parallel, Body&& body) {
  if (!parallel) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  long error_index = std::numeric_limits<long>::max();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(supmin_parallel_error)
      {
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace supmin
