#pragma once

// Data-parallel evaluation over grid points. Every kernel writes its result
// into slot i, and reductions happen afterwards in index order, so the
// parallel path reproduces the serial reference bit for bit.

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace warpcheck {

enum class Execution { serial, parallel };

template <class T, class F>
std::vector<T> evaluate_points(std::size_t count, Execution exec, const F& kernel) {
  std::vector<T> out(count);
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < count; ++i) out[i] = kernel(i);
    return out;
  }
  std::exception_ptr error;
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = kernel(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(warpcheck_sweep_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

inline int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace warpcheck
