#pragma once

#include <cstddef>

namespace scs {

// Serial is the reference path; Parallel spreads independent per-file work
// over an OpenMP team. Both produce identical results.
enum class Execution { Serial, Parallel };

// Calls fn(i) for i in [0, n). fn must not throw under Execution::Parallel.
template <typename Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
  if (exec == Execution::Parallel && n > 1) {
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) fn(i);
  }
}

}  // namespace scs
