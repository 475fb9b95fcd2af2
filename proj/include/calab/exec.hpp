#pragma once

#include <cstddef>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

// Execution policy for the data-parallel kernels. Every kernel writes
// per-index results into disjoint slots and reduces in a fixed order, so the
// parallel and serial paths produce bit-identical output; tests compare them.
namespace calab::exec {

void set_parallel(bool enabled);
bool parallel_enabled();

// Cap on worker threads; 0 means the OpenMP default.
void set_max_threads(int n);
int max_threads();

// Runs body(i) for i in [0, n). Parallel only when enabled and n is at least
// min_parallel. body must not touch shared mutable state except its own slot.
template <class F>
void parallel_for(std::size_t n, F&& body, std::size_t min_parallel = 2) {
#ifdef _OPENMP
    if (parallel_enabled() && n >= min_parallel) {
        const int threads = max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads > 0 ? threads : omp_get_max_threads())
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            body(static_cast<std::size_t>(i));
        }
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) body(i);
}

// Same, with a static schedule and a chunk hint; for cheap per-index bodies
// such as the cell update loop.
template <class F>
void parallel_for_static(std::size_t n, F&& body, std::size_t min_parallel = 2) {
#ifdef _OPENMP
    if (parallel_enabled() && n >= min_parallel) {
        const int threads = max_threads();
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : omp_get_max_threads())
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            body(static_cast<std::size_t>(i));
        }
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace calab::exec
