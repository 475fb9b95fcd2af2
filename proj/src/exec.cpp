#include "calab/exec.hpp"

#include <atomic>

namespace calab::exec {

namespace {
std::atomic<bool> g_parallel{true};
std::atomic<int> g_max_threads{0};
}  // namespace

void set_parallel(bool enabled) { g_parallel.store(enabled); }
bool parallel_enabled() {
#ifdef _OPENMP
    return g_parallel.load();
#else
    return false;
#endif
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }
int max_threads() { return g_max_threads.load(); }

}  // namespace calab::exec
