// Timing comparison between the serial reference kernels and the OpenMP
// paths, with a cheap equality check so a mismatch is loud.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "calab/core.hpp"
#include "calab/exec.hpp"
#include "calab/gilman.hpp"
#include "calab/kurka.hpp"
#include "calab/rng.hpp"
#include "calab/spectral.hpp"

namespace {

using namespace calab;

template <class Fn>
double time_ms(Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

struct Row {
    std::string name;
    double serial_ms = 0.0;
    double parallel_ms = 0.0;
    bool match = true;
};

template <class Fn>
Row bench(const std::string& name, Fn&& run) {
    Row row;
    row.name = name;
    exec::set_parallel(false);
    auto serial_result = run(&row.serial_ms);
    exec::set_parallel(true);
    auto parallel_result = run(&row.parallel_ms);
    row.match = serial_result == parallel_result;
    return row;
}

}  // namespace

int main() {
    std::vector<Row> rows;
    const SeedStream rng{20240801, 7};

    {
        const LocalRule rule = wolfram_rule(110);
        const BernoulliMeasure mu = BernoulliMeasure::uniform(rule.alphabet());
        const PeriodicConfig x0 = sample_config(mu, Index{1} << 20, rng.child(0));
        rows.push_back(bench("step, 2^20 cells x 64 iters", [&](double* ms) {
            PeriodicConfig cur = x0;
            PeriodicConfig buf = x0;
            *ms = time_ms([&] {
                for (int t = 0; t < 64; ++t) {
                    step_into(rule, cur, buf);
                    std::swap(cur, buf);
                }
            });
            return cur.cells();
        }));
    }

    {
        const LocalRule rule = wolfram_rule(170);
        const BernoulliMeasure mu = BernoulliMeasure::uniform(rule.alphabet());
        const PeriodicConfig x = sample_config(mu, 256, rng.child(1));
        rows.push_back(bench("equicontinuity probe, rule 170, 2*10^4 samples", [&](double* ms) {
            EquicontinuityProbe probe{};
            *ms = time_ms([&] { probe = equicontinuity_probe(rule, x, 1, 4, 16, 20000, rng.child(2)); });
            return probe.fraction;
        }));
    }

    {
        const LocalRule rule = wolfram_rule(90);
        rows.push_back(bench("propagation distances, rule 90, 10^4 samples", [&](double* ms) {
            PropagationDistances dist;
            *ms = time_ms([&] { dist = propagation_distances(rule, 0, 1, 64, 256, 10000, rng.child(3)); });
            return std::make_pair(dist.left, dist.right);
        }));
    }

    {
        const LocalRule rule = wolfram_rule(90);
        const BernoulliMeasure mu = BernoulliMeasure::uniform(rule.alphabet());
        const Observable g = Observable::letter_at_origin(mu);
        rows.push_back(bench("eigenvalue scan, rule 90, 256-grid, 32 orbits", [&](double* ms) {
            SpectralScan scan;
            *ms = time_ms(
                [&] { scan = eigenvalue_scan(rule, mu, g, uniform_alpha_grid(256), 256, 32, 1024, rng.child(4)); });
            return scan.atom_mass;
        }));
    }

#ifdef _OPENMP
    std::printf("worker threads: %d\n\n", omp_get_max_threads());
#else
    std::printf("worker threads: 1 (built without OpenMP)\n\n");
#endif
    std::printf("%-48s %12s %12s %9s %7s\n", "kernel", "serial (ms)", "openmp (ms)", "speedup", "match");
    bool all_match = true;
    for (const Row& row : rows) {
        std::printf("%-48s %12.2f %12.2f %8.2fx %7s\n", row.name.c_str(), row.serial_ms, row.parallel_ms,
                    row.serial_ms / (row.parallel_ms > 0 ? row.parallel_ms : 1.0),
                    row.match ? "ok" : "MISMATCH");
        all_match = all_match && row.match;
    }
    return all_match ? 0 : 1;
}
