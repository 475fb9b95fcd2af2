#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "calab/decider.hpp"
#include "calab/exec.hpp"
#include "calab/gilman.hpp"
#include "calab/kurka.hpp"
#include "calab/spectral.hpp"

using namespace calab;

namespace {

const Alphabet kBinary{2};
const BernoulliMeasure kUniform = BernoulliMeasure::uniform(kBinary);

// run `fn` once with OpenMP kernels disabled and once enabled
template <class Fn>
auto both_modes(Fn&& fn) {
    const bool saved = exec::parallel_enabled();
    exec::set_parallel(false);
    auto serial = fn();
    exec::set_parallel(true);
    auto parallel = fn();
    exec::set_parallel(saved);
    return std::pair{std::move(serial), std::move(parallel)};
}

}  // namespace

TEST_CASE("step_into agrees across modes on a large ring") {
    const SeedStream rng{51, 0};
    const PeriodicConfig x = sample_config(kUniform, 1 << 14, rng.child(0));
    const LocalRule rule = wolfram_rule(110);
    auto [serial, parallel] = both_modes([&] {
        PeriodicConfig cur = x;
        PeriodicConfig out = x;
        for (int n = 0; n < 8; ++n) {
            step_into(rule, cur, out);
            std::swap(cur, out);
        }
        return cur;
    });
    CHECK(serial == parallel);
    CHECK(serial == iterate(rule, x, 8));
}

TEST_CASE("equicontinuity probe agrees across modes") {
    const SeedStream rng{52, 0};
    const PeriodicConfig x = sample_config(kUniform, 128, rng.child(0));
    auto [serial, parallel] = both_modes(
        [&] { return equicontinuity_probe(wolfram_rule(110), x, 2, 8, 16, 4000, rng.child(1)); });
    CHECK(serial.fraction == parallel.fraction);
    CHECK(serial.samples == parallel.samples);
}

TEST_CASE("propagation distances agree across modes") {
    const SeedStream rng{53, 0};
    auto [serial, parallel] =
        both_modes([&] { return propagation_distances(wolfram_rule(110), 0, 1, 32, 128, 3000, rng.child(0)); });
    CHECK(serial.left == parallel.left);
    CHECK(serial.right == parallel.right);
}

TEST_CASE("class ratio estimates agree across modes") {
    const SeedStream rng{54, 0};
    const PeriodicConfig x = sample_config(kUniform, 64, rng.child(0));
    auto [serial, parallel] = both_modes(
        [&] { return estimate_class_ratio(wolfram_rule(110), x, 1, 4, 8, 3000, rng.child(1)); });
    CHECK(serial.ratio_hat == parallel.ratio_hat);
    CHECK(serial.ci.lo == parallel.ci.lo);
    CHECK(serial.ci.hi == parallel.ci.hi);
}

TEST_CASE("eigenvalue scans agree across modes") {
    const SeedStream rng{55, 0};
    const Observable g = Observable::letter_at_origin(kUniform);
    auto [serial, parallel] = both_modes([&] {
        return eigenvalue_scan(wolfram_rule(90), kUniform, g, uniform_alpha_grid(32), 64, 16, 256,
                               rng.child(1));
    });
    CHECK(serial.atom_mass == parallel.atom_mass);
    CHECK(serial.cycle_guard == parallel.cycle_guard);
}

TEST_CASE("correlation decay agrees across modes") {
    const SeedStream rng{56, 0};
    const Cylinder u{{1}, 0};
    auto [serial, parallel] = both_modes(
        [&] { return correlation_decay(wolfram_rule(90), kUniform, u, u, 6, 5000, 64, rng.child(0)); });
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].joint_hat == parallel[i].joint_hat);
        CHECK(serial[i].estimate == parallel[i].estimate);
    }
}

TEST_CASE("blocking certification agrees across modes, counters included") {
    const Word w{0, 1};
    auto [serial, parallel] =
        both_modes([&] { return certify_blocking(wolfram_rule(170), w, 1, 0, 3); });
    CHECK(serial.status == parallel.status);
    CHECK(serial.contexts_checked == parallel.contexts_checked);
    REQUIRE(serial.counterexample.has_value());
    REQUIRE(parallel.counterexample.has_value());
    CHECK(serial.counterexample->first_bad_step == parallel.counterexample->first_bad_step);
    CHECK(serial.counterexample->x_cells == parallel.counterexample->x_cells);

    const Word zz{0, 0};
    auto [cs, cp] = both_modes([&] { return certify_blocking(wolfram_rule(232), zz, 2, 0, 12); });
    CHECK(cs.status == BlockingStatus::CertifiedUpTo);
    CHECK(cp.status == BlockingStatus::CertifiedUpTo);
    CHECK(cs.contexts_checked == cp.contexts_checked);
}

TEST_CASE("surjectivity decision agrees across modes") {
    auto [serial, parallel] = both_modes([&] {
        std::vector<bool> out;
        for (int id : {30, 90, 110, 204, 232}) out.push_back(is_surjective(wolfram_rule(id)).surjective);
        return out;
    });
    CHECK(serial == parallel);
}
