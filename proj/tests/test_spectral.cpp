#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "calab/spectral.hpp"

using namespace calab;

namespace {

const Alphabet kBinary{2};
const BernoulliMeasure kUniform = BernoulliMeasure::uniform(kBinary);

PeriodicConfig config(std::initializer_list<int> cells) {
    std::vector<Letter> v;
    for (int c : cells) v.push_back(static_cast<Letter>(c));
    return PeriodicConfig(kBinary, std::move(v));
}

}  // namespace

TEST_CASE("rationals reduce into canonical circle form") {
    CHECK(make_rational(2, 4) == Rational{1, 2});
    CHECK(make_rational(2, 4).str() == "1/2");
    CHECK(make_rational(5, 4) == Rational{1, 4});
    CHECK(make_rational(-1, 4) == Rational{3, 4});
    CHECK(make_rational(0, 3) == Rational{0, 1});
    CHECK(make_rational(4, 4) == Rational{0, 1});
    CHECK(make_rational(3, 4).value() == 0.75);
    CHECK_THROWS_AS(make_rational(1, 0), std::invalid_argument);
}

TEST_CASE("orbit cycles are found exactly") {
    const PeriodicConfig x = config({0, 0, 1, 0});

    const auto id = orbit_cycle(wolfram_rule(204), x, 8);
    REQUIRE(id.has_value());
    CHECK(id->tau == 0);
    CHECK(id->q == 1);

    const auto flip = orbit_cycle(wolfram_rule(51), x, 8);
    REQUIRE(flip.has_value());
    CHECK(flip->tau == 0);
    CHECK(flip->q == 2);

    const auto shl = orbit_cycle(wolfram_rule(170), x, 8);
    REQUIRE(shl.has_value());
    CHECK(shl->tau == 0);
    CHECK(shl->q == 4);
    CHECK(!orbit_cycle(wolfram_rule(170), x, 3).has_value());

    const auto zero = orbit_cycle(wolfram_rule(0), x, 8);
    REQUIRE(zero.has_value());
    CHECK(zero->tau == 1);
    CHECK(zero->q == 1);

    CHECK_THROWS_AS(orbit_cycle(wolfram_rule(170), x, 0), std::invalid_argument);
}

TEST_CASE("cycle spectra list the reduced q-th roots") {
    const CycleSpectrum s = cycle_spectrum(4);
    REQUIRE(s.frequencies.size() == 4);
    CHECK(s.frequencies[0] == Rational{0, 1});
    CHECK(s.frequencies[1] == Rational{1, 4});
    CHECK(s.frequencies[2] == Rational{1, 2});
    CHECK(s.frequencies[3] == Rational{3, 4});
    CHECK(cycle_spectrum(1).frequencies == std::vector<Rational>{Rational{0, 1}});
    CHECK_THROWS_AS(cycle_spectrum(0), std::invalid_argument);
}

TEST_CASE("observables evaluate and center as declared") {
    const PeriodicConfig one = config({1, 0, 0, 0});
    const PeriodicConfig zero = config({0, 0, 0, 0});

    const Observable c = Observable::constant(0.25);
    CHECK(c(one) == 0.25);
    CHECK(!c.centered());
    CHECK_THROWS_AS(Observable::constant(1.5), std::invalid_argument);

    const Observable letter = Observable::letter_at_origin(kUniform);
    CHECK(letter(one) == 0.5);
    CHECK(letter(zero) == -0.5);
    CHECK(letter.centered());
    CHECK(letter.sup_bound() >= 0.5);
    CHECK(!letter.name().empty());

    const Observable raw = Observable::letter_at_origin(kUniform, false);
    CHECK(raw(one) == 1.0);
    CHECK(raw(zero) == 0.0);

    const Observable ind = Observable::cylinder_indicator(kUniform, Cylinder{{1, 1}, -1});
    const PeriodicConfig hit = config({1, 0, 0, 1});  // x_{-1} = x_3 = 1, x_0 = 1
    CHECK(ind(hit) == 0.75);
    CHECK(ind(zero) == -0.25);
    const Observable ind_raw = Observable::cylinder_indicator(kUniform, Cylinder{{1, 1}, -1}, false);
    CHECK(ind_raw(hit) == 1.0);
    CHECK(ind_raw(zero) == 0.0);
}

TEST_CASE("unit phases are exact on the quarter lattice") {
    CHECK(unit_phase(0.0, 5) == std::complex<double>(1.0, 0.0));
    CHECK(unit_phase(0.25, 1) == std::complex<double>(0.0, -1.0));
    CHECK(unit_phase(0.25, 2) == std::complex<double>(-1.0, 0.0));
    CHECK(unit_phase(0.25, 7) == std::complex<double>(0.0, 1.0));
    CHECK(unit_phase(0.5, 1) == std::complex<double>(-1.0, 0.0));
    CHECK(unit_phase(0.75, 1) == std::complex<double>(0.0, 1.0));

    const std::complex<double> p = unit_phase(0.3, 1);
    const std::complex<double> ref = std::polar(1.0, -2.0 * std::acos(-1.0) * 0.3);
    CHECK(std::abs(p - ref) < 1e-15);
    CHECK(std::fabs(std::abs(unit_phase(0.3, 1000003)) - 1.0) < 1e-12);
}

TEST_CASE("wiener sums agree with the naive transform") {
    const SeedStream rng{31, 0};
    const PeriodicConfig x0 = sample_config(kUniform, 8, rng.child(0));
    const Observable g = Observable::letter_at_origin(kUniform);
    const LocalRule rule = wolfram_rule(90);
    const double pi = std::acos(-1.0);
    const int T = 32;

    for (double alpha : {0.0, 0.25, 0.3, 1.0 / 3.0, 0.875}) {
        std::complex<double> naive{0.0, 0.0};
        PeriodicConfig cur = x0;
        for (int n = 0; n < T; ++n) {
            naive += std::polar(1.0, -2.0 * pi * alpha * n) * g(cur);
            cur = step(rule, cur);
        }
        naive /= static_cast<double>(T);
        const std::complex<double> fast = wiener_sum(rule, x0, g, alpha, T);
        CHECK(std::abs(fast - naive) < 1e-12);
    }
    CHECK(wiener_sum(rule, x0, g, 0.0, 1) == std::complex<double>(g(x0), 0.0));
    CHECK_THROWS_AS(wiener_sum(rule, x0, g, 0.0, 0), std::invalid_argument);
}

TEST_CASE("flip rule carries an exact atom at alpha = 1/2") {
    const Observable g = Observable::letter_at_origin(kUniform);
    const std::vector<double> grid{0.0, 0.25, 0.5, 0.75};
    const SpectralScan scan = eigenvalue_scan(wolfram_rule(51), kUniform, g, grid, 64, 16, 64, SeedStream{32, 0});

    REQUIRE(scan.alpha_grid == grid);
    REQUIRE(scan.atom_mass.size() == 4);
    CHECK(scan.atom_mass[0] == 0.0);
    CHECK(scan.atom_mass[1] == 0.0);
    CHECK(scan.atom_mass[2] == 0.25);  // exact: quarter phases and dyadic values only
    CHECK(scan.atom_mass[3] == 0.0);
    CHECK(scan.observable == g.name());
    // period-2 orbits revisit immediately, so the guard must fire
    CHECK(scan.cycle_guard == 1.0);
    CHECK(scan.guard_exceeded);

    const SpectralScan again =
        eigenvalue_scan(wolfram_rule(51), kUniform, g, grid, 64, 16, 64, SeedStream{32, 0});
    CHECK(again.atom_mass == scan.atom_mass);
}

TEST_CASE("identity rule puts its atom at alpha = 0") {
    const Observable g = Observable::letter_at_origin(kUniform);
    const std::vector<double> grid{0.0, 0.25, 0.5, 0.75};
    const SpectralScan scan = eigenvalue_scan(wolfram_rule(204), kUniform, g, grid, 64, 16, 64, SeedStream{33, 0});
    CHECK(scan.atom_mass[0] == 0.25);
    CHECK(scan.atom_mass[1] == 0.0);
    CHECK(scan.atom_mass[2] == 0.0);
    CHECK(scan.atom_mass[3] == 0.0);
}

TEST_CASE("scan grid is sorted and deduplicated and inputs are validated") {
    const Observable g = Observable::letter_at_origin(kUniform);
    const SpectralScan scan =
        eigenvalue_scan(wolfram_rule(204), kUniform, g, {0.5, 0.25, 0.25}, 4, 2, 16, SeedStream{34, 0});
    CHECK(scan.alpha_grid == std::vector<double>{0.25, 0.5});

    CHECK(uniform_alpha_grid(4) == std::vector<double>{0.0, 0.25, 0.5, 0.75});
    CHECK_THROWS_AS(uniform_alpha_grid(0), std::invalid_argument);

    CHECK_THROWS_AS(eigenvalue_scan(wolfram_rule(204), kUniform, g, {}, 4, 2, 16, SeedStream{34, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(eigenvalue_scan(wolfram_rule(204), kUniform, g, {0.0}, 0, 2, 16, SeedStream{34, 2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(eigenvalue_scan(wolfram_rule(204), kUniform, g, {0.0}, 4, 0, 16, SeedStream{34, 3}),
                    std::invalid_argument);
    const BernoulliMeasure ternary = BernoulliMeasure::uniform(Alphabet{3});
    CHECK_THROWS_AS(eigenvalue_scan(wolfram_rule(204), ternary, g, {0.0}, 4, 2, 16, SeedStream{34, 4}),
                    std::invalid_argument);
}

TEST_CASE("shift control shows only the trivial atom") {
    const std::vector<double> quarter{0.0, 0.25, 0.5, 0.75};
    const SpectralScan ones = shift_spectrum_check(kUniform, Observable::constant(1.0), quarter, 64, 8, 128,
                                                   SeedStream{35, 0});
    CHECK(ones.atom_mass[0] == 1.0);
    CHECK(ones.atom_mass[1] == 0.0);
    CHECK(ones.atom_mass[2] == 0.0);
    CHECK(ones.atom_mass[3] == 0.0);

    // centered observable: pure estimator noise, bounded by the calibrated ceiling
    const int T = 128;
    const SpectralScan noise = shift_spectrum_check(kUniform, Observable::letter_at_origin(kUniform),
                                                    uniform_alpha_grid(64), T, 32, 512, SeedStream{35, 1});
    CHECK(noise.cycle_guard == 0.0);
    const double peak = *std::max_element(noise.atom_mass.begin(), noise.atom_mass.end());
    CHECK(peak <= default_scan_threshold(T));
}

TEST_CASE("cycle guard stays silent before the orbit closes") {
    const Observable g = Observable::letter_at_origin(kUniform);
    // on period 128 rule 90 reaches the zero configuration only at step 64
    const SpectralScan scan =
        eigenvalue_scan(wolfram_rule(90), kUniform, g, {0.0, 0.5}, 32, 8, 128, SeedStream{36, 0});
    CHECK(scan.cycle_guard == 0.0);
    CHECK(!scan.guard_exceeded);
}

TEST_CASE("correlation decay: identity keeps full correlation") {
    const Cylinder u{{1}, 0};
    const auto exact = exact_correlation(wolfram_rule(204), u, u, 3, 8);
    REQUIRE(exact.size() == 4);
    for (double v : exact) CHECK(v == 0.25);

    const Cylinder z{{0}, 0};
    const auto anti = exact_correlation(wolfram_rule(204), z, u, 0, 8);
    CHECK(anti[0] == -0.25);

    const auto mc = correlation_decay(wolfram_rule(204), kUniform, u, u, 3, 4000, 32, SeedStream{37, 0});
    REQUIRE(mc.size() == 4);
    for (const CorrelationPoint& pt : mc) {
        CHECK(pt.product == 0.25);
        CHECK(pt.ci.contains(0.25));
        CHECK(pt.estimate == pt.joint_hat - pt.product);
    }
}

TEST_CASE("rule 90 correlations vanish identically for n >= 1") {
    const Cylinder u{{1}, 0};
    const auto exact = exact_correlation(wolfram_rule(90), u, u, 4, 12);
    REQUIRE(exact.size() == 5);
    CHECK(exact[0] == 0.25);
    for (int n = 1; n <= 4; ++n) CHECK(exact[n] == 0.0);

    const auto mc = correlation_decay(wolfram_rule(90), kUniform, u, u, 4, 20000, 32, SeedStream{38, 0});
    CHECK(std::fabs(mc[0].estimate - 0.25) < 0.02);
    for (int n = 1; n <= 4; ++n) CHECK(std::fabs(mc[n].estimate) < 0.02);
}

TEST_CASE("correlation guards reject undersized periods") {
    const Cylinder u{{1}, 0};
    CHECK_THROWS_AS(correlation_decay(wolfram_rule(90), kUniform, u, u, 4, 100, 8, SeedStream{39, 0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(exact_correlation(wolfram_rule(90), u, u, 1, 25), GuardExceeded);
}

TEST_CASE("best_rational searches the Stern grid") {
    CHECK(best_rational(0.5, 64) == Rational{1, 2});
    CHECK(best_rational(1.0 / 3.0, 64) == Rational{1, 3});
    CHECK(best_rational(0.25, 64) == Rational{1, 4});
    CHECK(best_rational(0.0, 8) == Rational{0, 1});
    const Rational near = best_rational(0.4142, 16);
    CHECK(near == Rational{5, 12});
    CHECK_THROWS_AS(best_rational(0.5, 0), std::invalid_argument);
}

TEST_CASE("rationality verdict passes rational atoms and rejects strays") {
    const Observable g = Observable::letter_at_origin(kUniform);
    const SpectralScan scan = eigenvalue_scan(wolfram_rule(51), kUniform, g, uniform_alpha_grid(64), 64, 8,
                                              64, SeedStream{40, 0});
    const RationalityVerdict ok = rationality_verdict(scan, default_scan_threshold(64));
    CHECK(ok.pass);
    REQUIRE(ok.flagged.size() == 1);
    CHECK(ok.flagged[0].alpha == 0.5);
    CHECK(ok.flagged[0].matched == Rational{1, 2});
    CHECK(ok.flagged[0].distance == 0.0);
    CHECK(ok.flagged[0].within_grid);

    SpectralScan stray;
    stray.alpha_grid = uniform_alpha_grid(1024);
    const double alien = 0.4142;  // nearest q <= 16 rational is 5/12, 0.0025 away
    stray.alpha_grid.insert(std::lower_bound(stray.alpha_grid.begin(), stray.alpha_grid.end(), alien),
                            alien);
    stray.atom_mass.assign(stray.alpha_grid.size(), 0.0);
    const auto idx = static_cast<std::size_t>(
        std::lower_bound(stray.alpha_grid.begin(), stray.alpha_grid.end(), alien) -
        stray.alpha_grid.begin());
    stray.atom_mass[idx] = 0.02;
    stray.T = 1024;

    const RationalityVerdict bad = rationality_verdict(stray, 0.004, 16);
    CHECK(!bad.pass);
    REQUIRE(bad.flagged.size() == 1);
    CHECK(bad.flagged[0].matched == Rational{5, 12});
    CHECK(!bad.flagged[0].within_grid);
    CHECK(bad.grid_step == doctest::Approx(1.0 / 1024.0));

    SpectralScan misaligned;
    misaligned.alpha_grid = {0.0, 0.5};
    misaligned.atom_mass = {0.0};
    CHECK_THROWS_AS(rationality_verdict(misaligned, 0.01), std::invalid_argument);
}
