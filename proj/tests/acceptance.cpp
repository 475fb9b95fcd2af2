// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "calab/decider.hpp"
#include "calab/experiment.hpp"
#include "calab/gilman.hpp"
#include "calab/kurka.hpp"
#include "calab/spectral.hpp"

using namespace calab;

namespace {

const Alphabet kBinary{2};
const BernoulliMeasure kUniform = BernoulliMeasure::uniform(kBinary);

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }
Outcome pass(std::string note) { return {true, std::move(note)}; }

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// 1. subset-construction surjectivity equals brute-force balance at L=8 on all
//    256 elementary rules, within the runtime budget
Outcome criterion_surjectivity_oracle() {
    const auto start = std::chrono::steady_clock::now();
    int surjective_count = 0;
    for (int id = 0; id < 256; ++id) {
        const LocalRule rule = wolfram_rule(id);
        const bool decided = is_surjective(rule).surjective;
        const bool oracle = is_balanced_up_to(rule, 8);
        if (decided != oracle) return fail("rule " + std::to_string(id) + " disagrees with balance oracle");
        surjective_count += decided ? 1 : 0;
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 60.0) return fail("runtime " + std::to_string(elapsed) + " s exceeds 60 s");
    char note[128];
    std::snprintf(note, sizeof(note), "256 rules, %d surjective, %.2f s", surjective_count, elapsed);
    return pass(note);
}

// 2. uniform-measure invariance at L=6 is equivalent to surjectivity
Outcome criterion_invariance() {
    for (int id = 0; id < 256; ++id) {
        const LocalRule rule = wolfram_rule(id);
        if (verify_uniform_invariance(rule, 6) != is_surjective(rule).surjective)
            return fail("rule " + std::to_string(id) + " breaks the invariance equivalence");
    }
    return pass("invariance(L=6) == surjectivity on all 256 rules");
}

// 3. blocking-word controls: 204 certified, 170 refuted quickly, 51 certified
Outcome criterion_kurka_controls() {
    for (Letter a : {Letter{0}, Letter{1}}) {
        const BlockingCertificate cert = certify_blocking(wolfram_rule(204), Word{a}, 1, 0, 32);
        if (cert.status != BlockingStatus::CertifiedUpTo)
            return fail("rule 204 word " + word_string(Word{a}) + " not certified");
        const BlockingCertificate flip = certify_blocking(wolfram_rule(51), Word{a}, 1, 0, 32);
        if (flip.status != BlockingStatus::CertifiedUpTo)
            return fail("rule 51 word " + word_string(Word{a}) + " not certified");
    }
    int refuted = 0;
    for (int len = 1; len <= 6; ++len) {
        Word w(static_cast<std::size_t>(len), 0);
        do {
            for (int p = 0; p <= len - 1; ++p) {
                const int horizon = len + 2;
                const BlockingCertificate cert = certify_blocking(wolfram_rule(170), w, 1, p, horizon);
                if (cert.status != BlockingStatus::Refuted)
                    return fail("rule 170 word " + word_string(w) + " offset " + std::to_string(p) +
                                " not refuted by T = |w|+2");
                if (!cert.counterexample || cert.counterexample->first_bad_step > horizon)
                    return fail("rule 170 refutation of " + word_string(w) + " lacks an early counterexample");
                ++refuted;
            }
        } while (next_word(w, 2));
    }
    return pass("204/51 certified; 170: all " + std::to_string(refuted) + " candidates refuted at T <= |w|+2");
}

GilmanParams acceptance_gilman_params() {
    GilmanParams params;
    params.t_grid.clear();
    for (int t = 1; t <= 16; ++t) params.t_grid.push_back(t);
    params.prop_T = 64;
    params.prop_samples = 10000;
    params.prop_N = 256;
    return params;
}

// 4. Gilman controls: 204 -> A; 170, 90 -> C with tight propagation profiles;
//    170 is exactly directional; profiles monotone under common random numbers
Outcome criterion_gilman_controls() {
    const GilmanParams params = acceptance_gilman_params();

    const GilmanVerdict id204 = classify_gilman(wolfram_rule(204), params, SeedStream{1004, 0});
    if (id204.cls != GilmanClass::A) return fail("rule 204 not class A");

    const GilmanVerdict shl = classify_gilman(wolfram_rule(170), params, SeedStream{1004, 1});
    const GilmanVerdict xor2 = classify_gilman(wolfram_rule(90), params, SeedStream{1004, 2});
    if (shl.cls != GilmanClass::C) return fail("rule 170 not class C");
    if (xor2.cls != GilmanClass::C) return fail("rule 90 not class C");

    const auto monotone = [](const std::vector<PropagationEstimate>& profile) {
        for (std::size_t i = 1; i < profile.size(); ++i)
            if (profile[i].p_hat > profile[i - 1].p_hat) return false;
        return true;
    };
    for (const GilmanVerdict* v : {&id204, &shl, &xor2})
        if (!monotone(v->left_profile) || !monotone(v->right_profile))
            return fail("propagation profile not monotone in t");

    for (const PropagationEstimate& est : shl.left_profile)
        if (est.p_hat != 1.0) return fail("rule 170 left p_hat not exactly 1");
    for (const PropagationEstimate& est : shl.right_profile)
        if (est.t >= 1 && est.p_hat != 0.0) return fail("rule 170 right p_hat not exactly 0");

    for (const auto& profile : {xor2.left_profile, xor2.right_profile})
        for (const PropagationEstimate& est : profile) {
            if (est.t > 16) continue;
            if (est.p_hat < 0.99 || est.ci.lo < 0.98)
                return fail("rule 90 p_hat at t=" + std::to_string(est.t) + " below threshold");
        }

    return pass("204 -> A; 170 -> C (left, exact); 90 -> C (both); profiles monotone");
}

// 5. shift ratio closed form k^{-max(0, T+m-n)} sits inside the Wilson CI
Outcome criterion_ratio_oracle() {
    const SeedStream rng{1005, 0};
    const PeriodicConfig x = sample_config(kUniform, 64, rng.child(0));
    for (int n : {2, 4, 8, 16}) {
        const RatioEstimate est =
            estimate_class_ratio(wolfram_rule(170), x, 1, n, 16, 10000, rng.child(static_cast<unsigned>(n)));
        const double closed = std::pow(2.0, -std::max(0, 16 + 1 - n));
        if (!est.ci.contains(closed))
            return fail("n=" + std::to_string(n) + ": CI [" + std::to_string(est.ci.lo) + ", " +
                        std::to_string(est.ci.hi) + "] misses " + std::to_string(closed));
    }
    return pass("rule 170 ratio matches 2^-(T+m-n) for n in {2,4,8,16}");
}

// 6. positive spectral control: rule 51 atom at 1/2 is exactly 1/4
Outcome criterion_spectral_positive() {
    const Observable g = Observable::letter_at_origin(kUniform);
    const int T = 256;
    const SpectralScan scan = eigenvalue_scan(wolfram_rule(51), kUniform, g, uniform_alpha_grid(256), T, 50,
                                              256, SeedStream{1006, 0});
    const auto it = std::find(scan.alpha_grid.begin(), scan.alpha_grid.end(), 0.5);
    if (it == scan.alpha_grid.end()) return fail("alpha = 1/2 missing from the grid");
    const double atom = scan.atom_mass[static_cast<std::size_t>(it - scan.alpha_grid.begin())];
    if (atom != 0.25) return fail("atom(1/2) = " + std::to_string(atom) + ", expected exactly 0.25");

    const RationalityVerdict verdict = rationality_verdict(scan, default_scan_threshold(T));
    if (!verdict.pass) return fail("rationality verdict did not pass");
    if (verdict.flagged.size() != 1 || !(verdict.flagged[0].matched == Rational{1, 2}))
        return fail("flagged atoms do not reduce to the single match 1/2");
    return pass("atom(1/2) = 0.25 exactly; verdict PASS with match 1/2");
}

// 7. negative spectral control: full-scale scans of rules 90 and 170 flag
//    nothing but alpha = 0 diagnostics at the calibrated threshold
Outcome criterion_spectral_negative() {
    static_assert(kScanThresholdC <= 25.0, "calibration constant must stay within the derived bound");
    const int T = 1 << 10;
    std::string note;
    for (int id : {90, 170}) {
        const SpectralScan scan =
            eigenvalue_scan(wolfram_rule(id), kUniform, Observable::letter_at_origin(kUniform),
                            uniform_alpha_grid(1024), T, 100, 1 << 12, SeedStream{1007, static_cast<std::uint64_t>(id)});
        if (scan.cycle_guard >= 0.05)
            return fail("rule " + std::to_string(id) + " cycle guard " + std::to_string(scan.cycle_guard));
        const RationalityVerdict verdict = rationality_verdict(scan, default_scan_threshold(T));
        if (!verdict.pass) return fail("rule " + std::to_string(id) + " rationality verdict failed");
        for (const FlaggedAtom& atom : verdict.flagged)
            if (atom.alpha != 0.0)
                return fail("rule " + std::to_string(id) + " flags alpha = " + std::to_string(atom.alpha));
        const double peak = *std::max_element(scan.atom_mass.begin(), scan.atom_mass.end());
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%s90+170 peak %.2e", note.empty() ? "" : note.c_str(), peak);
        if (id == 170) note = buf;
    }
    return pass(note + " below threshold c/T with c = " + std::to_string(static_cast<int>(kScanThresholdC)));
}

// 8. cycle spectra of random elementary rules are exact rationals, and the
//    wiener sum agrees with a direct DFT on the periodic part
Outcome criterion_cycle_spectra() {
    SplitMix64 pick(1008);
    int orbits_checked = 0;
    for (int trial = 0; trial < 24; ++trial) {
        const int id = static_cast<int>(pick.next() % 256);
        const Index N = 4 + static_cast<Index>(pick.next() % 9);  // 4..12
        const LocalRule rule = wolfram_rule(id);
        const PeriodicConfig x = sample_config(kUniform, N, SeedStream{1008, static_cast<std::uint64_t>(trial)});
        const int cap = 1 << 13;  // > 2^12 >= k^N, so the orbit must close
        const auto cycle = orbit_cycle(rule, x, cap);
        if (!cycle) return fail("orbit of rule " + std::to_string(id) + " did not close below the cap");

        const PeriodicConfig y = iterate(rule, x, cycle->tau);
        if (!(iterate(rule, y, cycle->q) == y))
            return fail("detected cycle of rule " + std::to_string(id) + " does not reproduce itself");

        const CycleSpectrum spectrum = cycle_spectrum(cycle->q, cycle->tau);
        const Observable g = Observable::letter_at_origin(kUniform);
        const double pi = std::acos(-1.0);
        std::size_t stride = spectrum.frequencies.size() / 8;
        if (stride == 0) stride = 1;
        for (std::size_t fi = 0; fi < spectrum.frequencies.size(); fi += stride) {
            const Rational& freq = spectrum.frequencies[fi];
            if (cycle->q % freq.den != 0)
                return fail("frequency " + freq.str() + " is not a q-th root for q = " +
                            std::to_string(cycle->q));
            const int T = cycle->q;
            std::complex<long double> naive{0.0L, 0.0L};
            PeriodicConfig cur = y;
            for (int n = 0; n < T; ++n) {
                const long double angle = -2.0L * static_cast<long double>(pi) *
                                          static_cast<long double>(freq.value()) * static_cast<long double>(n);
                naive += std::complex<long double>(std::cos(angle), std::sin(angle)) *
                         static_cast<long double>(g(cur));
                cur = step(rule, cur);
            }
            naive /= static_cast<long double>(T);
            const std::complex<double> fast = wiener_sum(rule, y, g, freq.value(), T);
            const double err = std::abs(fast - std::complex<double>(static_cast<double>(naive.real()),
                                                                    static_cast<double>(naive.imag())));
            if (err > 1e-12)
                return fail("wiener_sum differs from the DFT by " + std::to_string(err) + " on rule " +
                            std::to_string(id));
        }
        ++orbits_checked;
    }
    return pass(std::to_string(orbits_checked) + " random orbits: exact p/q frequencies, DFT agreement 1e-12");
}

// 9. rule 90 self-correlation of [1]_0 vanishes: exactly at N=12, within 4
//    sigma by Monte Carlo at N=2^12
Outcome criterion_correlation() {
    const Cylinder u{{1}, 0};
    const auto exact = exact_correlation(wolfram_rule(90), u, u, 5, 12);
    for (int n = 1; n <= 5; ++n)
        if (exact[static_cast<std::size_t>(n)] != 0.0)
            return fail("exact correlation at n=" + std::to_string(n) + " is nonzero");

    const std::uint64_t samples = 10000;
    const auto mc = correlation_decay(wolfram_rule(90), kUniform, u, u, 32, samples, 1 << 12,
                                      SeedStream{1009, 0});
    const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(samples));
    for (int n = 1; n <= 32; ++n) {
        const double est = mc[static_cast<std::size_t>(n)].estimate;
        if (std::fabs(est) > 4.0 * sigma)
            return fail("MC correlation at n=" + std::to_string(n) + " is " + std::to_string(est) +
                        ", beyond 4 sigma = " + std::to_string(4.0 * sigma));
    }
    return pass("exact zeros at N=12; MC within 4 sigma for n = 1..32");
}

// 10. repeated full runs with one seed give byte-identical result sections
Outcome criterion_determinism() {
    ExperimentConfig cfg;
    cfg.rule_spec = "eca:90";
    cfg.seed = 1010;
    cfg.kurka.max_len = 4;
    cfg.kurka.T = 8;
    cfg.gilman.ratio_samples = 500;
    cfg.gilman.prop_samples = 2000;
    cfg.gilman.prop_N = 128;
    cfg.gilman.prop_T = 32;
    cfg.gilman.t_grid = {1, 2, 4, 8};
    cfg.spectral.grid = 64;
    cfg.spectral.T = 128;
    cfg.spectral.orbits = 16;
    cfg.spectral.N = 256;

    const std::string a = run_experiment(cfg).at("results").dump();
    const std::string b = run_experiment(cfg).at("results").dump();
    if (a != b) return fail("two runs with seed 1010 produced different result bytes");
    return pass("full eca:90 run repeated: result sections byte-identical");
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"surjectivity decision vs balance oracle", criterion_surjectivity_oracle},
        {"uniform-measure invariance equivalence", criterion_invariance},
        {"blocking-word controls (204 / 170 / 51)", criterion_kurka_controls},
        {"gilman controls (204 -> A; 170, 90 -> C)", criterion_gilman_controls},
        {"class ratio closed form for the shift", criterion_ratio_oracle},
        {"spectral positive control (rule 51)", criterion_spectral_positive},
        {"spectral negative control (rules 90, 170)", criterion_spectral_negative},
        {"cycle spectra and DFT oracle agreement", criterion_cycle_spectra},
        {"correlation decay for rule 90", criterion_correlation},
        {"seeded determinism of full reports", criterion_determinism},
    };

    int failures = 0;
    int index = 0;
    for (const Criterion& c : criteria) {
        ++index;
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = fail(std::string("exception: ") + e.what());
        }
        failures += outcome.pass ? 0 : 1;
        std::printf("[%2d/10] %s  %s — %s\n", index, outcome.pass ? "PASS" : "FAIL", c.name,
                    outcome.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
