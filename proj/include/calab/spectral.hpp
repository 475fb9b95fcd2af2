#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "calab/core.hpp"
#include "calab/rng.hpp"
#include "calab/stats.hpp"

namespace calab {

// A point on the rational circle, reduced, with 0 <= num < den.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
    bool operator==(const Rational&) const = default;
};

// Reduce p/q into canonical form (p taken mod q first). Requires q >= 1.
Rational make_rational(std::int64_t p, std::int64_t q);

// ---------------------------------------------------------------------------
// Orbit cycles and their exact spectra.

struct OrbitCycle {
    int tau = 0;  // preperiod
    int q = 1;    // period
};

// Smallest (tau, q) with F^{tau+q}(x) = F^tau(x) and tau + q <= cap, found by
// exact configuration storage; nullopt if the orbit does not close up by cap.
std::optional<OrbitCycle> orbit_cycle(const LocalRule& rule, const PeriodicConfig& x, int cap);

struct CycleSpectrum {
    int tau = 0;
    int q = 1;
    std::vector<Rational> frequencies;  // p/q for p = 0..q-1, reduced
};

CycleSpectrum cycle_spectrum(int q, int tau = 0);

// ---------------------------------------------------------------------------
// Observables: bounded functions of a configuration, centered by default so
// that the mean under the declared Bernoulli measure is subtracted.

class Observable {
public:
    // g(x) = c, not centered; diagnostic mode for trivial-atom checks.
    static Observable constant(double c);
    // g(x) = x_0 / (k-1) - mean (mean taken under mu when centered).
    static Observable letter_at_origin(const BernoulliMeasure& mu, bool centered = true);
    // g(x) = 1_{[u]_l}(x) - mu([u]_l) when centered.
    static Observable cylinder_indicator(const BernoulliMeasure& mu, Cylinder cyl, bool centered = true);

    double operator()(const PeriodicConfig& x) const;
    double sup_bound() const { return bound_; }
    bool centered() const { return centered_; }
    const std::string& name() const { return name_; }

private:
    enum class Kind { Constant, Letter, Cylinder };

    Observable() = default;

    Kind kind_ = Kind::Constant;
    bool centered_ = false;
    double constant_ = 0.0;  // Constant value
    double scale_ = 1.0;     // Letter: 1/(k-1)
    double mean_ = 0.0;      // subtracted when centered
    double bound_ = 1.0;
    Cylinder cyl_;
    std::string name_;
};

// e^{-2 pi i n alpha}. Exact (+-1, -+i) whenever 4*alpha is an integer; long
// double reduction of n*alpha mod 1 otherwise, so phase error stays ~1e-16
// even for n up to 2^20.
std::complex<double> unit_phase(double alpha, std::int64_t n);

// S_T(alpha) = (1/T) sum_{n=0}^{T-1} e^{-2 pi i n alpha} g(F^n x).
std::complex<double> wiener_sum(const LocalRule& rule, const PeriodicConfig& x, const Observable& g,
                                double alpha, int T);

// ---------------------------------------------------------------------------
// Eigenvalue scans.

struct SpectralScan {
    std::vector<double> alpha_grid;  // sorted, deduplicated
    int T = 1;
    std::uint64_t orbits = 0;
    Index N = 0;
    std::string observable;
    std::vector<double> atom_mass;   // E_orbits |S_T(alpha)|^2, aligned with alpha_grid
    double cycle_guard = 0.0;        // fraction of orbits that revisited a configuration before T
    double guard_limit = 0.05;
    bool guard_exceeded = false;
};

// The uniform grid {i/points : 0 <= i < points}.
std::vector<double> uniform_alpha_grid(int points);

// Atom-mass estimator over `orbits` initial conditions sampled from `measure`
// on period-N configurations. Deterministic for a fixed SeedStream; the cycle
// guard is reported in-band rather than thrown.
SpectralScan eigenvalue_scan(const LocalRule& rule, const BernoulliMeasure& measure, const Observable& g,
                             std::vector<double> alpha_grid, int T, std::uint64_t orbits, Index N,
                             const SeedStream& rng);

// Control experiment: the same scan run against the shift map, whose centered
// process is i.i.d.; everything seen here is estimator noise.
SpectralScan shift_spectrum_check(const BernoulliMeasure& measure, const Observable& g,
                                  std::vector<double> alpha_grid, int T, std::uint64_t orbits, Index N,
                                  const SeedStream& rng);

// Calibrated noise ceiling for scans: max atom mass observed on i.i.d.
// controls stays below ~0.5/T, and the default threshold keeps a 10x margin.
inline constexpr double kScanThresholdC = 4.0;

inline double default_scan_threshold(int T) { return kScanThresholdC / static_cast<double>(T); }

// ---------------------------------------------------------------------------
// Correlation decay.

struct CorrelationPoint {
    int n = 0;
    double joint_hat = 0.0;   // empirical mu(U cap F^{-n} V)
    double product = 0.0;     // exact mu(U) mu(V)
    double estimate = 0.0;    // joint_hat - product
    stats::Interval ci;       // Wilson interval for joint, shifted by -product
};

// Monte Carlo correlations mu(U cap F^{-n} V) - mu(U)mu(V) for n = 0..n_max.
std::vector<CorrelationPoint> correlation_decay(const LocalRule& rule, const BernoulliMeasure& measure,
                                                const Cylinder& U, const Cylinder& V, int n_max,
                                                std::uint64_t samples, Index N, const SeedStream& rng);

// Exact counterpart on the period-N torus under the uniform measure,
// enumerating all k^N configurations (guarded at 2^24).
std::vector<double> exact_correlation(const LocalRule& rule, const Cylinder& U, const Cylinder& V,
                                      int n_max, Index N);

// ---------------------------------------------------------------------------
// Rationality verdict.

struct FlaggedAtom {
    double alpha = 0.0;
    double atom_mass = 0.0;
    Rational matched;         // best p/q with q <= den_bound
    double distance = 0.0;    // circle distance |alpha - matched|
    bool within_grid = false; // distance <= one grid step
};

struct RationalityVerdict {
    bool pass = true;
    double threshold = 0.0;
    int den_bound = 64;
    double grid_step = 0.0;  // max adjacent gap of the scan grid
    std::vector<FlaggedAtom> flagged;
};

// Closest rational p/q to alpha (circle metric) with 1 <= q <= den_bound;
// ties resolved toward the smaller denominator.
Rational best_rational(double alpha, int den_bound);

RationalityVerdict rationality_verdict(const SpectralScan& scan, double threshold, int den_bound = 64);

}  // namespace calab
