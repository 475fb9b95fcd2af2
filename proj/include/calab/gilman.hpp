#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "calab/core.hpp"
#include "calab/kurka.hpp"
#include "calab/stats.hpp"

namespace calab {

enum class Direction { Left, Right, Both };

const char* to_string(Direction d);

// Horizon-T estimate of p_t: the probability that a random change on
// I = [i1, i2) ever (some step <= T) affects a site at distance > t from I
// on the given side(s).
struct PropagationEstimate {
    Index i1 = 0, i2 = 1;
    int t = 0;
    int T = 1;
    std::uint64_t samples = 0;
    double p_hat = 0.0;
    stats::Interval ci;
    Direction direction = Direction::Both;
};

// Monte Carlo estimate of the Definition-5 ratio
// mu([x(-n,n)] cap B_[-m,m](x)) / mu([x(-n,n)]) truncated at horizon T.
struct RatioEstimate {
    int m = 1;
    int n = 1;
    int T = 1;
    std::uint64_t samples = 0;
    double ratio_hat = 0.0;
    stats::Interval ci;
};

enum class GilmanClass { A, B, C, Inconclusive };

const char* to_string(GilmanClass c);

struct GilmanParams {
    // ratio curves (class-B evidence)
    int m = 1;
    std::vector<int> n_grid{2, 4, 8};
    int ratio_T = 16;
    std::uint64_t ratio_samples = 2000;
    int points = 2;        // sampled base points x
    Index ratio_N = 256;   // period of the sampled points
    double ratio_target = 0.5;
    // propagation profiles (class-C evidence)
    Index i1 = 0, i2 = 1;  // the perturbed interval I
    std::vector<int> t_grid{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
    int prop_T = 64;
    std::uint64_t prop_samples = 10000;
    Index prop_N = 256;
    double p_threshold = 0.99;
    // A/B split evidence
    KurkaParams kurka;
};

struct GilmanVerdict {
    GilmanClass cls = GilmanClass::Inconclusive;
    std::optional<Direction> direction;  // set for class C
    KurkaReport kurka;
    std::vector<std::vector<RatioEstimate>> curves;  // one curve per sampled point
    std::vector<PropagationEstimate> left_profile;
    std::vector<PropagationEstimate> right_profile;
    GilmanParams params;
};

// Truncated membership test for y in B_[-m,m](x):
// F^j(x)(-m, m) == F^j(y)(-m, m) for all 0 <= j <= T.
bool trace_equivalent(const LocalRule& rule, const PeriodicConfig& x, const PeriodicConfig& y,
                      int m, int T);

// Samples y = resample_outside(x, -n, n) and reports the fraction that stay
// trace-equivalent to x. Unbiased for the horizon-T ratio.
RatioEstimate estimate_class_ratio(const LocalRule& rule, const PeriodicConfig& x, int m, int n,
                                   int T, std::uint64_t samples, const SeedStream& rng);

// One ratio estimate per n (shared base point x), the finite surrogate for
// Definition 5's n -> infinity limit.
std::vector<RatioEstimate> mu_equicontinuity_curve(const LocalRule& rule,
                                                   const PeriodicConfig& x, int m,
                                                   const std::vector<int>& n_list, int T,
                                                   std::uint64_t samples, const SeedStream& rng);

// Per-sample maximum propagation distances under common random numbers:
// sample i draws x uniform on period N and a conditioned re-randomization of
// I, then records the largest left/right distance from I at which the two
// orbits ever differ within T steps. Indicators {dist > t} are therefore
// monotone in t per sample, exactly.
struct PropagationDistances {
    Index i1 = 0, i2 = 1;
    int T = 1;
    std::vector<int> left;   // per-sample max distance on the left of I
    std::vector<int> right;  // per-sample max distance on the right of I
};

PropagationDistances propagation_distances(const LocalRule& rule, Index i1, Index i2, int T,
                                           Index N, std::uint64_t samples,
                                           const SeedStream& rng);

PropagationEstimate estimate_p_t(const LocalRule& rule, Index i1, Index i2, int t, int T,
                                 Direction direction, Index N, std::uint64_t samples,
                                 const SeedStream& rng);

// Shares one PropagationDistances draw across the whole t grid (common random
// numbers).
std::vector<PropagationEstimate> propagation_profile(const LocalRule& rule, Index i1, Index i2,
                                                     const std::vector<int>& t_list, int T,
                                                     Direction direction, Index N,
                                                     std::uint64_t samples,
                                                     const SeedStream& rng);

// Class-B curve criterion: ratio increases with n (positive least-squares
// slope) and the final estimate has reached the target.
bool curve_trends_to_one(const std::vector<RatioEstimate>& curve, double target);

// Decision procedure: certified blocking word => A; some sampled curve
// trending to 1 => B; p_hat >= threshold for all tested t in some direction
// => C; otherwise Inconclusive (a legal outcome).
GilmanVerdict classify_gilman(const LocalRule& rule, const GilmanParams& params,
                              const SeedStream& rng);

}  // namespace calab
