#include "calab/gilman.hpp"

#include <algorithm>
#include <stdexcept>

#include "calab/exec.hpp"

namespace calab {
namespace {

void require_compatible(const PeriodicConfig& x, const PeriodicConfig& y) {
    if (!(x.alphabet() == y.alphabet()))
        throw std::invalid_argument("configurations use different alphabets");
    if (x.period() != y.period())
        throw std::invalid_argument("configurations have different periods");
}

// Fraction of resampled y (agreeing with x on [-n, n)) whose [-m, m) windows
// track x's for all steps <= T.
RatioEstimate ratio_core(const LocalRule& rule, const PeriodicConfig& x, int m, int n, int T,
                         std::uint64_t samples, const SeedStream& rng) {
    const BernoulliMeasure uniform = BernoulliMeasure::uniform(rule.alphabet());
    const std::vector<Word> reference = trace(rule, x, -m, m, T);

    std::vector<std::uint8_t> hit(samples, 0);
    exec::parallel_for(samples, [&](std::size_t i) {
        PeriodicConfig y = resample_outside(x, -n, n, uniform, rng.child(i));
        PeriodicConfig buf = y;
        bool equivalent = true;
        for (int j = 0; j <= T && equivalent; ++j) {
            equivalent = window(y, -m, m) == reference[static_cast<std::size_t>(j)];
            if (equivalent && j < T) {
                step_into(rule, y, buf);
                std::swap(y, buf);
            }
        }
        hit[i] = equivalent ? 1 : 0;
    });

    std::uint64_t hits = 0;
    for (const std::uint8_t h : hit) hits += h;

    RatioEstimate est;
    est.m = m;
    est.n = n;
    est.T = T;
    est.samples = samples;
    est.ratio_hat = static_cast<double>(hits) / static_cast<double>(samples);
    est.ci = stats::wilson_interval(hits, samples);
    return est;
}

}  // namespace

const char* to_string(Direction d) {
    switch (d) {
        case Direction::Left: return "left";
        case Direction::Right: return "right";
        case Direction::Both: return "both";
    }
    return "?";
}

const char* to_string(GilmanClass c) {
    switch (c) {
        case GilmanClass::A: return "A";
        case GilmanClass::B: return "B";
        case GilmanClass::C: return "C";
        case GilmanClass::Inconclusive: return "inconclusive";
    }
    return "?";
}

bool trace_equivalent(const LocalRule& rule, const PeriodicConfig& x, const PeriodicConfig& y,
                      int m, int T) {
    require_compatible(x, y);
    if (m < 1) throw std::invalid_argument("trace_equivalent: m must be >= 1");
    if (T < 0) throw std::invalid_argument("trace_equivalent: T must be >= 0");
    PeriodicConfig a = x, b = y, abuf = x, bbuf = y;
    for (int j = 0; j <= T; ++j) {
        if (window(a, -m, m) != window(b, -m, m)) return false;
        if (j < T) {
            step_into(rule, a, abuf);
            std::swap(a, abuf);
            step_into(rule, b, bbuf);
            std::swap(b, bbuf);
        }
    }
    return true;
}

RatioEstimate estimate_class_ratio(const LocalRule& rule, const PeriodicConfig& x, int m, int n,
                                   int T, std::uint64_t samples, const SeedStream& rng) {
    if (m < 1 || n < m) throw std::invalid_argument("estimate_class_ratio: need n >= m >= 1");
    if (T < 1) throw std::invalid_argument("estimate_class_ratio: T must be >= 1");
    if (samples < 1) throw std::invalid_argument("estimate_class_ratio: samples must be >= 1");
    if (2 * static_cast<Index>(n) > x.period())
        throw std::invalid_argument("estimate_class_ratio: period too small for [-n, n)");
    return ratio_core(rule, x, m, n, T, samples, rng);
}

std::vector<RatioEstimate> mu_equicontinuity_curve(const LocalRule& rule,
                                                   const PeriodicConfig& x, int m,
                                                   const std::vector<int>& n_list, int T,
                                                   std::uint64_t samples,
                                                   const SeedStream& rng) {
    if (n_list.empty()) throw std::invalid_argument("mu_equicontinuity_curve: empty n list");
    for (std::size_t i = 0; i + 1 < n_list.size(); ++i)
        if (n_list[i] >= n_list[i + 1])
            throw std::invalid_argument("mu_equicontinuity_curve: n list must increase");
    std::vector<RatioEstimate> curve;
    curve.reserve(n_list.size());
    for (std::size_t i = 0; i < n_list.size(); ++i)
        curve.push_back(estimate_class_ratio(rule, x, m, n_list[i], T, samples, rng.child(i)));
    return curve;
}

PropagationDistances propagation_distances(const LocalRule& rule, Index i1, Index i2, int T,
                                           Index N, std::uint64_t samples,
                                           const SeedStream& rng) {
    if (i1 >= i2) throw std::invalid_argument("propagation_distances: need i1 < i2");
    if (T < 1) throw std::invalid_argument("propagation_distances: T must be >= 1");
    if (samples < 1) throw std::invalid_argument("propagation_distances: samples must be >= 1");
    const Index width = i2 - i1;
    const Index reach = static_cast<Index>(T) * rule.radius();
    if (width + 2 * reach > N)
        throw std::invalid_argument(
            "propagation_distances: period too small for (T, r); difference cones would wrap");

    const int k = rule.alphabet().size();
    PropagationDistances out;
    out.i1 = i1;
    out.i2 = i2;
    out.T = T;
    out.left.assign(samples, 0);
    out.right.assign(samples, 0);

    exec::parallel_for(samples, [&](std::size_t idx) {
        auto engine = rng.child(idx).engine();
        std::vector<Letter> cells(static_cast<std::size_t>(N));
        for (auto& c : cells) c = static_cast<Letter>(engine.below(static_cast<std::uint64_t>(k)));
        PeriodicConfig a(rule.alphabet(), cells);

        // Re-randomize I conditioned on changing it somewhere.
        auto wrap = [N](Index p) { return static_cast<std::size_t>(((p % N) + N) % N); };
        bool changed = false;
        while (!changed) {
            for (Index p = i1; p < i2; ++p) {
                const Letter v = static_cast<Letter>(engine.below(static_cast<std::uint64_t>(k)));
                changed = changed || v != a.cells()[wrap(p)];
                cells[wrap(p)] = v;
            }
        }
        PeriodicConfig b(rule.alphabet(), std::move(cells));

        PeriodicConfig abuf = a, bbuf = b;
        int max_left = 0, max_right = 0;
        for (int j = 1; j <= T; ++j) {
            step_into(rule, a, abuf);
            std::swap(a, abuf);
            step_into(rule, b, bbuf);
            std::swap(b, bbuf);
            const auto& av = a.cells();
            const auto& bv = b.cells();
            for (Index c = 0; c < N; ++c) {
                if (av[static_cast<std::size_t>(c)] == bv[static_cast<std::size_t>(c)]) continue;
                const Index rel = ((c - i1) % N + N) % N;
                if (rel < width) continue;  // inside I: distance 0
                // Attribute the site to the nearer side of I on the ring; the
                // no-wrap precondition keeps this unambiguous.
                const Index right_d = rel - width + 1;  // hops rightward from i2-1
                const Index left_d = N - rel;           // hops leftward from i1
                if (left_d <= right_d)
                    max_left = std::max(max_left, static_cast<int>(left_d));
                else
                    max_right = std::max(max_right, static_cast<int>(right_d));
            }
        }
        out.left[idx] = max_left;
        out.right[idx] = max_right;
    });
    return out;
}

namespace {

PropagationEstimate estimate_from_distances(const PropagationDistances& d, int t,
                                            Direction direction) {
    std::uint64_t hits = 0;
    const std::size_t n = d.left.size();
    for (std::size_t i = 0; i < n; ++i) {
        const bool left = d.left[i] > t;
        const bool right = d.right[i] > t;
        const bool hit = direction == Direction::Left    ? left
                         : direction == Direction::Right ? right
                                                         : (left || right);
        hits += hit ? 1 : 0;
    }
    PropagationEstimate est;
    est.i1 = d.i1;
    est.i2 = d.i2;
    est.t = t;
    est.T = d.T;
    est.samples = n;
    est.p_hat = static_cast<double>(hits) / static_cast<double>(n);
    est.ci = stats::wilson_interval(hits, n);
    est.direction = direction;
    return est;
}

}  // namespace

PropagationEstimate estimate_p_t(const LocalRule& rule, Index i1, Index i2, int t, int T,
                                 Direction direction, Index N, std::uint64_t samples,
                                 const SeedStream& rng) {
    if (t < 0) throw std::invalid_argument("estimate_p_t: t must be >= 0");
    if (static_cast<Index>(t) + static_cast<Index>(T) * rule.radius() >= N / 2)
        throw std::invalid_argument("estimate_p_t: period too small for (t, T)");
    const PropagationDistances d = propagation_distances(rule, i1, i2, T, N, samples, rng);
    return estimate_from_distances(d, t, direction);
}

std::vector<PropagationEstimate> propagation_profile(const LocalRule& rule, Index i1, Index i2,
                                                     const std::vector<int>& t_list, int T,
                                                     Direction direction, Index N,
                                                     std::uint64_t samples,
                                                     const SeedStream& rng) {
    if (t_list.empty()) throw std::invalid_argument("propagation_profile: empty t list");
    for (std::size_t i = 0; i + 1 < t_list.size(); ++i)
        if (t_list[i] >= t_list[i + 1])
            throw std::invalid_argument("propagation_profile: t list must increase");
    if (t_list.front() < 0) throw std::invalid_argument("propagation_profile: t must be >= 0");
    if (static_cast<Index>(t_list.back()) + static_cast<Index>(T) * rule.radius() >= N / 2)
        throw std::invalid_argument("propagation_profile: period too small for (t, T)");

    const PropagationDistances d = propagation_distances(rule, i1, i2, T, N, samples, rng);
    std::vector<PropagationEstimate> profile;
    profile.reserve(t_list.size());
    for (const int t : t_list) profile.push_back(estimate_from_distances(d, t, direction));
    return profile;
}

bool curve_trends_to_one(const std::vector<RatioEstimate>& curve, double target) {
    if (curve.size() < 2) return !curve.empty() && curve.back().ratio_hat >= target;
    std::vector<double> xs, ys;
    xs.reserve(curve.size());
    ys.reserve(curve.size());
    for (const auto& e : curve) {
        xs.push_back(static_cast<double>(e.n));
        ys.push_back(e.ratio_hat);
    }
    return stats::ls_slope(xs, ys) > 0.0 && curve.back().ratio_hat >= target;
}

GilmanVerdict classify_gilman(const LocalRule& rule, const GilmanParams& params,
                              const SeedStream& rng) {
    GilmanVerdict verdict;
    verdict.params = params;

    // (1) Kurka evidence: a certified blocking word puts the rule in class A.
    verdict.kurka = classify_kurka(rule, params.kurka);
    if (!verdict.kurka.certificates.empty()) {
        verdict.cls = GilmanClass::A;
        return verdict;
    }

    // (2) Ratio curves at sampled points: trending to 1 marks a class-B
    // candidate (mu-equicontinuous point without a blocking word).
    const BernoulliMeasure uniform = BernoulliMeasure::uniform(rule.alphabet());
    bool trending = false;
    for (int pt = 0; pt < params.points; ++pt) {
        const PeriodicConfig x =
            sample_config(uniform, params.ratio_N, rng.child(10000 + static_cast<std::uint64_t>(pt)));
        verdict.curves.push_back(mu_equicontinuity_curve(
            rule, x, params.m, params.n_grid, params.ratio_T, params.ratio_samples,
            rng.child(20000 + static_cast<std::uint64_t>(pt))));
        trending = trending || curve_trends_to_one(verdict.curves.back(), params.ratio_target);
    }
    if (trending) {
        verdict.cls = GilmanClass::B;
        return verdict;
    }

    // (3) Propagation profiles: p_hat >= threshold for every tested t in some
    // direction marks class C (almost expansive).
    const PropagationDistances d = propagation_distances(
        rule, params.i1, params.i2, params.prop_T, params.prop_N, params.prop_samples,
        rng.child(30000));
    bool left_ok = true, right_ok = true;
    for (const int t : params.t_grid) {
        verdict.left_profile.push_back(estimate_from_distances(d, t, Direction::Left));
        verdict.right_profile.push_back(estimate_from_distances(d, t, Direction::Right));
        left_ok = left_ok && verdict.left_profile.back().p_hat >= params.p_threshold;
        right_ok = right_ok && verdict.right_profile.back().p_hat >= params.p_threshold;
    }
    if (left_ok || right_ok) {
        verdict.cls = GilmanClass::C;
        verdict.direction = left_ok && right_ok ? Direction::Both
                            : left_ok           ? Direction::Left
                                                : Direction::Right;
        return verdict;
    }
    verdict.cls = GilmanClass::Inconclusive;
    return verdict;
}

}  // namespace calab
