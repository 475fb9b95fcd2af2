#include "calab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "calab/exec.hpp"

namespace calab {
namespace {

std::uint64_t hash_cells(const std::vector<Letter>& cells) {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint64_t>(cells.size());
    for (Letter c : cells) h = splitmix_hash(h ^ (static_cast<std::uint64_t>(c) + 0xD1B54A32D192ED03ULL));
    return h;
}

struct CellsHash {
    std::size_t operator()(const std::vector<Letter>& cells) const {
        return static_cast<std::size_t>(hash_cells(cells));
    }
};

// Phase index of e^{-2 pi i n alpha} when 4*alpha is an integer: 0 -> 1,
// 1 -> -i, 2 -> -1, 3 -> i.
int quarter_step(double q4) {
    const auto s = static_cast<std::int64_t>(q4);
    return static_cast<int>(((s % 4) + 4) % 4);
}

double circle_distance(double a, double b) {
    double d = std::fabs(a - b);
    d -= std::floor(d);
    return std::min(d, 1.0 - d);
}

}  // namespace

std::string Rational::str() const {
    return std::to_string(num) + "/" + std::to_string(den);
}

Rational make_rational(std::int64_t p, std::int64_t q) {
    if (q < 1) throw std::invalid_argument("rational denominator must be positive");
    p %= q;
    if (p < 0) p += q;
    const std::int64_t g = std::gcd(p, q);
    return {p / g, q / g};
}

std::optional<OrbitCycle> orbit_cycle(const LocalRule& rule, const PeriodicConfig& x, int cap) {
    if (cap < 1) throw std::invalid_argument("orbit_cycle needs cap >= 1");
    std::unordered_map<std::vector<Letter>, int, CellsHash> seen;
    seen.reserve(static_cast<std::size_t>(cap) + 1);
    PeriodicConfig cur = x;
    PeriodicConfig buf = x;
    for (int t = 0; t <= cap; ++t) {
        auto [it, fresh] = seen.emplace(cur.cells(), t);
        if (!fresh) return OrbitCycle{it->second, t - it->second};
        if (t < cap) {
            step_into(rule, cur, buf);
            std::swap(cur, buf);
        }
    }
    return std::nullopt;
}

CycleSpectrum cycle_spectrum(int q, int tau) {
    if (q < 1) throw std::invalid_argument("cycle period must be >= 1");
    if (tau < 0) throw std::invalid_argument("preperiod must be >= 0");
    CycleSpectrum spec;
    spec.tau = tau;
    spec.q = q;
    spec.frequencies.reserve(static_cast<std::size_t>(q));
    for (int p = 0; p < q; ++p) spec.frequencies.push_back(make_rational(p, q));
    return spec;
}

Observable Observable::constant(double c) {
    if (!(std::fabs(c) <= 1.0)) throw std::invalid_argument("constant observable must satisfy |c| <= 1");
    Observable g;
    g.kind_ = Kind::Constant;
    g.centered_ = false;
    g.constant_ = c;
    g.bound_ = std::fabs(c);
    std::ostringstream name;
    name << "constant(" << c << ")";
    g.name_ = name.str();
    return g;
}

Observable Observable::letter_at_origin(const BernoulliMeasure& mu, bool centered) {
    const int k = mu.alphabet().size();
    Observable g;
    g.kind_ = Kind::Letter;
    g.centered_ = centered;
    g.scale_ = 1.0 / static_cast<double>(k - 1);
    if (centered) {
        double mean = 0.0;
        for (int a = 0; a < k; ++a) mean += mu.prob(static_cast<Letter>(a)) * static_cast<double>(a) * g.scale_;
        g.mean_ = mean;
    }
    double bound = 0.0;
    for (int a = 0; a < k; ++a)
        bound = std::max(bound, std::fabs(static_cast<double>(a) * g.scale_ - g.mean_));
    g.bound_ = bound;
    g.name_ = centered ? "letter-at-0 (centered)" : "letter-at-0";
    return g;
}

Observable Observable::cylinder_indicator(const BernoulliMeasure& mu, Cylinder cyl, bool centered) {
    Observable g;
    g.kind_ = Kind::Cylinder;
    g.centered_ = centered;
    if (centered) g.mean_ = cylinder_measure(mu, cyl);
    g.bound_ = std::max(g.mean_, 1.0 - g.mean_);
    std::ostringstream name;
    name << "indicator[" << word_string(cyl.word) << "@" << cyl.anchor << "]" << (centered ? " (centered)" : "");
    g.name_ = name.str();
    g.cyl_ = std::move(cyl);
    return g;
}

double Observable::operator()(const PeriodicConfig& x) const {
    switch (kind_) {
        case Kind::Constant: return constant_;
        case Kind::Letter: return static_cast<double>(x.at(0)) * scale_ - mean_;
        default: return (in_cylinder(x, cyl_) ? 1.0 : 0.0) - mean_;
    }
}

std::complex<double> unit_phase(double alpha, std::int64_t n) {
    const double q4 = alpha * 4.0;
    if (q4 == std::floor(q4)) {
        const int step = quarter_step(q4);
        const int idx = static_cast<int>((static_cast<std::int64_t>(step) * ((n % 4 + 4) % 4)) % 4);
        switch (idx) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, -1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, 1.0};
        }
    }
    const long double frac =
        std::fmod(static_cast<long double>(alpha) * static_cast<long double>(n), 1.0L);
    const long double theta = -2.0L * std::numbers::pi_v<long double> * frac;
    return {static_cast<double>(std::cos(theta)), static_cast<double>(std::sin(theta))};
}

std::complex<double> wiener_sum(const LocalRule& rule, const PeriodicConfig& x, const Observable& g,
                                double alpha, int T) {
    if (T < 1) throw std::invalid_argument("wiener_sum needs T >= 1");
    if (!(rule.alphabet() == x.alphabet())) throw std::invalid_argument("alphabet mismatch");
    PeriodicConfig cur = x;
    PeriodicConfig buf = x;
    std::complex<double> sum{0.0, 0.0};
    for (int n = 0; n < T; ++n) {
        sum += unit_phase(alpha, n) * g(cur);
        if (n + 1 < T) {
            step_into(rule, cur, buf);
            std::swap(cur, buf);
        }
    }
    return sum / static_cast<double>(T);
}

std::vector<double> uniform_alpha_grid(int points) {
    if (points < 1) throw std::invalid_argument("grid needs at least one point");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / static_cast<double>(points);
    return grid;
}

SpectralScan eigenvalue_scan(const LocalRule& rule, const BernoulliMeasure& measure, const Observable& g,
                             std::vector<double> alpha_grid, int T, std::uint64_t orbits, Index N,
                             const SeedStream& rng) {
    if (!(rule.alphabet() == measure.alphabet())) throw std::invalid_argument("alphabet mismatch");
    if (T < 1) throw std::invalid_argument("eigenvalue_scan needs T >= 1");
    if (orbits < 1) throw std::invalid_argument("eigenvalue_scan needs at least one orbit");
    if (N < 1) throw std::invalid_argument("period must be positive");
    if (alpha_grid.empty()) throw std::invalid_argument("alpha grid must be nonempty");
    std::sort(alpha_grid.begin(), alpha_grid.end());
    alpha_grid.erase(std::unique(alpha_grid.begin(), alpha_grid.end()), alpha_grid.end());

    const std::size_t A = alpha_grid.size();
    std::vector<double> rows(static_cast<std::size_t>(orbits) * A, 0.0);
    std::vector<std::uint8_t> cycled(static_cast<std::size_t>(orbits), 0);

    exec::parallel_for(static_cast<std::size_t>(orbits), [&](std::size_t o) {
        PeriodicConfig cur = sample_config(measure, N, rng.child(o));
        PeriodicConfig buf = cur;
        std::vector<double> v(static_cast<std::size_t>(T));
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(static_cast<std::size_t>(T) * 2);
        bool cyc = false;
        for (int n = 0; n < T; ++n) {
            v[static_cast<std::size_t>(n)] = g(cur);
            if (!seen.insert(hash_cells(cur.cells())).second) cyc = true;
            if (n + 1 < T) {
                step_into(rule, cur, buf);
                std::swap(cur, buf);
            }
        }
        cycled[o] = cyc ? 1 : 0;

        double* row = rows.data() + o * A;
        for (std::size_t a = 0; a < A; ++a) {
            const double alpha = alpha_grid[a];
            const double q4 = alpha * 4.0;
            std::complex<double> sum{0.0, 0.0};
            if (q4 == std::floor(q4)) {
                // Exact quarter phases: terms land on the axes, so sums of
                // dyadic observable values stay exact.
                const int stepq = quarter_step(q4);
                double re = 0.0, im = 0.0;
                int idx = 0;
                for (int n = 0; n < T; ++n) {
                    const double val = v[static_cast<std::size_t>(n)];
                    switch (idx) {
                        case 0: re += val; break;
                        case 1: im -= val; break;
                        case 2: re -= val; break;
                        default: im += val; break;
                    }
                    idx += stepq;
                    if (idx >= 4) idx -= 4;
                }
                sum = {re, im};
            } else {
                // Rotor with periodic resync; drift within a 64-step block is
                // ~1e-14, far below the scan noise floor.
                const std::complex<double> omega = unit_phase(alpha, 1);
                std::complex<double> phase{1.0, 0.0};
                for (int n = 0; n < T; ++n) {
                    sum += phase * v[static_cast<std::size_t>(n)];
                    if ((n & 63) == 63) phase = unit_phase(alpha, n + 1);
                    else phase *= omega;
                }
            }
            const std::complex<double> S = sum / static_cast<double>(T);
            row[a] = std::norm(S);
        }
    });

    SpectralScan scan;
    scan.alpha_grid = std::move(alpha_grid);
    scan.T = T;
    scan.orbits = orbits;
    scan.N = N;
    scan.observable = g.name();
    scan.atom_mass.assign(A, 0.0);
    std::uint64_t ncyc = 0;
    for (std::uint64_t o = 0; o < orbits; ++o) {
        const double* row = rows.data() + static_cast<std::size_t>(o) * A;
        for (std::size_t a = 0; a < A; ++a) scan.atom_mass[a] += row[a];
        ncyc += cycled[static_cast<std::size_t>(o)];
    }
    for (std::size_t a = 0; a < A; ++a) scan.atom_mass[a] /= static_cast<double>(orbits);
    scan.cycle_guard = static_cast<double>(ncyc) / static_cast<double>(orbits);
    scan.guard_exceeded = scan.cycle_guard > scan.guard_limit;
    return scan;
}

SpectralScan shift_spectrum_check(const BernoulliMeasure& measure, const Observable& g,
                                  std::vector<double> alpha_grid, int T, std::uint64_t orbits, Index N,
                                  const SeedStream& rng) {
    return eigenvalue_scan(shift_rule(measure.alphabet()), measure, g, std::move(alpha_grid), T, orbits, N,
                           rng);
}

std::vector<CorrelationPoint> correlation_decay(const LocalRule& rule, const BernoulliMeasure& measure,
                                                const Cylinder& U, const Cylinder& V, int n_max,
                                                std::uint64_t samples, Index N, const SeedStream& rng) {
    if (!(rule.alphabet() == measure.alphabet())) throw std::invalid_argument("alphabet mismatch");
    if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
    if (samples < 1) throw std::invalid_argument("correlation_decay needs samples >= 1");
    if (N < 1) throw std::invalid_argument("period must be positive");
    if (static_cast<Index>(U.word.size()) > N) throw std::invalid_argument("period too small for U");
    if (static_cast<Index>(V.word.size()) + 2 * static_cast<Index>(n_max) * rule.radius() > N)
        throw std::invalid_argument("period too small for the dependence cone of V");

    const std::size_t cols = static_cast<std::size_t>(n_max) + 1;
    std::vector<std::uint8_t> hits(static_cast<std::size_t>(samples) * cols, 0);
    exec::parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
        PeriodicConfig cur = sample_config(measure, N, rng.child(i));
        if (!in_cylinder(cur, U)) return;  // the joint event fails at every n
        PeriodicConfig buf = cur;
        std::uint8_t* row = hits.data() + i * cols;
        for (int n = 0; n <= n_max; ++n) {
            row[static_cast<std::size_t>(n)] = in_cylinder(cur, V) ? 1 : 0;
            if (n < n_max) {
                step_into(rule, cur, buf);
                std::swap(cur, buf);
            }
        }
    });

    const double product = cylinder_measure(measure, U) * cylinder_measure(measure, V);
    std::vector<CorrelationPoint> out(cols);
    for (std::size_t n = 0; n < cols; ++n) {
        std::uint64_t count = 0;
        for (std::uint64_t i = 0; i < samples; ++i) count += hits[static_cast<std::size_t>(i) * cols + n];
        CorrelationPoint& pt = out[n];
        pt.n = static_cast<int>(n);
        pt.joint_hat = static_cast<double>(count) / static_cast<double>(samples);
        pt.product = product;
        pt.estimate = pt.joint_hat - product;
        const stats::Interval w = stats::wilson_interval(count, samples);
        pt.ci = {w.lo - product, w.hi - product};
    }
    return out;
}

std::vector<double> exact_correlation(const LocalRule& rule, const Cylinder& U, const Cylinder& V,
                                      int n_max, Index N) {
    if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
    if (N < 1) throw std::invalid_argument("period must be positive");
    const int k = rule.alphabet().size();
    const auto total = checked_pow(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(N),
                                   std::uint64_t{1} << 24);
    if (!total) throw GuardExceeded("exact_correlation: k^N exceeds 2^24 configurations");

    std::vector<std::uint64_t> joint(static_cast<std::size_t>(n_max) + 1, 0);
    std::uint64_t in_u = 0, in_v = 0;
    Word cells(static_cast<std::size_t>(N), 0);
    PeriodicConfig cur(rule.alphabet(), cells);
    PeriodicConfig buf = cur;
    do {
        std::copy(cells.begin(), cells.end(), cur.cells().begin());
        const bool hit_u = in_cylinder(cur, U);
        if (in_cylinder(cur, V)) ++in_v;
        if (hit_u) {
            ++in_u;
            for (int n = 0; n <= n_max; ++n) {
                if (in_cylinder(cur, V)) ++joint[static_cast<std::size_t>(n)];
                if (n < n_max) {
                    step_into(rule, cur, buf);
                    std::swap(cur, buf);
                }
            }
        }
    } while (next_word(cells, k));

    const double M = static_cast<double>(*total);
    const double product = (static_cast<double>(in_u) / M) * (static_cast<double>(in_v) / M);
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (std::size_t n = 0; n < out.size(); ++n)
        out[n] = static_cast<double>(joint[n]) / M - product;
    return out;
}

Rational best_rational(double alpha, int den_bound) {
    if (den_bound < 1) throw std::invalid_argument("denominator bound must be >= 1");
    const double a = alpha - std::floor(alpha);
    Rational best{0, 1};
    double best_d = std::numeric_limits<double>::infinity();
    for (int q = 1; q <= den_bound; ++q) {
        const auto p = static_cast<std::int64_t>(std::llround(a * q));
        const double d = circle_distance(a, static_cast<double>(p) / static_cast<double>(q));
        if (d < best_d) {
            best = make_rational(p, q);
            best_d = d;
        }
    }
    return best;
}

RationalityVerdict rationality_verdict(const SpectralScan& scan, double threshold, int den_bound) {
    if (scan.alpha_grid.size() != scan.atom_mass.size())
        throw std::invalid_argument("scan grid and atom masses are misaligned");
    RationalityVerdict verdict;
    verdict.threshold = threshold;
    verdict.den_bound = den_bound;

    double step = scan.alpha_grid.size() >= 2 ? 0.0 : 1.0;
    for (std::size_t i = 0; i + 1 < scan.alpha_grid.size(); ++i)
        step = std::max(step, scan.alpha_grid[i + 1] - scan.alpha_grid[i]);
    verdict.grid_step = step;

    for (std::size_t i = 0; i < scan.alpha_grid.size(); ++i) {
        if (!(scan.atom_mass[i] > threshold)) continue;
        FlaggedAtom atom;
        atom.alpha = scan.alpha_grid[i];
        atom.atom_mass = scan.atom_mass[i];
        atom.matched = best_rational(atom.alpha, den_bound);
        atom.distance = circle_distance(atom.alpha, atom.matched.value());
        atom.within_grid = atom.distance <= step;
        verdict.pass = verdict.pass && atom.within_grid;
        verdict.flagged.push_back(atom);
    }
    return verdict;
}

}  // namespace calab
