#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace calab::stats {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return lo <= v && v <= hi; }
};

// Wilson score interval for a binomial proportion. z = 1.96 is the usual 95%
// level.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.96) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    Interval ci{center - half, center + half};
    if (ci.lo < 0.0) ci.lo = 0.0;
    if (ci.hi > 1.0) ci.hi = 1.0;
    return ci;
}

// Least-squares slope of y against x.
inline double ls_slope(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) return 0.0;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return den == 0.0 ? 0.0 : num / den;
}

}  // namespace calab::stats
