#pragma once

#include <array>
#include <cstdint>

namespace calab {

// SplitMix64: seed expander / mixing step (Steele, Lea, Flood 2014).
struct SplitMix64 {
    std::uint64_t state;

    explicit constexpr SplitMix64(std::uint64_t seed) : state(seed) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

constexpr std::uint64_t splitmix_hash(std::uint64_t x) {
    return SplitMix64(x).next();
}

// xoshiro256** (Blackman, Vigna). Fast, deterministic across platforms.
struct Xoshiro256ss {
    std::array<std::uint64_t, 4> s{1, 2, 3, 4};

    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    Xoshiro256ss() = default;

    explicit Xoshiro256ss(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : s) word = sm.next();
    }

    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t operator()() {
        const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // 53-bit uniform in [0, 1).
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Unbiased uniform in [0, bound) via rejection. bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x < threshold);
        return x % bound;
    }
};

// A named draw stream: identical (seed, stream) pairs yield identical
// sequences. Sub-streams are derived by hashing so that estimators can hand
// one independent stream to each sample/orbit/task regardless of execution
// order.
struct SeedStream {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    SeedStream child(std::uint64_t index) const {
        return {seed, splitmix_hash(stream ^ splitmix_hash(index + 0x9E3779B97F4A7C15ULL))};
    }

    Xoshiro256ss engine() const {
        return Xoshiro256ss(splitmix_hash(seed) ^ splitmix_hash(stream ^ 0xA3EC4E9FD4F5B6C7ULL));
    }
};

}  // namespace calab
