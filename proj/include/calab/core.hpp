#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "calab/rng.hpp"

namespace calab {

using Letter = std::uint8_t;
using Word = std::vector<Letter>;  // finite word over an alphabet
using Index = std::int64_t;        // lattice position

// Raised when an exact computation would exceed its enumeration or state
// budget. Guards are hard limits: the caller must shrink the problem, results
// never degrade silently.
struct GuardExceeded : std::runtime_error {
    explicit GuardExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Finite alphabet {0, ..., k-1}, k >= 2.
class Alphabet {
public:
    explicit Alphabet(int k) : k_(k) {
        if (k < 2) throw std::invalid_argument("alphabet needs at least two letters");
        if (k > 255) throw std::invalid_argument("alphabet too large for 8-bit letters");
    }

    int size() const { return k_; }
    bool contains(Letter a) const { return a < k_; }

    friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
    int k_;
};

// Radius-r block map f : A^(2r+1) -> A. The table is indexed lexicographically
// with the leftmost neighborhood cell most significant.
class LocalRule {
public:
    LocalRule(Alphabet alphabet, int radius, std::vector<Letter> table);

    // Standard elementary-CA encoding: k=2, r=1, table(abc) = bit (4a+2b+c)
    // of n. 0 <= n <= 255.
    static LocalRule wolfram(int n);

    const Alphabet& alphabet() const { return alphabet_; }
    int radius() const { return radius_; }
    int window_size() const { return 2 * radius_ + 1; }
    std::size_t table_size() const { return table_.size(); }

    Letter apply_index(std::size_t neighborhood_index) const { return table_[neighborhood_index]; }
    Letter apply(std::span<const Letter> window) const;

    const std::vector<Letter>& table() const { return table_; }

private:
    Alphabet alphabet_;
    int radius_;
    std::vector<Letter> table_;
};

LocalRule wolfram_rule(int n);

// Which neighborhood offsets a rule actually reads. Offsets outside
// [lo, hi] never change the output; `constant` means the output ignores the
// whole window. `table` is the rule re-indexed over offsets lo..hi.
struct EffectiveSupport {
    bool constant = false;
    Letter constant_value = 0;
    int lo = 0;  // leftmost dependent offset (may be positive for one-sided rules)
    int hi = 0;  // rightmost dependent offset
    int alphabet_size = 2;
    std::vector<Letter> table;

    int width() const { return constant ? 0 : hi - lo + 1; }
    Letter apply(std::span<const Letter> cells) const;  // cells at offsets lo..hi
};

EffectiveSupport effective_support(const LocalRule& rule);

// Spatially periodic configuration of period N: cell i means x_i with
// x_{i+N} = x_i. The finite stand-in for a point of the full shift.
class PeriodicConfig {
public:
    PeriodicConfig(Alphabet alphabet, std::vector<Letter> cells);

    const Alphabet& alphabet() const { return alphabet_; }
    Index period() const { return static_cast<Index>(cells_.size()); }

    Letter at(Index i) const { return cells_[static_cast<std::size_t>(mod(i))]; }
    const std::vector<Letter>& cells() const { return cells_; }
    std::vector<Letter>& cells() { return cells_; }

    friend bool operator==(const PeriodicConfig&, const PeriodicConfig&) = default;

private:
    Index mod(Index i) const {
        const Index n = period();
        Index m = i % n;
        return m < 0 ? m + n : m;
    }

    Alphabet alphabet_;
    std::vector<Letter> cells_;
};

struct Cylinder {
    Word word;
    Index anchor = 0;  // word sits at positions [anchor, anchor + |word|)
};

// Product measure with one probability per letter; the uniform measure gives
// every letter 1/k.
class BernoulliMeasure {
public:
    BernoulliMeasure(Alphabet alphabet, std::vector<double> probs);
    static BernoulliMeasure uniform(Alphabet alphabet);

    const Alphabet& alphabet() const { return alphabet_; }
    const std::vector<double>& probs() const { return probs_; }
    double prob(Letter a) const { return probs_[a]; }

    Letter sample(Xoshiro256ss& engine) const;

private:
    Alphabet alphabet_;
    std::vector<double> probs_;
};

// --- simulation -------------------------------------------------------------

// One synchronous update: out_i = f(x_{i-r}, ..., x_{i+r}) with periodic
// wraparound. `step` picks the parallel kernel for large periods; the serial
// kernel is kept as the reference the tests compare against.
void step_into(const LocalRule& rule, const PeriodicConfig& x, PeriodicConfig& out);
void step_into_serial(const LocalRule& rule, const PeriodicConfig& x, PeriodicConfig& out);
PeriodicConfig step(const LocalRule& rule, const PeriodicConfig& x);
PeriodicConfig step_serial(const LocalRule& rule, const PeriodicConfig& x);

PeriodicConfig iterate(const LocalRule& rule, const PeriodicConfig& x, std::int64_t n);

// s-fold shift: result cell i equals x_{i+s}.
PeriodicConfig shift(const PeriodicConfig& x, Index s);

// Half-open window x_i ... x_{j-1}, indices mod N. Requires i < j.
Word window(const PeriodicConfig& x, Index i, Index j);

// Least |i| <= cap with x_i != y_i or x_{-i} != y_{-i}; nullopt if the
// configurations agree on that whole range. The metric value is 2^(-n).
std::optional<int> disagreement_exponent(const PeriodicConfig& x, const PeriodicConfig& y, int cap);

// 2^(-n) for the exponent above, or 0 when no disagreement is found within
// cap.
double distance_window(const PeriodicConfig& x, const PeriodicConfig& y, int cap);

// Product measure of a cylinder; the anchor never affects the value.
double cylinder_measure(const BernoulliMeasure& m, const Cylinder& c);

bool in_cylinder(const PeriodicConfig& x, const Cylinder& c);

// --- sampling ---------------------------------------------------------------

// i.i.d. cells per m; a pure function of (m, N, rng).
PeriodicConfig sample_config(const BernoulliMeasure& m, Index n, const SeedStream& rng);

// Keeps x on positions [i1, i2), redraws everything else i.i.d. per m.
// Samples the cylinder [x(i1, i2)]. Requires i1 < i2 and i2 - i1 <= N.
PeriodicConfig resample_outside(const PeriodicConfig& x, Index i1, Index i2,
                                const BernoulliMeasure& m, const SeedStream& rng);

// --- rule algebra -----------------------------------------------------------

// Exact table for "apply f, then g"; radius r_f + r_g.
LocalRule compose(const LocalRule& f, const LocalRule& g);

// The shift map as a radius-1 rule: f(a,b,c) = c, so step(x)_i = x_{i+1}.
LocalRule shift_rule(Alphabet alphabet);

// --- words ------------------------------------------------------------------

std::string word_string(const Word& w);
Word parse_word(const std::string& text, const Alphabet& alphabet);

// Lexicographic odometer: advances w to the next word over {0..k-1}, false
// once it wraps past the all-(k-1) word.
bool next_word(Word& w, int k);

// base^exp if it stays <= cap, otherwise nullopt.
std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exp,
                                         std::uint64_t cap);

}  // namespace calab
