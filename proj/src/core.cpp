#include "calab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "calab/exec.hpp"

namespace calab {

namespace {

std::size_t checked_table_size(int k, int radius) {
    if (radius < 0) throw std::invalid_argument("radius must be nonnegative");
    std::size_t size = 1;
    for (int i = 0; i < 2 * radius + 1; ++i) {
        if (size > (std::size_t{1} << 24) / static_cast<std::size_t>(k))
            throw GuardExceeded("rule table larger than 2^24 entries");
        size *= static_cast<std::size_t>(k);
    }
    return size;
}

}  // namespace

LocalRule::LocalRule(Alphabet alphabet, int radius, std::vector<Letter> table)
    : alphabet_(alphabet), radius_(radius), table_(std::move(table)) {
    const std::size_t expected = checked_table_size(alphabet_.size(), radius);
    if (table_.size() != expected)
        throw std::invalid_argument("rule table must have k^(2r+1) entries");
    for (Letter out : table_)
        if (!alphabet_.contains(out)) throw std::invalid_argument("rule output letter out of range");
}

LocalRule LocalRule::wolfram(int n) {
    if (n < 0 || n > 255) throw std::invalid_argument("elementary rule number must be in 0..255");
    std::vector<Letter> table(8);
    for (int idx = 0; idx < 8; ++idx) table[idx] = static_cast<Letter>((n >> idx) & 1);
    return LocalRule(Alphabet(2), 1, std::move(table));
}

LocalRule wolfram_rule(int n) { return LocalRule::wolfram(n); }

Letter LocalRule::apply(std::span<const Letter> window) const {
    const int k = alphabet_.size();
    std::size_t idx = 0;
    for (Letter a : window) idx = idx * static_cast<std::size_t>(k) + a;
    return table_[idx];
}

Letter EffectiveSupport::apply(std::span<const Letter> cells) const {
    if (constant) return constant_value;
    std::size_t idx = 0;
    for (Letter a : cells) idx = idx * static_cast<std::size_t>(alphabet_size) + a;
    return table[idx];
}

EffectiveSupport effective_support(const LocalRule& rule) {
    const int k = rule.alphabet().size();
    const int w = rule.window_size();
    const int r = rule.radius();

    // Position depends on the output if two windows differing only there map
    // to different letters.
    std::vector<char> depends(static_cast<std::size_t>(w), 0);
    std::vector<std::size_t> stride(static_cast<std::size_t>(w));
    std::size_t acc = 1;
    for (int pos = w - 1; pos >= 0; --pos) {
        stride[static_cast<std::size_t>(pos)] = acc;
        acc *= static_cast<std::size_t>(k);
    }
    const std::size_t total = rule.table_size();
    for (int pos = 0; pos < w; ++pos) {
        const std::size_t str = stride[static_cast<std::size_t>(pos)];
        for (std::size_t idx = 0; idx < total && !depends[static_cast<std::size_t>(pos)]; ++idx) {
            const std::size_t digit = (idx / str) % static_cast<std::size_t>(k);
            if (digit != 0) continue;
            const Letter base = rule.apply_index(idx);
            for (std::size_t v = 1; v < static_cast<std::size_t>(k); ++v) {
                if (rule.apply_index(idx + v * str) != base) {
                    depends[static_cast<std::size_t>(pos)] = 1;
                    break;
                }
            }
        }
    }

    EffectiveSupport out;
    out.alphabet_size = k;
    int first = -1, last = -1;
    for (int pos = 0; pos < w; ++pos) {
        if (depends[static_cast<std::size_t>(pos)]) {
            if (first < 0) first = pos;
            last = pos;
        }
    }
    if (first < 0) {
        out.constant = true;
        out.constant_value = rule.apply_index(0);
        return out;
    }
    out.lo = first - r;
    out.hi = last - r;

    // Reduced table over offsets lo..hi, unused positions pinned to letter 0.
    const int rw = out.hi - out.lo + 1;
    std::size_t reduced_size = 1;
    for (int i = 0; i < rw; ++i) reduced_size *= static_cast<std::size_t>(k);
    out.table.resize(reduced_size);
    std::vector<Letter> full(static_cast<std::size_t>(w), 0);
    for (std::size_t idx = 0; idx < reduced_size; ++idx) {
        std::size_t rest = idx;
        for (int i = rw - 1; i >= 0; --i) {
            full[static_cast<std::size_t>(first + i)] = static_cast<Letter>(rest % static_cast<std::size_t>(k));
            rest /= static_cast<std::size_t>(k);
        }
        out.table[idx] = rule.apply(full);
    }
    return out;
}

PeriodicConfig::PeriodicConfig(Alphabet alphabet, std::vector<Letter> cells)
    : alphabet_(alphabet), cells_(std::move(cells)) {
    if (cells_.empty()) throw std::invalid_argument("period must be at least 1");
    for (Letter a : cells_)
        if (!alphabet_.contains(a)) throw std::invalid_argument("cell letter out of range");
}

BernoulliMeasure::BernoulliMeasure(Alphabet alphabet, std::vector<double> probs)
    : alphabet_(alphabet), probs_(std::move(probs)) {
    if (probs_.size() != static_cast<std::size_t>(alphabet_.size()))
        throw std::invalid_argument("need one probability per letter");
    double sum = 0.0;
    for (double p : probs_) {
        if (p < 0.0) throw std::invalid_argument("letter probabilities must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("letter probabilities must sum to 1");
}

BernoulliMeasure BernoulliMeasure::uniform(Alphabet alphabet) {
    return BernoulliMeasure(alphabet,
                            std::vector<double>(static_cast<std::size_t>(alphabet.size()),
                                                1.0 / alphabet.size()));
}

Letter BernoulliMeasure::sample(Xoshiro256ss& engine) const {
    const double u = engine.uniform01();
    double cum = 0.0;
    for (std::size_t a = 0; a + 1 < probs_.size(); ++a) {
        cum += probs_[a];
        if (u < cum) return static_cast<Letter>(a);
    }
    return static_cast<Letter>(probs_.size() - 1);
}

namespace {

void require_same_alphabet(const LocalRule& rule, const PeriodicConfig& x) {
    if (rule.alphabet() != x.alphabet())
        throw std::invalid_argument("rule and configuration use different alphabets");
}

// Cell update over one period. The neighborhood index slides in base k:
// drop the leading digit, append the next cell.
void step_cells(const LocalRule& rule, const std::vector<Letter>& in, std::vector<Letter>& out,
                std::size_t begin, std::size_t end) {
    const std::size_t n = in.size();
    const int k = rule.alphabet().size();
    const int r = rule.radius();
    const int w = 2 * r + 1;
    std::size_t head_stride = 1;  // k^(2r)
    for (int i = 0; i < w - 1; ++i) head_stride *= static_cast<std::size_t>(k);

    const auto wrap = [&](std::int64_t p) {
        const auto m = static_cast<std::int64_t>(n);
        return static_cast<std::size_t>(((p % m) + m) % m);
    };
    std::size_t idx = 0;
    for (int o = -r; o <= r; ++o)
        idx = idx * static_cast<std::size_t>(k) + in[wrap(static_cast<std::int64_t>(begin) + o)];
    for (std::size_t i = begin; i < end; ++i) {
        out[i] = rule.apply_index(idx);
        // slide window right by one
        idx %= head_stride;
        idx = idx * static_cast<std::size_t>(k) + in[wrap(static_cast<std::int64_t>(i) + 1 + r)];
    }
}

}  // namespace

void step_into_serial(const LocalRule& rule, const PeriodicConfig& x, PeriodicConfig& out) {
    require_same_alphabet(rule, x);
    if (&out == &x) {
        out = step_serial(rule, x);
        return;
    }
    if (out.period() != x.period() || !(out.alphabet() == x.alphabet()))
        out = x;
    step_cells(rule, x.cells(), out.cells(), 0, x.cells().size());
}

void step_into(const LocalRule& rule, const PeriodicConfig& x, PeriodicConfig& out) {
    require_same_alphabet(rule, x);
    if (&out == &x) {
        out = step(rule, x);
        return;
    }
    if (out.period() != x.period() || !(out.alphabet() == x.alphabet()))
        out = x;
    const std::size_t n = x.cells().size();
    constexpr std::size_t kParallelThreshold = 1 << 14;
    if (!exec::parallel_enabled() || n < kParallelThreshold) {
        step_cells(rule, x.cells(), out.cells(), 0, n);
        return;
    }
    constexpr std::size_t kChunk = 1 << 12;
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    const auto& in = x.cells();
    auto& dst = out.cells();
    exec::parallel_for_static(chunks, [&](std::size_t c) {
        const std::size_t begin = c * kChunk;
        const std::size_t end = std::min(n, begin + kChunk);
        step_cells(rule, in, dst, begin, end);
    });
}

PeriodicConfig step(const LocalRule& rule, const PeriodicConfig& x) {
    PeriodicConfig out = x;
    step_into(rule, x, out);
    return out;
}

PeriodicConfig step_serial(const LocalRule& rule, const PeriodicConfig& x) {
    PeriodicConfig out = x;
    step_into_serial(rule, x, out);
    return out;
}

PeriodicConfig iterate(const LocalRule& rule, const PeriodicConfig& x, std::int64_t n) {
    if (n < 0) throw std::invalid_argument("iteration count must be nonnegative");
    PeriodicConfig cur = x;
    PeriodicConfig next = x;
    for (std::int64_t i = 0; i < n; ++i) {
        step_into(rule, cur, next);
        std::swap(cur, next);
    }
    return cur;
}

PeriodicConfig shift(const PeriodicConfig& x, Index s) {
    const Index n = x.period();
    std::vector<Letter> cells(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) cells[static_cast<std::size_t>(i)] = x.at(i + s);
    return PeriodicConfig(x.alphabet(), std::move(cells));
}

Word window(const PeriodicConfig& x, Index i, Index j) {
    if (i >= j) throw std::invalid_argument("window needs i < j");
    Word w;
    w.reserve(static_cast<std::size_t>(j - i));
    for (Index p = i; p < j; ++p) w.push_back(x.at(p));
    return w;
}

std::optional<int> disagreement_exponent(const PeriodicConfig& x, const PeriodicConfig& y, int cap) {
    if (x.period() != y.period())
        throw std::invalid_argument("distance needs matching periods");
    if (!(x.alphabet() == y.alphabet()))
        throw std::invalid_argument("distance needs matching alphabets");
    if (cap < 1) throw std::invalid_argument("cap must be at least 1");
    for (int i = 0; i <= cap; ++i) {
        if (x.at(i) != y.at(i) || x.at(-i) != y.at(-i)) return i;
    }
    return std::nullopt;
}

double distance_window(const PeriodicConfig& x, const PeriodicConfig& y, int cap) {
    const auto n = disagreement_exponent(x, y, cap);
    return n ? std::ldexp(1.0, -*n) : 0.0;
}

double cylinder_measure(const BernoulliMeasure& m, const Cylinder& c) {
    double p = 1.0;
    for (Letter a : c.word) {
        if (!m.alphabet().contains(a)) throw std::invalid_argument("cylinder letter out of range");
        p *= m.prob(a);
    }
    return p;
}

bool in_cylinder(const PeriodicConfig& x, const Cylinder& c) {
    for (std::size_t i = 0; i < c.word.size(); ++i)
        if (x.at(c.anchor + static_cast<Index>(i)) != c.word[i]) return false;
    return true;
}

PeriodicConfig sample_config(const BernoulliMeasure& m, Index n, const SeedStream& rng) {
    if (n < 1) throw std::invalid_argument("period must be at least 1");
    auto engine = rng.engine();
    std::vector<Letter> cells(static_cast<std::size_t>(n));
    for (auto& cell : cells) cell = m.sample(engine);
    return PeriodicConfig(m.alphabet(), std::move(cells));
}

PeriodicConfig resample_outside(const PeriodicConfig& x, Index i1, Index i2,
                                const BernoulliMeasure& m, const SeedStream& rng) {
    if (i1 >= i2) throw std::invalid_argument("interval needs i1 < i2");
    if (i2 - i1 > x.period()) throw std::invalid_argument("interval longer than the period");
    if (!(m.alphabet() == x.alphabet()))
        throw std::invalid_argument("measure and configuration use different alphabets");
    auto engine = rng.engine();
    PeriodicConfig out = x;
    const Index n = x.period();
    for (Index off = i2 - i1; off < n; ++off) {
        const Index pos = i1 + off;
        const Index wrapped = ((pos % n) + n) % n;
        out.cells()[static_cast<std::size_t>(wrapped)] = m.sample(engine);
    }
    return out;
}

LocalRule compose(const LocalRule& f, const LocalRule& g) {
    if (!(f.alphabet() == g.alphabet()))
        throw std::invalid_argument("composition needs a shared alphabet");
    const int k = f.alphabet().size();
    const int radius = f.radius() + g.radius();
    const int w = 2 * radius + 1;
    const std::size_t size = checked_table_size(k, radius);

    std::vector<Letter> table(size);
    std::vector<Letter> neighborhood(static_cast<std::size_t>(w));
    std::vector<Letter> mid(static_cast<std::size_t>(2 * g.radius() + 1));
    for (std::size_t idx = 0; idx < size; ++idx) {
        std::size_t rest = idx;
        for (int i = w - 1; i >= 0; --i) {
            neighborhood[static_cast<std::size_t>(i)] = static_cast<Letter>(rest % static_cast<std::size_t>(k));
            rest /= static_cast<std::size_t>(k);
        }
        for (int j = 0; j < 2 * g.radius() + 1; ++j) {
            mid[static_cast<std::size_t>(j)] =
                f.apply(std::span<const Letter>(neighborhood.data() + j, static_cast<std::size_t>(f.window_size())));
        }
        table[idx] = g.apply(mid);
    }
    return LocalRule(f.alphabet(), radius, std::move(table));
}

LocalRule shift_rule(Alphabet alphabet) {
    const int k = alphabet.size();
    const std::size_t size = checked_table_size(k, 1);
    std::vector<Letter> table(size);
    for (std::size_t idx = 0; idx < size; ++idx)
        table[idx] = static_cast<Letter>(idx % static_cast<std::size_t>(k));
    return LocalRule(alphabet, 1, std::move(table));
}

std::string word_string(const Word& w) {
    static const char digits[] = "0123456789abcdefghijklmnopqrstuvwxyz";
    std::string s;
    s.reserve(w.size());
    for (Letter a : w) {
        if (a >= 36) throw std::invalid_argument("word letters above 35 have no text form");
        s.push_back(digits[a]);
    }
    return s;
}

Word parse_word(const std::string& text, const Alphabet& alphabet) {
    Word w;
    w.reserve(text.size());
    for (char c : text) {
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'z') v = 10 + (c - 'a');
        else throw std::invalid_argument("unexpected character in word");
        if (v >= alphabet.size()) throw std::invalid_argument("word letter out of range");
        w.push_back(static_cast<Letter>(v));
    }
    return w;
}

bool next_word(Word& w, int k) {
    for (std::size_t i = w.size(); i-- > 0;) {
        if (++w[i] < k) return true;
        w[i] = 0;
    }
    return false;
}

std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exp,
                                         std::uint64_t cap) {
    std::uint64_t v = 1;
    if (v > cap) return std::nullopt;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (base != 0 && v > cap / base) return std::nullopt;
        v *= base;
    }
    return v;
}

}  // namespace calab
