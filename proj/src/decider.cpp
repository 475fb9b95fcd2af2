#include "calab/decider.hpp"

#include <algorithm>
#include <bit>
#include <cstddef>
#include <deque>
#include <unordered_map>

namespace calab {
namespace {

std::uint64_t pow_u64(std::uint64_t k, std::uint64_t e) {
    std::uint64_t v = 1;
    for (std::uint64_t i = 0; i < e; ++i) v *= k;
    return v;
}

}  // namespace

Word PreimageAutomaton::state_word(std::uint32_t s) const {
    Word w(static_cast<std::size_t>(2 * r), 0);
    for (std::size_t i = w.size(); i-- > 0;) {
        w[i] = static_cast<Letter>(s % static_cast<std::uint32_t>(k));
        s /= static_cast<std::uint32_t>(k);
    }
    return w;
}

void PreimageAutomaton::successors(std::uint32_t s, Letter output,
                                   std::vector<std::uint32_t>& out) const {
    out.clear();
    const std::size_t base = static_cast<std::size_t>(s) * static_cast<std::size_t>(k);
    for (int b = 0; b < k; ++b)
        if (emit[base + static_cast<std::size_t>(b)] == output)
            out.push_back(next[base + static_cast<std::size_t>(b)]);
}

PreimageAutomaton preimage_automaton(const LocalRule& rule) {
    const int k = rule.alphabet().size();
    const int r = rule.radius();
    const auto states = checked_pow(static_cast<std::uint64_t>(k),
                                    static_cast<std::uint64_t>(2 * r), std::uint64_t{1} << 16);
    if (!states) throw GuardExceeded("preimage automaton would exceed 2^16 states");

    PreimageAutomaton a;
    a.k = k;
    a.r = r;
    a.states = static_cast<std::uint32_t>(*states);
    a.next.resize(static_cast<std::size_t>(a.states) * static_cast<std::size_t>(k));
    a.emit.resize(a.next.size());

    // Suffix transition: state s spells w_0..w_{2r-1}; reading b yields
    // w_1..w_{2r-1} b, and s*k + b is exactly the lexicographic index of the
    // full window w_0..w_{2r-1} b.
    const std::uint32_t suffix_mod = a.states / static_cast<std::uint32_t>(r > 0 ? k : 1);
    for (std::uint32_t s = 0; s < a.states; ++s) {
        for (int b = 0; b < k; ++b) {
            const std::size_t edge = static_cast<std::size_t>(s) * k + static_cast<std::size_t>(b);
            a.next[edge] = r > 0 ? (s % suffix_mod) * static_cast<std::uint32_t>(k) +
                                       static_cast<std::uint32_t>(b)
                                 : 0;
            a.emit[edge] = rule.apply_index(edge);
        }
    }
    return a;
}

std::vector<Word> preimages(const LocalRule& rule, const Word& u, std::size_t max_enumeration) {
    if (u.empty()) throw std::invalid_argument("preimages: word must be nonempty");
    const int k = rule.alphabet().size();
    const int r = rule.radius();
    const std::size_t total_len = u.size() + static_cast<std::size_t>(2 * r);
    if (!checked_pow(static_cast<std::uint64_t>(k), total_len, max_enumeration))
        throw GuardExceeded("preimages: enumeration guard exceeded");

    const PreimageAutomaton a = preimage_automaton(rule);
    std::vector<Word> result;
    Word current(total_len, 0);

    // DFS over (start state, input letters) in ascending order: output comes
    // out in lexicographic order of the full preimage word.
    auto dfs = [&](auto&& self, std::uint32_t s, std::size_t pos) -> void {
        if (pos == u.size()) {
            result.push_back(current);
            return;
        }
        const std::size_t base = static_cast<std::size_t>(s) * static_cast<std::size_t>(k);
        for (int b = 0; b < k; ++b) {
            if (a.emit[base + static_cast<std::size_t>(b)] != u[pos]) continue;
            current[static_cast<std::size_t>(2 * r) + pos] = static_cast<Letter>(b);
            self(self, a.next[base + static_cast<std::size_t>(b)], pos + 1);
        }
    };
    for (std::uint32_t s0 = 0; s0 < a.states; ++s0) {
        const Word prefix = a.state_word(s0);
        std::copy(prefix.begin(), prefix.end(), current.begin());
        dfs(dfs, s0, 0);
    }
    return result;
}

std::uint64_t count_preimages(const LocalRule& rule, const Word& u) {
    if (u.empty()) throw std::invalid_argument("count_preimages: word must be nonempty");
    const int k = rule.alphabet().size();
    const int r = rule.radius();
    const std::size_t total_len = u.size() + static_cast<std::size_t>(2 * r);
    // The count is bounded by k^(|u|+2r); keep it clear of uint64 overflow.
    if (!checked_pow(static_cast<std::uint64_t>(k), total_len, std::uint64_t{1} << 62))
        throw GuardExceeded("count_preimages: overflow guard exceeded");

    const PreimageAutomaton a = preimage_automaton(rule);
    // v[s] = number of input prefixes ending in state s whose emissions match
    // the consumed part of u. Every state is reached by exactly one length-2r
    // prefix, so v starts all-ones.
    std::vector<std::uint64_t> v(a.states, 1), w(a.states, 0);
    for (const Letter out : u) {
        std::fill(w.begin(), w.end(), 0);
        for (std::uint32_t s = 0; s < a.states; ++s) {
            if (v[s] == 0) continue;
            const std::size_t base = static_cast<std::size_t>(s) * static_cast<std::size_t>(k);
            for (int b = 0; b < k; ++b)
                if (a.emit[base + static_cast<std::size_t>(b)] == out)
                    w[a.next[base + static_cast<std::size_t>(b)]] += v[s];
        }
        v.swap(w);
    }
    std::uint64_t total = 0;
    for (const std::uint64_t c : v) total += c;
    return total;
}

bool is_balanced_up_to(const LocalRule& rule, int L, std::size_t max_enumeration) {
    if (L < 1) throw std::invalid_argument("is_balanced_up_to: L must be >= 1");
    const int k = rule.alphabet().size();
    const int r = rule.radius();
    const std::uint64_t expected = pow_u64(static_cast<std::uint64_t>(k),
                                           static_cast<std::uint64_t>(2 * r));

    for (int len = 1; len <= L; ++len) {
        const std::size_t in_len = static_cast<std::size_t>(len + 2 * r);
        const auto inputs =
            checked_pow(static_cast<std::uint64_t>(k), in_len, max_enumeration);
        if (!inputs) throw GuardExceeded("is_balanced_up_to: enumeration guard exceeded");

        std::vector<std::uint64_t> histogram(
            static_cast<std::size_t>(pow_u64(static_cast<std::uint64_t>(k),
                                             static_cast<std::uint64_t>(len))),
            0);
        Word w(in_len, 0);
        do {
            std::size_t image = 0;
            for (int pos = 0; pos < len; ++pos) {
                const std::span<const Letter> win(w.data() + pos,
                                                  static_cast<std::size_t>(2 * r + 1));
                image = image * static_cast<std::size_t>(k) + rule.apply(win);
            }
            ++histogram[image];
        } while (next_word(w, k));

        for (const std::uint64_t c : histogram)
            if (c != expected) return false;
    }
    return true;
}

SurjectivityReport is_surjective(const LocalRule& rule, std::size_t max_subsets) {
    const PreimageAutomaton a = preimage_automaton(rule);
    const int k = a.k;
    const std::size_t blocks = (static_cast<std::size_t>(a.states) + 63) / 64;

    using Subset = std::vector<std::uint64_t>;
    struct SubsetHash {
        std::size_t operator()(const Subset& s) const {
            std::uint64_t h = 0x9E3779B97F4A7C15ULL;
            for (const std::uint64_t b : s) h = splitmix_hash(h ^ b);
            return static_cast<std::size_t>(h);
        }
    };

    Subset full(blocks, ~std::uint64_t{0});
    if (a.states % 64 != 0) full.back() = (std::uint64_t{1} << (a.states % 64)) - 1;

    std::unordered_map<Subset, std::uint32_t, SubsetHash> id_of;
    std::vector<Subset> subsets;
    // parent edge that discovered each subset: (parent id, output letter)
    std::vector<std::pair<std::uint32_t, Letter>> parent;

    id_of.emplace(full, 0);
    subsets.push_back(full);
    parent.emplace_back(0, 0);

    SurjectivityReport report;
    report.automaton_states = a.states;

    std::deque<std::uint32_t> queue{0};
    Subset image(blocks);
    while (!queue.empty()) {
        const std::uint32_t id = queue.front();
        queue.pop_front();
        for (int out = 0; out < k; ++out) {
            std::fill(image.begin(), image.end(), 0);
            bool empty = true;
            const Subset& current = subsets[static_cast<std::size_t>(id)];
            for (std::size_t blk = 0; blk < blocks; ++blk) {
                std::uint64_t bits = current[blk];
                while (bits) {
                    const int bit = std::countr_zero(bits);
                    bits &= bits - 1;
                    const std::uint32_t s = static_cast<std::uint32_t>(blk * 64 + bit);
                    const std::size_t base = static_cast<std::size_t>(s) * k;
                    for (int b = 0; b < k; ++b) {
                        if (a.emit[base + static_cast<std::size_t>(b)] != out) continue;
                        const std::uint32_t t = a.next[base + static_cast<std::size_t>(b)];
                        image[t / 64] |= std::uint64_t{1} << (t % 64);
                        empty = false;
                    }
                }
            }
            if (empty) {
                // Walk parents back to the full set; BFS in letter order makes
                // this the lexicographically least shortest orphan.
                Word witness{static_cast<Letter>(out)};
                for (std::uint32_t at = id; at != 0; at = parent[at].first)
                    witness.push_back(parent[at].second);
                std::reverse(witness.begin(), witness.end());
                report.surjective = false;
                report.witness = std::move(witness);
                report.subsets_explored = subsets.size();
                return report;
            }
            if (id_of.find(image) == id_of.end()) {
                if (subsets.size() >= max_subsets)
                    throw GuardExceeded("is_surjective: subset guard exceeded");
                const auto fresh = static_cast<std::uint32_t>(subsets.size());
                id_of.emplace(image, fresh);
                subsets.push_back(image);
                parent.emplace_back(id, static_cast<Letter>(out));
                queue.push_back(fresh);
            }
        }
    }
    report.surjective = true;
    report.subsets_explored = subsets.size();
    return report;
}

bool verify_uniform_invariance(const LocalRule& rule, int L) {
    if (L < 1) throw std::invalid_argument("verify_uniform_invariance: L must be >= 1");
    const int k = rule.alphabet().size();
    const std::uint64_t expected = pow_u64(static_cast<std::uint64_t>(k),
                                           static_cast<std::uint64_t>(2 * rule.radius()));
    // nu(F^{-1}[u]) = count(u) * k^{-(|u|+2r)} and nu([u]) = k^{-|u|}; they
    // agree exactly when count(u) = k^(2r).
    for (int len = 1; len <= L; ++len) {
        Word u(static_cast<std::size_t>(len), 0);
        do {
            if (count_preimages(rule, u) != expected) return false;
        } while (next_word(u, k));
    }
    return true;
}

}  // namespace calab
