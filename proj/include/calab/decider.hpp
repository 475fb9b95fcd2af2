#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "calab/core.hpp"

namespace calab {

// De Bruijn preimage automaton. States are the k^(2r) words of length 2r
// (lexicographic numbering, leftmost letter most significant). Reading an
// input letter b from state s moves to the length-2r suffix of s·b and emits
// f(s·b); paths of input letters spell preimage words, emitted letters spell
// their image.
struct PreimageAutomaton {
    int k = 2;
    int r = 1;
    std::uint32_t states = 1;         // k^(2r)
    std::vector<std::uint32_t> next;  // [s * k + b] -> successor state
    std::vector<Letter> emit;         // [s * k + b] -> f(s · b)

    // Decode state number into its length-2r word.
    Word state_word(std::uint32_t s) const;

    // Successor set of s under a given emitted letter (the nondeterministic
    // transition used by the subset construction).
    void successors(std::uint32_t s, Letter output, std::vector<std::uint32_t>& out) const;
};

// Guard: k^(2r) <= 2^16 states.
PreimageAutomaton preimage_automaton(const LocalRule& rule);

struct SurjectivityReport {
    bool surjective = true;
    std::optional<Word> witness;  // lexicographically least shortest orphan
    std::string method = "subset-construction";
    std::uint32_t automaton_states = 0;
    std::size_t subsets_explored = 0;
};

// All words v of length |u| + 2r with f applied at every position yielding u,
// in lexicographic order. Guard: k^(|u|+2r) <= max_enumeration.
std::vector<Word> preimages(const LocalRule& rule, const Word& u,
                            std::size_t max_enumeration = std::size_t{1} << 24);

// |preimages(rule, u)| via a transfer-matrix product over the preimage
// automaton; never materializes the words. Guard: k^(|u|+2r) < 2^63 so the
// count cannot overflow.
std::uint64_t count_preimages(const LocalRule& rule, const Word& u);

// Finite balance oracle: every word of length <= L has exactly k^(2r)
// preimages. Decided by brute-force enumeration of all k^(len+2r) inputs per
// length (independent of the automaton). Guard on the enumeration size.
bool is_balanced_up_to(const LocalRule& rule, int L,
                       std::size_t max_enumeration = std::size_t{1} << 26);

// Exact surjectivity decision: determinize the preimage automaton by subset
// construction from the full state set; surjective iff the empty subset is
// unreachable. The BFS expands output letters in increasing order, so the
// witness of a non-surjective rule is the lexicographically least among the
// shortest orphan words.
SurjectivityReport is_surjective(const LocalRule& rule,
                                 std::size_t max_subsets = std::size_t{1} << 20);

// nu(F^{-1}[u]) == nu([u]) for all |u| <= L under the uniform measure,
// checked exactly as count_preimages(u) == k^(2r).
bool verify_uniform_invariance(const LocalRule& rule, int L);

}  // namespace calab
