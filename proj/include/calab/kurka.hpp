#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "calab/core.hpp"

namespace calab {

enum class BlockingStatus { CertifiedUpTo, Refuted };

// Two explicit dependence-cone assignments whose window traces disagree.
// Both words cover the absolute positions [hull_lo, hull_lo + len) with the
// candidate blocking word embedded at [0, |w|); they differ only outside it.
struct BlockingCounterexample {
    Index hull_lo = 0;
    Word x_cells;
    Word y_cells;
    int first_bad_step = 1;
};

// Horizon-bounded proof or refutation that w is s-blocking at offset p
// (window [p, p+s), w anchored at [0, |w|)).
struct BlockingCertificate {
    Word word;
    int s = 1;
    int p = 0;
    int T = 0;
    BlockingStatus status = BlockingStatus::CertifiedUpTo;
    std::optional<BlockingCounterexample> counterexample;
    // "determined-cells" when the partial-evaluation fixpoint alone decided
    // every step; "cone-enumeration" when contexts had to be enumerated.
    std::string method = "determined-cells";
    std::uint64_t contexts_checked = 0;
};

// Window sequence F^j(x)(i1, i2) for j = 0..T (length T+1).
std::vector<Word> trace(const LocalRule& rule, const PeriodicConfig& x, Index i1, Index i2,
                        int T);

// Exhaustive horizon-T decision. Whether w is s-blocking at p up to step T
// depends only on the cells in the dependence cone of window [p, p+s); those
// outside w are enumerated depth by depth (the cone is grown lazily, and
// steps already fixed by the determined-cells fixpoint are skipped). Guard:
// total enumerated contexts <= max_contexts.
BlockingCertificate certify_blocking(const LocalRule& rule, const Word& w, int s, int p, int T,
                                     std::uint64_t max_contexts = std::uint64_t{1} << 24);

// Monte Carlo refutation: samples pairs of depth-T cone contexts; a
// disagreement yields a replayable counterexample. Absence of one is NOT a
// certification.
std::optional<BlockingCounterexample> falsify_blocking(const LocalRule& rule, const Word& w,
                                                       int s, int p, int T,
                                                       std::uint64_t samples,
                                                       const SeedStream& rng);

// Embeds both counterexample assignments in period-N configurations (letter 0
// elsewhere) and returns the first step <= cert.T at which the [p, p+s)
// windows differ; nullopt if they never do. period = 0 picks a safe default.
std::optional<int> replay_counterexample(const LocalRule& rule, const BlockingCertificate& cert,
                                         Index period = 0);

// All T-certified s-blocking words up to max_len, every valid offset, ordered
// by (length, word, offset). Empty means "none found up to (max_len, T)".
std::vector<BlockingCertificate> find_blocking_words(const LocalRule& rule, int s, int max_len,
                                                     int T,
                                                     std::uint64_t max_contexts = std::uint64_t{1}
                                                                                  << 24);

struct EquicontinuityProbe {
    double fraction = 0.0;
    std::uint64_t samples = 0;
};

// With eps = 2^-m, delta = 2^-n: fraction of sampled y agreeing with x on
// [-n, n) whose orbit windows [-m, m) match x's for all steps <= T.
EquicontinuityProbe equicontinuity_probe(const LocalRule& rule, const PeriodicConfig& x, int m,
                                         int n, int T, std::uint64_t samples,
                                         const SeedStream& rng);

enum class KurkaClass {
    BlockingWordFound,    // not sensitive; has equicontinuous point candidates
    NoBlockingWordFound,  // sensitive candidate at this search envelope
    Equicontinuous,       // radius-0 rule: the cone never widens
};

const char* to_string(KurkaClass v);
const char* to_string(BlockingStatus s);

struct KurkaParams {
    int s = 0;  // 0 means "use the rule radius" (the Proposition-3 width)
    int max_len = 6;
    int T = 16;
    std::uint64_t max_contexts = std::uint64_t{1} << 24;
};

struct KurkaReport {
    KurkaClass verdict = KurkaClass::NoBlockingWordFound;
    int s = 1;  // search envelope actually used
    int max_len = 6;
    int T = 16;
    std::vector<BlockingCertificate> certificates;  // certified words only
};

// Sensitivity dichotomy evidence: verdict is BlockingWordFound iff
// find_blocking_words(rule, s, max_len, T) is nonempty; radius-0 rules are
// reported Equicontinuous directly.
KurkaReport classify_kurka(const LocalRule& rule, const KurkaParams& params = {});

}  // namespace calab
