#include "calab/kurka.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cstdlib>

#include "calab/exec.hpp"

namespace calab {
namespace {

constexpr Letter kUnknown = 0xFF;

// Free cells of the depth-n dependence cone of window [p, p+s): the hull
// [A, B) the cone reads, minus the cells fixed by w at [0, wlen).
struct DepthLayout {
    Index A = 0;
    Index B = 0;
    std::vector<Index> free_pos;
};

DepthLayout depth_layout(const EffectiveSupport& eff, Index wlen, int p, int s, int n) {
    DepthLayout layout;
    layout.A = std::min<Index>(0, p + static_cast<Index>(n) * eff.lo);
    layout.B = std::max<Index>(wlen, p + s + static_cast<Index>(n) * eff.hi);
    for (Index i = layout.A; i < 0; ++i) layout.free_pos.push_back(i);
    for (Index i = wlen; i < layout.B; ++i) layout.free_pos.push_back(i);
    return layout;
}

// Evolves one cone assignment on the line segment [A, B). The valid range
// contracts by the effective support each step; the target window stays
// inside it by construction of the hull.
class ConeEvolver {
public:
    ConeEvolver(const EffectiveSupport& eff, const Word& w, const DepthLayout& layout, int p,
                int s)
        : eff_(eff),
          w_(w),
          layout_(layout),
          p_(p),
          s_(s),
          len_(static_cast<std::size_t>(layout.B - layout.A)),
          cur_(len_, 0),
          nxt_(len_, 0) {}

    // Row 0 = w embedded at [0, wlen) plus the base-k digits of idx over the
    // free cells, most significant digit at the first free cell.
    void load_index(std::uint64_t idx, int k) {
        reset_word();
        for (std::size_t j = layout_.free_pos.size(); j-- > 0;) {
            at(layout_.free_pos[j]) = static_cast<Letter>(idx % static_cast<std::uint64_t>(k));
            idx /= static_cast<std::uint64_t>(k);
        }
        vlo_ = layout_.A;
        vhi_ = layout_.B;
    }

    void load_values(const std::vector<Letter>& free_values) {
        reset_word();
        for (std::size_t j = 0; j < layout_.free_pos.size(); ++j)
            at(layout_.free_pos[j]) = free_values[j];
        vlo_ = layout_.A;
        vhi_ = layout_.B;
    }

    void advance() {
        const Index nvlo = std::max(layout_.A, vlo_ - eff_.lo);
        const Index nvhi = std::min(layout_.B, vhi_ - eff_.hi);
        const std::size_t width = static_cast<std::size_t>(eff_.width());
        for (Index i = nvlo; i < nvhi; ++i) {
            const Letter* in = cur_.data() + static_cast<std::size_t>(i + eff_.lo - layout_.A);
            nxt_[static_cast<std::size_t>(i - layout_.A)] =
                eff_.apply(std::span<const Letter>(in, width));
        }
        cur_.swap(nxt_);
        vlo_ = nvlo;
        vhi_ = nvhi;
    }

    void window_into(Letter* out) const {
        assert(vlo_ <= p_ && p_ + s_ <= vhi_);
        std::copy_n(cur_.data() + static_cast<std::size_t>(p_ - layout_.A),
                    static_cast<std::size_t>(s_), out);
    }

private:
    Letter& at(Index pos) { return cur_[static_cast<std::size_t>(pos - layout_.A)]; }

    void reset_word() {
        std::fill(cur_.begin(), cur_.end(), 0);
        for (std::size_t j = 0; j < w_.size(); ++j) at(static_cast<Index>(j)) = w_[j];
    }

    const EffectiveSupport& eff_;
    const Word& w_;
    const DepthLayout& layout_;
    int p_;
    int s_;
    std::size_t len_;
    std::vector<Letter> cur_, nxt_;
    Index vlo_ = 0, vhi_ = 0;
};

// Full row-0 assignment over [layout.A, layout.B) for a context index; used
// to store replayable counterexamples.
Word materialize_index(const Word& w, const DepthLayout& layout, std::uint64_t idx, int k) {
    Word cells(static_cast<std::size_t>(layout.B - layout.A), 0);
    for (std::size_t j = 0; j < w.size(); ++j) cells[static_cast<std::size_t>(-layout.A) + j] = w[j];
    for (std::size_t j = layout.free_pos.size(); j-- > 0;) {
        cells[static_cast<std::size_t>(layout.free_pos[j] - layout.A)] =
            static_cast<Letter>(idx % static_cast<std::uint64_t>(k));
        idx /= static_cast<std::uint64_t>(k);
    }
    return cells;
}

Word materialize_values(const Word& w, const DepthLayout& layout,
                        const std::vector<Letter>& free_values) {
    Word cells(static_cast<std::size_t>(layout.B - layout.A), 0);
    for (std::size_t j = 0; j < w.size(); ++j) cells[static_cast<std::size_t>(-layout.A) + j] = w[j];
    for (std::size_t j = 0; j < layout.free_pos.size(); ++j)
        cells[static_cast<std::size_t>(layout.free_pos[j] - layout.A)] = free_values[j];
    return cells;
}

// Three-valued spacetime diagram seeded with w on row 0: a cell is determined
// when the rule gives one output letter over every completion of its unknown
// inputs. Sound but not complete; certifies walls without any enumeration.
struct Determined {
    Index glo = 0;
    std::vector<std::vector<Letter>> rows;  // letter or kUnknown

    bool window_known(int n, int p, int s) const {
        const auto& row = rows[static_cast<std::size_t>(n)];
        for (int j = 0; j < s; ++j) {
            const Index pos = p + j - glo;
            if (pos < 0 || pos >= static_cast<Index>(row.size())) return false;
            if (row[static_cast<std::size_t>(pos)] == kUnknown) return false;
        }
        return true;
    }
};

Determined determined_cells(const EffectiveSupport& eff, const Word& w, int T) {
    const int reach = std::max({std::abs(eff.lo), std::abs(eff.hi), 0});
    const Index wlen = static_cast<Index>(w.size());

    Determined d;
    d.glo = -static_cast<Index>(T) * reach;
    const Index ghi = wlen + static_cast<Index>(T) * reach;
    const std::size_t span = static_cast<std::size_t>(ghi - d.glo);
    if (static_cast<std::uint64_t>(T + 1) * span > (std::uint64_t{1} << 26))
        throw GuardExceeded("certify_blocking: horizon too large for the fixpoint grid");
    d.rows.assign(static_cast<std::size_t>(T) + 1, std::vector<Letter>(span, kUnknown));
    for (std::size_t j = 0; j < w.size(); ++j)
        d.rows[0][static_cast<std::size_t>(-d.glo) + j] = w[j];

    const int k = eff.alphabet_size;
    const int width = eff.width();
    std::vector<Letter> win(static_cast<std::size_t>(width), 0);
    std::vector<int> unknown;
    for (int n = 1; n <= T; ++n) {
        const auto& prev = d.rows[static_cast<std::size_t>(n - 1)];
        auto& row = d.rows[static_cast<std::size_t>(n)];
        bool any = false;
        for (Index pos = d.glo; pos < ghi; ++pos) {
            unknown.clear();
            for (int o = 0; o < width; ++o) {
                const Index q = pos + eff.lo + o - d.glo;
                const Letter v = (q >= 0 && q < static_cast<Index>(span))
                                     ? prev[static_cast<std::size_t>(q)]
                                     : kUnknown;
                win[static_cast<std::size_t>(o)] = v;
                if (v == kUnknown) unknown.push_back(o);
            }
            // A fully unknown window cannot be determined: eff keeps only
            // positions the rule genuinely depends on.
            if (!unknown.empty() && unknown.size() == static_cast<std::size_t>(width)) continue;

            Letter value = 0;
            bool determined = true;
            const std::uint64_t completions =
                *checked_pow(static_cast<std::uint64_t>(k), unknown.size(), ~std::uint64_t{0});
            for (std::uint64_t c = 0; c < completions && determined; ++c) {
                std::uint64_t rest = c;
                for (const int o : unknown) {
                    win[static_cast<std::size_t>(o)] =
                        static_cast<Letter>(rest % static_cast<std::uint64_t>(k));
                    rest /= static_cast<std::uint64_t>(k);
                }
                const Letter out = eff.apply(win);
                if (c == 0)
                    value = out;
                else
                    determined = out == value;
            }
            if (determined) {
                row[static_cast<std::size_t>(pos - d.glo)] = value;
                any = true;
            }
        }
        if (!any) break;  // nothing determined: later rows stay unknown too
    }
    return d;
}

void validate_blocking_args(const LocalRule& rule, const Word& w, int s, int p, int T) {
    if (w.empty()) throw std::invalid_argument("blocking word must be nonempty");
    for (Letter a : w)
        if (!rule.alphabet().contains(a))
            throw std::invalid_argument("blocking word letter out of range");
    if (s < 1) throw std::invalid_argument("window width s must be >= 1");
    if (p < 0 || p + s > static_cast<int>(w.size()))
        throw std::invalid_argument("offset must satisfy 0 <= p <= |w|-s");
    if (T < 0) throw std::invalid_argument("horizon T must be >= 0");
}

}  // namespace

const char* to_string(KurkaClass v) {
    switch (v) {
        case KurkaClass::BlockingWordFound: return "blocking-word-found";
        case KurkaClass::NoBlockingWordFound: return "no-blocking-word-found";
        case KurkaClass::Equicontinuous: return "equicontinuous";
    }
    return "?";
}

const char* to_string(BlockingStatus s) {
    return s == BlockingStatus::CertifiedUpTo ? "certified-up-to-T" : "refuted";
}

std::vector<Word> trace(const LocalRule& rule, const PeriodicConfig& x, Index i1, Index i2,
                        int T) {
    if (T < 0) throw std::invalid_argument("trace: T must be >= 0");
    std::vector<Word> out;
    out.reserve(static_cast<std::size_t>(T) + 1);
    PeriodicConfig cur = x;
    for (int j = 0; j <= T; ++j) {
        out.push_back(window(cur, i1, i2));
        if (j < T) cur = step(rule, cur);
    }
    return out;
}

BlockingCertificate certify_blocking(const LocalRule& rule, const Word& w, int s, int p, int T,
                                     std::uint64_t max_contexts) {
    validate_blocking_args(rule, w, s, p, T);
    const int k = rule.alphabet().size();

    BlockingCertificate cert;
    cert.word = w;
    cert.s = s;
    cert.p = p;
    cert.T = T;

    if (T == 0) return cert;  // step 0 is w's own subword for every context
    const EffectiveSupport eff = effective_support(rule);
    if (eff.constant) return cert;  // from step 1 on the image is one fixed configuration

    const Determined grid = determined_cells(eff, w, T);
    std::vector<int> open_depths;
    for (int n = 1; n <= T; ++n)
        if (!grid.window_known(n, p, s)) open_depths.push_back(n);
    if (open_depths.empty()) return cert;  // method stays "determined-cells"

    cert.method = "cone-enumeration";
    const Index wlen = static_cast<Index>(w.size());
    for (const int n : open_depths) {
        const DepthLayout layout = depth_layout(eff, wlen, p, s, n);
        const std::uint64_t budget = max_contexts - cert.contexts_checked;
        const auto contexts =
            checked_pow(static_cast<std::uint64_t>(k), layout.free_pos.size(), budget);
        if (!contexts)
            throw GuardExceeded(
                "certify_blocking: context budget exceeded; lower T or raise max_contexts");

        Word reference(static_cast<std::size_t>(s), 0);
        {
            ConeEvolver ev(eff, w, layout, p, s);
            ev.load_index(0, k);
            for (int j = 0; j < n; ++j) ev.advance();
            ev.window_into(reference.data());
        }

        // Scan contexts 1..total-1 for a window that deviates from context
        // 0's. Chunks run in parallel; the reduction keeps the minimum bad
        // index, so the result (and the reported context count) is the same
        // in serial and parallel runs.
        std::atomic<std::uint64_t> best{~std::uint64_t{0}};
        const std::uint64_t total = *contexts;
        if (total > 1) {
            const std::uint64_t chunk = 4096;
            const std::uint64_t chunks = (total - 1 + chunk - 1) / chunk;
            exec::parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
                const std::uint64_t start = 1 + static_cast<std::uint64_t>(c) * chunk;
                if (start > best.load(std::memory_order_relaxed)) return;
                const std::uint64_t end = std::min(total, start + chunk);
                ConeEvolver ev(eff, w, layout, p, s);
                Word win(static_cast<std::size_t>(s), 0);
                for (std::uint64_t idx = start; idx < end; ++idx) {
                    if (idx > best.load(std::memory_order_relaxed)) break;
                    ev.load_index(idx, k);
                    for (int j = 0; j < n; ++j) ev.advance();
                    ev.window_into(win.data());
                    if (win != reference) {
                        std::uint64_t cur = best.load(std::memory_order_relaxed);
                        while (idx < cur &&
                               !best.compare_exchange_weak(cur, idx, std::memory_order_relaxed)) {
                        }
                        break;
                    }
                }
            });
        }

        const std::uint64_t bad = best.load();
        if (bad != ~std::uint64_t{0}) {
            cert.contexts_checked += bad + 1;
            cert.status = BlockingStatus::Refuted;
            BlockingCounterexample ce;
            ce.hull_lo = layout.A;
            ce.x_cells = materialize_index(w, layout, 0, k);
            ce.y_cells = materialize_index(w, layout, bad, k);
            ce.first_bad_step = n;
            cert.counterexample = std::move(ce);
            return cert;
        }
        cert.contexts_checked += total;
    }
    return cert;
}

std::optional<BlockingCounterexample> falsify_blocking(const LocalRule& rule, const Word& w,
                                                       int s, int p, int T,
                                                       std::uint64_t samples,
                                                       const SeedStream& rng) {
    validate_blocking_args(rule, w, s, p, T);
    if (T == 0 || samples == 0) return std::nullopt;
    const EffectiveSupport eff = effective_support(rule);
    if (eff.constant) return std::nullopt;

    const Index wlen = static_cast<Index>(w.size());
    const DepthLayout layout = depth_layout(eff, wlen, p, s, T);
    if (layout.free_pos.empty()) return std::nullopt;  // trace is a function of w alone

    const int k = rule.alphabet().size();
    std::vector<Letter> fa(layout.free_pos.size()), fb(layout.free_pos.size());
    Word wa(static_cast<std::size_t>(s), 0), wb(static_cast<std::size_t>(s), 0);
    for (std::uint64_t i = 0; i < samples; ++i) {
        auto engine = rng.child(i).engine();
        for (auto& v : fa) v = static_cast<Letter>(engine.below(static_cast<std::uint64_t>(k)));
        for (auto& v : fb) v = static_cast<Letter>(engine.below(static_cast<std::uint64_t>(k)));
        ConeEvolver ea(eff, w, layout, p, s), eb(eff, w, layout, p, s);
        ea.load_values(fa);
        eb.load_values(fb);
        for (int n = 1; n <= T; ++n) {
            ea.advance();
            eb.advance();
            ea.window_into(wa.data());
            eb.window_into(wb.data());
            if (wa != wb) {
                BlockingCounterexample ce;
                ce.hull_lo = layout.A;
                ce.x_cells = materialize_values(w, layout, fa);
                ce.y_cells = materialize_values(w, layout, fb);
                ce.first_bad_step = n;
                return ce;
            }
        }
    }
    return std::nullopt;
}

std::optional<int> replay_counterexample(const LocalRule& rule, const BlockingCertificate& cert,
                                         Index period) {
    if (!cert.counterexample) return std::nullopt;
    const BlockingCounterexample& ce = *cert.counterexample;
    const Index len = static_cast<Index>(ce.x_cells.size());
    Index N = period;
    if (N == 0)
        N = std::max<Index>(len, static_cast<Index>(cert.word.size()) +
                                     2 * static_cast<Index>(cert.T) * rule.radius() + 1);
    if (N < len)
        throw std::invalid_argument("replay_counterexample: period shorter than the contexts");

    std::vector<Letter> xc(static_cast<std::size_t>(N), 0), yc(static_cast<std::size_t>(N), 0);
    for (Index j = 0; j < len; ++j) {
        const Index pos = ((ce.hull_lo + j) % N + N) % N;
        xc[static_cast<std::size_t>(pos)] = ce.x_cells[static_cast<std::size_t>(j)];
        yc[static_cast<std::size_t>(pos)] = ce.y_cells[static_cast<std::size_t>(j)];
    }
    PeriodicConfig x(rule.alphabet(), std::move(xc));
    PeriodicConfig y(rule.alphabet(), std::move(yc));
    for (int n = 0; n <= cert.T; ++n) {
        if (window(x, cert.p, cert.p + cert.s) != window(y, cert.p, cert.p + cert.s)) return n;
        if (n < cert.T) {
            x = step(rule, x);
            y = step(rule, y);
        }
    }
    return std::nullopt;
}

std::vector<BlockingCertificate> find_blocking_words(const LocalRule& rule, int s, int max_len,
                                                     int T, std::uint64_t max_contexts) {
    if (s < 1) throw std::invalid_argument("find_blocking_words: s must be >= 1");
    if (max_len < 1) throw std::invalid_argument("find_blocking_words: max_len must be >= 1");
    const int k = rule.alphabet().size();
    if (!checked_pow(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(max_len),
                     std::uint64_t{1} << 20))
        throw GuardExceeded("find_blocking_words: too many candidate words");

    std::vector<BlockingCertificate> found;
    for (int len = s; len <= max_len; ++len) {
        Word w(static_cast<std::size_t>(len), 0);
        do {
            for (int p = 0; p + s <= len; ++p) {
                BlockingCertificate cert = certify_blocking(rule, w, s, p, T, max_contexts);
                if (cert.status == BlockingStatus::CertifiedUpTo) found.push_back(std::move(cert));
            }
        } while (next_word(w, k));
    }
    return found;
}

EquicontinuityProbe equicontinuity_probe(const LocalRule& rule, const PeriodicConfig& x, int m,
                                         int n, int T, std::uint64_t samples,
                                         const SeedStream& rng) {
    if (m < 1 || n < m) throw std::invalid_argument("equicontinuity_probe: need n >= m >= 1");
    if (T < 0) throw std::invalid_argument("equicontinuity_probe: T must be >= 0");
    if (samples == 0) throw std::invalid_argument("equicontinuity_probe: samples must be >= 1");
    if (2 * static_cast<Index>(n) > x.period())
        throw std::invalid_argument("equicontinuity_probe: period too small for the delta window");

    const BernoulliMeasure uniform = BernoulliMeasure::uniform(rule.alphabet());
    const std::vector<Word> reference = trace(rule, x, -m, m, T);

    std::vector<std::uint8_t> ok(samples, 0);
    exec::parallel_for(samples, [&](std::size_t i) {
        PeriodicConfig y = resample_outside(x, -n, n, uniform, rng.child(i));
        bool close = true;
        for (int j = 0; j <= T && close; ++j) {
            close = window(y, -m, m) == reference[static_cast<std::size_t>(j)];
            if (close && j < T) y = step(rule, y);
        }
        ok[i] = close ? 1 : 0;
    });

    std::uint64_t hits = 0;
    for (const std::uint8_t b : ok) hits += b;
    return {static_cast<double>(hits) / static_cast<double>(samples), samples};
}

KurkaReport classify_kurka(const LocalRule& rule, const KurkaParams& params) {
    KurkaReport report;
    report.max_len = params.max_len;
    report.T = params.T;
    if (rule.radius() == 0) {
        report.s = 1;
        report.max_len = 1;
        report.verdict = KurkaClass::Equicontinuous;
        report.certificates = find_blocking_words(rule, 1, 1, params.T, params.max_contexts);
        return report;
    }
    report.s = params.s > 0 ? params.s : rule.radius();
    report.certificates =
        find_blocking_words(rule, report.s, params.max_len, params.T, params.max_contexts);
    report.verdict = report.certificates.empty() ? KurkaClass::NoBlockingWordFound
                                                 : KurkaClass::BlockingWordFound;
    return report;
}

}  // namespace calab
