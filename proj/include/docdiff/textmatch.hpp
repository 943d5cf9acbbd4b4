#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "docdiff/textnorm.hpp"
#include "docdiff/textpoint.hpp"

namespace docdiff {

struct MatchParams {
    double word_ocr_simil = 0.7;
    double line_simil = 0.5;
};

inline void validate(const MatchParams& p) {
    if (p.word_ocr_simil < 0.0 || p.word_ocr_simil > 1.0 || p.line_simil < 0.0 || p.line_simil > 1.0)
        throw std::invalid_argument("match thresholds must lie in [0,1]");
}

/// Levenshtein distance over code points where substitutions inside one
/// confusable class (dashes, quotes, O/0, I/l/1/|) are free.
inline int edit_distance(const std::string& a, const std::string& b) {
    const auto va = decode_utf8(a);
    const auto vb = decode_utf8(b);
    const std::size_t n = va.size();
    const std::size_t m = vb.size();
    if (n == 0) return static_cast<int>(m);
    if (m == 0) return static_cast<int>(n);

    std::vector<int> prev(m + 1);
    std::vector<int> cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            const int sub = prev[j - 1] + substitution_cost(va[i - 1], vb[j - 1]);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

inline std::size_t kernel_length(const std::string& kernel) { return decode_utf8(kernel).size(); }

/// Word similarity from the edit distance, normalized by the longer kernel.
/// Two empty kernels count as identical.
inline double coeff_ocr(const std::string& kernel_a, const std::string& kernel_b) {
    const std::size_t la = kernel_length(kernel_a);
    const std::size_t lb = kernel_length(kernel_b);
    const std::size_t longest = std::max(la, lb);
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(edit_distance(kernel_a, kernel_b)) / static_cast<double>(longest);
}

inline double coeff_ocr(const TextPoint& a, const TextPoint& b) {
    return coeff_ocr(a.kernel, b.kernel);
}

inline bool words_coordinated(const TextPoint& a, const TextPoint& b, const MatchParams& p) {
    return coeff_ocr(a, b) > p.word_ocr_simil;
}

/// One coordinated pair. Merged entries (after split/merge repair) span more
/// than one index on a side; plain alignment always emits singleton spans.
struct AlignedPair {
    std::vector<int> ref_indices;
    std::vector<int> test_indices;
    double coeff = 0.0;
};

struct WordAlignment {
    std::vector<AlignedPair> pairs;  // ordered, non-crossing
    std::vector<int> ref_only;       // unmatched reference words
    std::vector<int> test_only;      // unmatched test words
};

struct LineAlignment {
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> ref_only;
    std::vector<int> test_only;
};

namespace detail {

struct AlignValue {
    int pairs = 0;
    double score = 0.0;
    bool operator>(const AlignValue& o) const {
        if (pairs != o.pairs) return pairs > o.pairs;
        return score > o.score;
    }
};

enum class AlignStep : std::uint8_t { None, Match, SkipA, SkipB };

/// Order-preserving DP maximizing (matched pairs, total similarity).
/// `sim(i,j)` must return a negative value for forbidden pairs.
template <typename SimFn>
void align_sequences(int n, int m, SimFn&& sim, std::vector<std::pair<int, int>>& out_pairs,
                     std::vector<double>& out_coeffs, std::vector<int>& out_a_only,
                     std::vector<int>& out_b_only) {
    std::vector<AlignValue> value(static_cast<std::size_t>(n + 1) * (m + 1));
    std::vector<AlignStep> step(static_cast<std::size_t>(n + 1) * (m + 1), AlignStep::None);
    const auto idx = [m](int i, int j) { return static_cast<std::size_t>(i) * (m + 1) + j; };

    for (int i = 1; i <= n; ++i) step[idx(i, 0)] = AlignStep::SkipA;
    for (int j = 1; j <= m; ++j) step[idx(0, j)] = AlignStep::SkipB;

    std::vector<std::vector<double>> simcache(static_cast<std::size_t>(n),
                                              std::vector<double>(static_cast<std::size_t>(m)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) simcache[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = sim(i, j);

    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= m; ++j) {
            AlignValue best = value[idx(i - 1, j)];
            AlignStep how = AlignStep::SkipA;
            if (value[idx(i, j - 1)] > best) {
                best = value[idx(i, j - 1)];
                how = AlignStep::SkipB;
            }
            const double s = simcache[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
            if (s >= 0.0) {
                AlignValue matched = value[idx(i - 1, j - 1)];
                ++matched.pairs;
                matched.score += s;
                if (!(best > matched)) {  // prefer matching on exact ties
                    best = matched;
                    how = AlignStep::Match;
                }
            }
            value[idx(i, j)] = best;
            step[idx(i, j)] = how;
        }
    }

    std::vector<std::pair<int, int>> rev;
    int i = n, j = m;
    while (i > 0 || j > 0) {
        switch (step[idx(i, j)]) {
            case AlignStep::Match:
                rev.emplace_back(i - 1, j - 1);
                --i;
                --j;
                break;
            case AlignStep::SkipA:
                --i;
                break;
            case AlignStep::SkipB:
                --j;
                break;
            case AlignStep::None:
                i = 0;
                j = 0;
                break;
        }
    }
    std::reverse(rev.begin(), rev.end());

    std::vector<bool> a_used(static_cast<std::size_t>(n), false);
    std::vector<bool> b_used(static_cast<std::size_t>(m), false);
    out_pairs.clear();
    out_coeffs.clear();
    for (const auto& [ia, ib] : rev) {
        out_pairs.emplace_back(ia, ib);
        out_coeffs.push_back(simcache[static_cast<std::size_t>(ia)][static_cast<std::size_t>(ib)]);
        a_used[static_cast<std::size_t>(ia)] = true;
        b_used[static_cast<std::size_t>(ib)] = true;
    }
    out_a_only.clear();
    out_b_only.clear();
    for (int k = 0; k < n; ++k)
        if (!a_used[static_cast<std::size_t>(k)]) out_a_only.push_back(k);
    for (int k = 0; k < m; ++k)
        if (!b_used[static_cast<std::size_t>(k)]) out_b_only.push_back(k);
}

}  // namespace detail

/// Order-preserving word alignment maximizing the number of coordinated
/// pairs, ties broken by total similarity. Sub-threshold pairs are never
/// emitted.
inline WordAlignment align_words(const std::vector<TextPoint>& ref_line,
                                 const std::vector<TextPoint>& test_line, const MatchParams& p) {
    WordAlignment out;
    std::vector<std::pair<int, int>> pairs;
    std::vector<double> coeffs;
    detail::align_sequences(
        static_cast<int>(ref_line.size()), static_cast<int>(test_line.size()),
        [&](int i, int j) {
            const double c = coeff_ocr(ref_line[static_cast<std::size_t>(i)],
                                       test_line[static_cast<std::size_t>(j)]);
            return c > p.word_ocr_simil ? c : -1.0;
        },
        pairs, coeffs, out.ref_only, out.test_only);
    for (std::size_t k = 0; k < pairs.size(); ++k)
        out.pairs.push_back(AlignedPair{{pairs[k].first}, {pairs[k].second}, coeffs[k]});
    return out;
}

/// Proportion of coordinated words relative to the longer line.
inline double line_similarity(const std::vector<TextPoint>& ref_line,
                              const std::vector<TextPoint>& test_line, const MatchParams& p) {
    const std::size_t longest = std::max(ref_line.size(), test_line.size());
    if (longest == 0) return 1.0;
    const auto alignment = align_words(ref_line, test_line, p);
    return static_cast<double>(alignment.pairs.size()) / static_cast<double>(longest);
}

/// Order-preserving line alignment; a pair is admissible when the lines'
/// word-level similarity exceeds the line threshold.
inline LineAlignment align_lines(const DocumentText& ref_doc, const DocumentText& test_doc,
                                 const MatchParams& p) {
    LineAlignment out;
    std::vector<std::pair<int, int>> pairs;
    std::vector<double> coeffs;
    detail::align_sequences(
        static_cast<int>(ref_doc.lines.size()), static_cast<int>(test_doc.lines.size()),
        [&](int i, int j) {
            const double s = line_similarity(ref_doc.lines[static_cast<std::size_t>(i)].words,
                                             test_doc.lines[static_cast<std::size_t>(j)].words, p);
            return s > p.line_simil ? s : -1.0;
        },
        pairs, coeffs, out.ref_only, out.test_only);
    out.pairs = std::move(pairs);
    return out;
}

}  // namespace docdiff
