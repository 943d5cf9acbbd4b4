// Independent reference implementations used to check the library. These are
// deliberately naive: full DP matrices, explicit canvases, exhaustive
// recursion. They must not share code with the implementation paths they
// verify.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "docdiff/image.hpp"
#include "docdiff/pixmatch.hpp"
#include "docdiff/textnorm.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Edit distance: full-matrix DP with its own confusable table.
// ---------------------------------------------------------------------------

inline int char_class(char32_t c) {
    const std::u32string dashes = U"-‐‑‒–—―−";
    const std::u32string quotes = U"'\"`«»‘’‚‛“”„‟‹›";
    if (dashes.find(c) != std::u32string::npos) return 1;
    if (quotes.find(c) != std::u32string::npos) return 2;
    if (c == U'O' || c == U'o' || c == U'0') return 3;
    if (c == U'I' || c == U'l' || c == U'1' || c == U'|') return 4;
    return 0;
}

inline int edit_distance(const std::string& a, const std::string& b) {
    const auto va = docdiff::decode_utf8(a);
    const auto vb = docdiff::decode_utf8(b);
    const std::size_t n = va.size(), m = vb.size();
    std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
    for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
    for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const char32_t x = va[i - 1], y = vb[j - 1];
            const bool same = x == y || (char_class(x) != 0 && char_class(x) == char_class(y));
            d[i][j] = std::min({d[i - 1][j - 1] + (same ? 0 : 1), d[i - 1][j] + 1, d[i][j - 1] + 1});
        }
    }
    return d[n][m];
}

// ---------------------------------------------------------------------------
// Otsu: brute-force two-class variance scan over pixel lists.
// ---------------------------------------------------------------------------

inline int otsu_threshold(const std::vector<std::uint8_t>& pixels) {
    int vmin = 255, vmax = 0;
    for (auto v : pixels) {
        vmin = std::min<int>(vmin, v);
        vmax = std::max<int>(vmax, v);
    }
    if (vmin >= vmax) return 0;
    double best_var = -1.0;
    int best_t = vmin + 1;
    for (int t = vmin + 1; t <= vmax; ++t) {
        double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
        for (auto v : pixels) {
            if (v < t) {
                n0 += 1;
                s0 += v;
            } else {
                n1 += 1;
                s1 += v;
            }
        }
        if (n0 == 0 || n1 == 0) continue;
        const double m0 = s0 / n0, m1 = s1 / n1;
        const double var = n0 * n1 * (m0 - m1) * (m0 - m1);
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    return best_t;
}

// ---------------------------------------------------------------------------
// Word-image distance: explicit common canvas, explicit max filter.
// ---------------------------------------------------------------------------

struct Canvas {
    int w = 0, h = 0;
    std::vector<int> v;
    int at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
    int& at(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
};

inline Canvas max_filter_3x3(const Canvas& c) {
    Canvas out{c.w, c.h, std::vector<int>(c.v.size(), 0)};
    for (int y = 0; y < c.h; ++y)
        for (int x = 0; x < c.w; ++x) {
            int m = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = x + dx, yy = y + dy;
                    if (xx < 0 || xx >= c.w || yy < 0 || yy >= c.h) continue;
                    m = std::max(m, c.at(xx, yy));
                }
            out.at(x, y) = m;
        }
    return out;
}

inline docdiff::WordRaster rotate_nn(const docdiff::WordRaster& r, double alpha_deg) {
    std::vector<std::uint8_t> out(r.ink.size(), 0);
    const double a = alpha_deg * 3.14159265358979323846 / 180.0;
    const double ca = std::cos(a), sa = std::sin(a);
    const double cx = (r.width - 1) / 2.0, cy = (r.height - 1) / 2.0;
    for (int y = 0; y < r.height; ++y)
        for (int x = 0; x < r.width; ++x) {
            const long xs = std::llround(cx + ca * (x - cx) + sa * (y - cy));
            const long ys = std::llround(cy - sa * (x - cx) + ca * (y - cy));
            if (xs < 0 || xs >= r.width || ys < 0 || ys >= r.height) continue;
            out[static_cast<std::size_t>(y) * r.width + x] =
                r.ink[static_cast<std::size_t>(ys) * r.width + xs];
        }
    return docdiff::WordRaster(r.width, r.height, std::move(out));
}

inline int round_half_away(int num) {  // num/2 rounded half away from zero
    return num >= 0 ? (num + 1) / 2 : -((1 - num) / 2);
}

inline std::int64_t dist_at(const docdiff::WordRaster& m, const docdiff::WordRaster& t, int dx,
                            int dy, double alpha) {
    const docdiff::WordRaster rt = rotate_nn(t, alpha);
    // place t's origin at (sx, sy) in m's frame, centers aligned
    const int sx = dx + round_half_away(m.width - t.width);
    const int sy = dy + round_half_away(m.height - t.height);

    const int min_x = std::min(0, sx) - 1;
    const int min_y = std::min(0, sy) - 1;
    const int max_x = std::max(m.width, sx + rt.width) + 1;
    const int max_y = std::max(m.height, sy + rt.height) + 1;
    Canvas cm{max_x - min_x, max_y - min_y, {}};
    cm.v.assign(static_cast<std::size_t>(cm.w) * cm.h, 0);
    Canvas ct = cm;
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) cm.at(x - min_x, y - min_y) = m.at(x, y);
    for (int y = 0; y < rt.height; ++y)
        for (int x = 0; x < rt.width; ++x) ct.at(x + sx - min_x, y + sy - min_y) = rt.at(x, y);

    const Canvas em = max_filter_3x3(cm);
    const Canvas et = max_filter_3x3(ct);
    std::int64_t sum = 0;
    for (int y = 0; y < cm.h; ++y)
        for (int x = 0; x < cm.w; ++x) {
            sum += std::max(0, ct.at(x, y) - em.at(x, y));
            sum += std::max(0, cm.at(x, y) - et.at(x, y));
        }
    return sum;
}

struct DistBest {
    std::int64_t dist = -1;
    int dx = 0, dy = 0;
    double alpha = 0.0;
};

inline DistBest dist_min(const docdiff::WordRaster& m, const docdiff::WordRaster& t,
                         const docdiff::SearchRange& range) {
    DistBest best;
    for (int dx = range.x_min; dx <= range.x_max; ++dx) {
        for (int dy = range.y_min; dy <= range.y_max; ++dy) {
            for (int k = 0;; ++k) {
                const double a = range.alpha_min + k * range.alpha_step;
                if (a > range.alpha_max + 1e-9) break;
                const std::int64_t d = oracle::dist_at(m, t, dx, dy, a);
                const auto key = std::make_tuple(std::abs(dx) + std::abs(dy), std::abs(a), dx, dy, a);
                const auto best_key = std::make_tuple(std::abs(best.dx) + std::abs(best.dy),
                                                      std::abs(best.alpha), best.dx, best.dy,
                                                      best.alpha);
                if (best.dist < 0 || d < best.dist || (d == best.dist && key < best_key)) {
                    best = DistBest{d, dx, dy, a};
                }
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Exhaustive order-preserving matching.
// ---------------------------------------------------------------------------

/// Maximum number of pairs over all monotone matchings where `allowed(i,j)`
/// admits a pair. Exponential; inputs must stay tiny.
inline int best_matching_count(int n, int m, const std::function<bool(int, int)>& allowed) {
    std::function<int(int, int)> rec = [&](int i, int j) -> int {
        if (i >= n || j >= m) return 0;
        int best = std::max(rec(i + 1, j), rec(i, j + 1));
        if (allowed(i, j)) best = std::max(best, 1 + rec(i + 1, j + 1));
        return best;
    };
    return rec(0, 0);
}

// ---------------------------------------------------------------------------
// Deterministic RNG helpers for test data.
// ---------------------------------------------------------------------------

struct Rand {
    std::mt19937 gen;
    explicit Rand(std::uint32_t seed) : gen(seed) {}
    int uniform(int lo, int hi) { return lo + static_cast<int>(gen() % static_cast<std::uint32_t>(hi - lo + 1)); }
    bool chance_percent(int pct) { return uniform(0, 99) < pct; }
};

inline docdiff::WordRaster random_raster(Rand& rng, int max_side = 16, bool sparse = true) {
    const int w = rng.uniform(2, max_side);
    const int h = rng.uniform(2, max_side);
    std::vector<std::uint8_t> ink(static_cast<std::size_t>(w) * h, 0);
    for (auto& v : ink) {
        if (sparse && !rng.chance_percent(30)) continue;
        v = static_cast<std::uint8_t>(rng.uniform(0, 255));
    }
    return docdiff::WordRaster(w, h, std::move(ink));
}

inline docdiff::BinaryImage random_mask(Rand& rng, int max_side = 16) {
    const int w = rng.uniform(1, max_side);
    const int h = rng.uniform(1, max_side);
    docdiff::BinaryImage img(w, h);
    for (auto& v : img.data) v = rng.chance_percent(40) ? 1 : 0;
    return img;
}

inline std::string random_kernel(Rand& rng, int max_len = 12) {
    static const std::string alphabet = "abcO0Il1|-'/xyz.";
    const int len = rng.uniform(0, max_len);
    std::string s;
    for (int i = 0; i < len; ++i)
        s.push_back(alphabet[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(alphabet.size()) - 1))]);
    return s;
}

}  // namespace oracle
