#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "docdiff/error.hpp"
#include "docdiff/image.hpp"

namespace docdiff {

/// Ink-inverted crop of one word: 0 is paper, 255 is full ink.
struct WordRaster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> ink;  // row-major
    std::int64_t ink_sum = 0;

    WordRaster() = default;
    WordRaster(int w, int h, std::vector<std::uint8_t> pixels)
        : width(w), height(h), ink(std::move(pixels)) {
        if (w < 1 || h < 1 || ink.size() != static_cast<std::size_t>(w) * h)
            throw std::invalid_argument("WordRaster: bad dimensions");
        for (auto v : ink) ink_sum += v;
    }

    std::uint8_t at(int x, int y) const { return ink[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return ink[static_cast<std::size_t>(y) * width + x]; }

    friend bool operator==(const WordRaster&, const WordRaster&) = default;
};

/// Shift and rotation grid searched when matching two word images.
struct SearchRange {
    int x_min = -3, x_max = 3;
    int y_min = -3, y_max = 3;
    double alpha_min = -1.0, alpha_max = 1.0;
    double alpha_step = 1.0;
};

inline void validate(const SearchRange& r) {
    if (r.x_min > r.x_max || r.y_min > r.y_max || r.alpha_min > r.alpha_max || r.alpha_step <= 0.0)
        throw std::invalid_argument("SearchRange: min must not exceed max and alpha_step must be > 0");
}

struct PixParams {
    double word_pixel_coeff = 0.25;
    SearchRange range;
};

struct DistResult {
    std::int64_t dist = 0;
    int dx = 0;
    int dy = 0;
    double alpha = 0.0;
};

/// Crop a word box out of a page, inverting intensities so ink is bright.
/// With `binarize_threshold` set, ink becomes 0/255 by that page threshold.
inline WordRaster crop_word(const GrayImage& img, const Box& box, int binarize_threshold = -1) {
    if (box.w < 1 || box.h < 1 || box.x < 0 || box.y < 0 || box.right() > img.width ||
        box.bottom() > img.height)
        throw BoxOutOfBoundsError("crop " + std::to_string(box.x) + "," + std::to_string(box.y) +
                                  " " + std::to_string(box.w) + "x" + std::to_string(box.h) +
                                  " on page " + std::to_string(img.width) + "x" +
                                  std::to_string(img.height));
    std::vector<std::uint8_t> ink(static_cast<std::size_t>(box.w) * box.h);
    for (int y = 0; y < box.h; ++y) {
        for (int x = 0; x < box.w; ++x) {
            const std::uint8_t v = img.at(box.x + x, box.y + y);
            ink[static_cast<std::size_t>(y) * box.w + x] =
                binarize_threshold < 0 ? static_cast<std::uint8_t>(255 - v)
                                       : (v < binarize_threshold ? 255 : 0);
        }
    }
    return WordRaster(box.w, box.h, std::move(ink));
}

/// Grayscale 3x3 dilation: every pixel becomes the maximum of its unit
/// neighborhood. Dimensions are unchanged.
inline WordRaster extend_image(const WordRaster& r) {
    std::vector<std::uint8_t> out(r.ink.size());
    for (int y = 0; y < r.height; ++y) {
        for (int x = 0; x < r.width; ++x) {
            std::uint8_t m = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= r.height) continue;
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = x + dx;
                    if (xx < 0 || xx >= r.width) continue;
                    m = std::max(m, r.at(xx, yy));
                }
            }
            out[static_cast<std::size_t>(y) * r.width + x] = m;
        }
    }
    return WordRaster(r.width, r.height, std::move(out));
}

namespace detail {

/// Nearest-neighbor rotation about the raster center; output keeps the
/// input dimensions, uncovered pixels are ink-free.
inline WordRaster rotate_nn(const WordRaster& r, double alpha_deg) {
    if (alpha_deg == 0.0) return r;
    const double a = alpha_deg * 3.14159265358979323846 / 180.0;
    const double ca = std::cos(a);
    const double sa = std::sin(a);
    const double cx = (r.width - 1) / 2.0;
    const double cy = (r.height - 1) / 2.0;
    std::vector<std::uint8_t> out(r.ink.size(), 0);
    for (int y = 0; y < r.height; ++y) {
        for (int x = 0; x < r.width; ++x) {
            const double rx = x - cx;
            const double ry = y - cy;
            const int xs = static_cast<int>(std::llround(cx + ca * rx + sa * ry));
            const int ys = static_cast<int>(std::llround(cy - sa * rx + ca * ry));
            if (xs < 0 || xs >= r.width || ys < 0 || ys >= r.height) continue;
            out[static_cast<std::size_t>(y) * r.width + x] = r.at(xs, ys);
        }
    }
    return WordRaster(r.width, r.height, std::move(out));
}

struct InkPixel {
    int x;
    int y;
    std::uint8_t v;
};

/// One raster prepared for distance evaluation: its nonzero pixels and its
/// extended image on a one-pixel zero-padded frame (so dilation spill past
/// the raster edge is represented).
struct PreparedRaster {
    int w = 0;
    int h = 0;
    std::vector<InkPixel> ink;
    std::vector<std::uint8_t> ext;  // (w+2) x (h+2)

    std::uint8_t ext_at(int x, int y) const {
        // coordinates in raster frame; the pad shifts indices by one
        if (x < -1 || x > w || y < -1 || y > h) return 0;
        return ext[static_cast<std::size_t>(y + 1) * (w + 2) + (x + 1)];
    }
};

inline PreparedRaster prepare(const WordRaster& r) {
    PreparedRaster p;
    p.w = r.width;
    p.h = r.height;
    p.ink.reserve(64);
    for (int y = 0; y < r.height; ++y)
        for (int x = 0; x < r.width; ++x)
            if (const auto v = r.at(x, y)) p.ink.push_back(InkPixel{x, y, v});

    const int pw = r.width + 2;
    const int ph = r.height + 2;
    p.ext.assign(static_cast<std::size_t>(pw) * ph, 0);
    for (int y = 0; y < ph; ++y) {
        for (int x = 0; x < pw; ++x) {
            std::uint8_t m = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                const int yy = y - 1 + dy;
                if (yy < 0 || yy >= r.height) continue;
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = x - 1 + dx;
                    if (xx < 0 || xx >= r.width) continue;
                    m = std::max(m, r.at(xx, yy));
                }
            }
            p.ext[static_cast<std::size_t>(y) * pw + x] = m;
        }
    }
    return p;
}

/// Sum of max(0, a_v - ext_b) over the ink of `a`, with `a` placed at offset
/// (sx, sy) in b's frame. Stops early once the running sum reaches `abort_at`.
inline std::int64_t uncovered_ink(const std::vector<InkPixel>& a_ink, const PreparedRaster& b,
                                  int sx, int sy, std::int64_t abort_at) {
    std::int64_t sum = 0;
    for (const auto& p : a_ink) {
        const int c = b.ext_at(p.x + sx, p.y + sy);
        if (p.v > c) {
            sum += p.v - c;
            if (sum >= abort_at) return sum;
        }
    }
    return sum;
}

/// Placement offset aligning geometric centers, rounding half away from
/// zero so that swapping the arguments mirrors the offset exactly.
inline int center_offset(int extent_a, int extent_b) {
    const int d = extent_a - extent_b;
    return d >= 0 ? (d + 1) / 2 : -((1 - d) / 2);
}

constexpr std::int64_t kNoAbort = INT64_MAX;

}  // namespace detail

/// Distance between two word images with the test raster rotated by `alpha`
/// and shifted by (dx, dy): ink of either image not covered by the 1-pixel
/// extension of the other, summed over both directions.
inline std::int64_t dist_at(const WordRaster& m, const WordRaster& t, int dx, int dy, double alpha) {
    const WordRaster rt = detail::rotate_nn(t, alpha);
    const auto pm = detail::prepare(m);
    const auto pt = detail::prepare(rt);
    const int sx = dx + detail::center_offset(m.width, t.width);
    const int sy = dy + detail::center_offset(m.height, t.height);
    // t's local origin sits at (sx, sy) in m's frame
    return detail::uncovered_ink(pt.ink, pm, sx, sy, detail::kNoAbort) +
           detail::uncovered_ink(pm.ink, pt, -sx, -sy, detail::kNoAbort);
}

/// Exhaustive minimum of dist_at over the shift/rotation grid. Ties prefer
/// the smallest (|dx|+|dy|, |alpha|), then lexicographic (dx, dy, alpha).
inline DistResult dist_min(const WordRaster& m, const WordRaster& t, const SearchRange& range) {
    validate(range);

    std::vector<double> alphas;
    for (int k = 0;; ++k) {
        const double a = range.alpha_min + k * range.alpha_step;
        if (a > range.alpha_max + 1e-9) break;
        alphas.push_back(a);
    }

    struct Candidate {
        int dx, dy;
        int alpha_idx;
        double alpha;
    };
    std::vector<Candidate> grid;
    grid.reserve(static_cast<std::size_t>(range.x_max - range.x_min + 1) *
                 (range.y_max - range.y_min + 1) * alphas.size());
    for (int dx = range.x_min; dx <= range.x_max; ++dx)
        for (int dy = range.y_min; dy <= range.y_max; ++dy)
            for (std::size_t ai = 0; ai < alphas.size(); ++ai)
                grid.push_back(Candidate{dx, dy, static_cast<int>(ai), alphas[ai]});
    std::stable_sort(grid.begin(), grid.end(), [](const Candidate& a, const Candidate& b) {
        const int la = std::abs(a.dx) + std::abs(a.dy);
        const int lb = std::abs(b.dx) + std::abs(b.dy);
        if (la != lb) return la < lb;
        const double aa = std::abs(a.alpha);
        const double ab = std::abs(b.alpha);
        if (aa != ab) return aa < ab;
        if (a.dx != b.dx) return a.dx < b.dx;
        if (a.dy != b.dy) return a.dy < b.dy;
        return a.alpha < b.alpha;
    });

    const auto pm = detail::prepare(m);
    std::vector<detail::PreparedRaster> pts;
    pts.reserve(alphas.size());
    for (const double a : alphas) pts.push_back(detail::prepare(detail::rotate_nn(t, a)));

    const int ox = detail::center_offset(m.width, t.width);
    const int oy = detail::center_offset(m.height, t.height);

    DistResult best;
    best.dist = detail::kNoAbort;
    for (const auto& c : grid) {
        const auto& pt = pts[static_cast<std::size_t>(c.alpha_idx)];
        const int sx = c.dx + ox;
        const int sy = c.dy + oy;
        // candidates are visited in tie-break order, so reaching the current
        // best is already a loss and the scan may stop
        std::int64_t d = detail::uncovered_ink(pt.ink, pm, sx, sy, best.dist);
        if (d >= best.dist) continue;
        d += detail::uncovered_ink(pm.ink, pt, -sx, -sy, best.dist - d);
        if (d >= best.dist) continue;
        best = DistResult{d, c.dx, c.dy, c.alpha};
        if (d == 0) break;
    }
    return best;
}

/// Minimal pixel distance normalized by the heavier ink mass. Can exceed 1
/// for disjoint inputs.
inline double coeff_pix(const WordRaster& m, const WordRaster& t, const SearchRange& range) {
    const std::int64_t denom = std::max(m.ink_sum, t.ink_sum);
    if (denom == 0) throw BothBlankError();
    return static_cast<double>(dist_min(m, t, range).dist) / static_cast<double>(denom);
}

inline bool words_equal_pix(const WordRaster& m, const WordRaster& t, const PixParams& p) {
    return coeff_pix(m, t, p.range) < p.word_pixel_coeff;
}

}  // namespace docdiff
