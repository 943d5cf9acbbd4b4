#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "docdiff/error.hpp"
#include "docdiff/image.hpp"

namespace docdiff {

enum class Axis { Horizontal, Vertical };

struct SkewEstimate {
    double angle = 0.0;       // degrees, positive = counter-clockwise text rotation
    double confidence = 0.0;  // in [0,1]
};

namespace detail {

inline int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

inline std::array<std::int64_t, 256> histogram(const GrayImage& img) {
    std::array<std::int64_t, 256> hist{};
    for (auto v : img.data) ++hist[v];
    return hist;
}

}  // namespace detail

/// Linear contrast stretch mapping the low/high intensity percentiles to 0/255.
/// Constant images come back unchanged.
inline GrayImage auto_contrast(const GrayImage& img, double low_pct = 0.01, double high_pct = 0.99) {
    if (!(low_pct >= 0.0 && low_pct < high_pct && high_pct <= 1.0))
        throw std::invalid_argument("auto_contrast: need 0 <= low < high <= 1");

    const auto hist = detail::histogram(img);
    const std::int64_t total = static_cast<std::int64_t>(img.data.size());
    const auto rank_of = [&](double p) {
        const auto r = static_cast<std::int64_t>(std::ceil(p * static_cast<double>(total)));
        return std::max<std::int64_t>(1, r);
    };
    const auto value_at_rank = [&](std::int64_t rank) {
        std::int64_t cum = 0;
        for (int v = 0; v < 256; ++v) {
            cum += hist[v];
            if (cum >= rank) return v;
        }
        return 255;
    };
    const int lo = value_at_rank(rank_of(low_pct));
    const int hi = value_at_rank(rank_of(high_pct));
    if (hi <= lo) return img;

    std::array<std::uint8_t, 256> lut;
    for (int v = 0; v < 256; ++v) {
        const double mapped = (v - lo) * 255.0 / (hi - lo);
        lut[v] = static_cast<std::uint8_t>(std::clamp(detail::round_half_up(mapped), 0, 255));
    }
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) out.data[i] = lut[img.data[i]];
    return out;
}

/// Otsu's global threshold; pixels strictly below it are foreground.
/// Returns 0 for constant images (nothing is foreground).
inline int otsu_threshold(const GrayImage& img) {
    const auto hist = detail::histogram(img);
    const auto total = static_cast<std::int64_t>(img.data.size());

    int vmin = 255, vmax = 0;
    for (int v = 0; v < 256; ++v) {
        if (hist[v]) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
    if (vmin >= vmax) return 0;

    std::int64_t sum_all = 0;
    for (int v = 0; v < 256; ++v) sum_all += static_cast<std::int64_t>(v) * hist[v];

    int best_t = vmin + 1;
    double best_var = -1.0;
    std::int64_t w0 = 0;
    std::int64_t sum0 = 0;
    for (int t = vmin + 1; t <= vmax; ++t) {
        w0 += hist[t - 1];
        sum0 += static_cast<std::int64_t>(t - 1) * hist[t - 1];
        const std::int64_t w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        const double m0 = static_cast<double>(sum0) / static_cast<double>(w0);
        const double m1 = static_cast<double>(sum_all - sum0) / static_cast<double>(w1);
        const double var = static_cast<double>(w0) * static_cast<double>(w1) * (m0 - m1) * (m0 - m1);
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    return best_t;
}

inline BinaryImage binarize(const GrayImage& img) {
    const int t = otsu_threshold(img);
    BinaryImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) out.data[i] = img.data[i] < t ? 1 : 0;
    return out;
}

/// Rotate about the image center with bilinear interpolation; uncovered
/// pixels are filled white. Output has the input's dimensions.
inline GrayImage rotate(const GrayImage& img, double angle_deg) {
    if (std::abs(angle_deg) > 45.0) throw std::invalid_argument("rotate: |angle| must be <= 45");
    if (angle_deg == 0.0) return img;

    const double a = angle_deg * 3.14159265358979323846 / 180.0;
    const double ca = std::cos(a);
    const double sa = std::sin(a);
    const double cx = (img.width - 1) / 2.0;
    const double cy = (img.height - 1) / 2.0;

    GrayImage out(img.width, img.height, 255);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double rx = x - cx;
            const double ry = y - cy;
            const double xs = cx + ca * rx + sa * ry;
            const double ys = cy - sa * rx + ca * ry;
            if (xs < 0.0 || xs > img.width - 1 || ys < 0.0 || ys > img.height - 1) continue;
            const int x0 = static_cast<int>(std::floor(xs));
            const int y0 = static_cast<int>(std::floor(ys));
            const double fx = xs - x0;
            const double fy = ys - y0;
            const int x1 = std::min(x0 + 1, img.width - 1);
            const int y1 = std::min(y0 + 1, img.height - 1);
            const double v = (1 - fx) * (1 - fy) * img.at(x0, y0) + fx * (1 - fy) * img.at(x1, y0) +
                             (1 - fx) * fy * img.at(x0, y1) + fx * fy * img.at(x1, y1);
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp(detail::round_half_up(v), 0, 255));
        }
    }
    return out;
}

/// Estimate the text rotation by maximizing the variance of the horizontal
/// projection profile over a discrete angle grid. The profile for each
/// candidate angle is accumulated directly from the foreground pixels.
inline SkewEstimate estimate_skew(const GrayImage& img, double max_angle = 5.0, double step = 0.1) {
    if (!(step > 0.0 && step <= max_angle && max_angle <= 15.0))
        throw std::invalid_argument("estimate_skew: need 0 < step <= max_angle <= 15");

    const BinaryImage mask = binarize(img);
    std::vector<std::pair<int, int>> fg;
    fg.reserve(1024);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y)) fg.emplace_back(x, y);
    if (fg.empty()) throw BlankImageError();

    const double cx = (img.width - 1) / 2.0;
    const double cy = (img.height - 1) / 2.0;
    const int slack = static_cast<int>(std::ceil(img.width * std::sin(max_angle * 3.14159265358979323846 / 180.0))) + 2;
    const int rows = img.height + 2 * slack;

    const int steps = static_cast<int>(std::lround(2.0 * max_angle / step));
    std::vector<double> scores;
    scores.reserve(steps + 1);
    double best_score = -1.0;
    double best_angle = 0.0;
    std::vector<std::int64_t> profile(static_cast<std::size_t>(rows));

    for (int i = 0; i <= steps; ++i) {
        const double a = -max_angle + i * step;
        const double rad = a * 3.14159265358979323846 / 180.0;
        const double sa = std::sin(rad);
        const double ca = std::cos(rad);
        std::fill(profile.begin(), profile.end(), 0);
        for (const auto& [x, y] : fg) {
            // row index of this pixel in the image rotated by -a
            const double ry = cy - sa * (x - cx) + ca * (y - cy);
            const int r = static_cast<int>(std::lround(ry)) + slack;
            if (r >= 0 && r < rows) ++profile[static_cast<std::size_t>(r)];
        }
        double sum_sq = 0.0;
        for (auto c : profile) sum_sq += static_cast<double>(c) * static_cast<double>(c);
        // fixed row count and fixed total mass: comparing sum of squares
        // is equivalent to comparing variance
        scores.push_back(sum_sq);
        if (sum_sq > best_score) {
            best_score = sum_sq;
            best_angle = a;
        }
    }

    std::vector<double> sorted = scores;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double confidence =
        best_score > 0.0 ? std::clamp(1.0 - median / best_score, 0.0, 1.0) : 0.0;
    return SkewEstimate{best_angle, confidence};
}

namespace detail {

inline void check_kernel(int kw, int kh) {
    if (kw < 1 || kh < 1 || kw % 2 == 0 || kh % 2 == 0)
        throw std::invalid_argument("morphology kernel dimensions must be odd and >= 1");
}

}  // namespace detail

/// Flat rectangular dilation; cells outside the image count as background.
inline BinaryImage dilate(const BinaryImage& img, int kernel_w, int kernel_h) {
    detail::check_kernel(kernel_w, kernel_h);
    const int rx = kernel_w / 2;
    const int ry = kernel_h / 2;
    BinaryImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            std::uint8_t v = 0;
            for (int dy = -ry; dy <= ry && !v; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= img.height) continue;
                for (int dx = -rx; dx <= rx; ++dx) {
                    const int xx = x + dx;
                    if (xx < 0 || xx >= img.width) continue;
                    if (img.at(xx, yy)) {
                        v = 1;
                        break;
                    }
                }
            }
            out.at(x, y) = v;
        }
    }
    return out;
}

/// Flat rectangular erosion; cells outside the image count as background,
/// so foreground touching the border erodes away.
inline BinaryImage erode(const BinaryImage& img, int kernel_w, int kernel_h) {
    detail::check_kernel(kernel_w, kernel_h);
    const int rx = kernel_w / 2;
    const int ry = kernel_h / 2;
    BinaryImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            std::uint8_t v = 1;
            for (int dy = -ry; dy <= ry && v; ++dy) {
                const int yy = y + dy;
                for (int dx = -rx; dx <= rx; ++dx) {
                    const int xx = x + dx;
                    if (yy < 0 || yy >= img.height || xx < 0 || xx >= img.width || !img.at(xx, yy)) {
                        v = 0;
                        break;
                    }
                }
            }
            out.at(x, y) = v;
        }
    }
    return out;
}

/// Per-row (horizontal) or per-column (vertical) foreground counts.
inline std::vector<int> projection(const BinaryImage& img, Axis axis) {
    if (axis == Axis::Horizontal) {
        std::vector<int> counts(static_cast<std::size_t>(img.height), 0);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) counts[static_cast<std::size_t>(y)] += img.at(x, y) ? 1 : 0;
        return counts;
    }
    std::vector<int> counts(static_cast<std::size_t>(img.width), 0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) counts[static_cast<std::size_t>(x)] += img.at(x, y) ? 1 : 0;
    return counts;
}

}  // namespace docdiff
