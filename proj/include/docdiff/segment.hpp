#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "docdiff/error.hpp"
#include "docdiff/raster.hpp"

namespace docdiff {

/// Per-page character geometry derived from the projection profile.
struct CharMetrics {
    int char_height = 1;
    int line_gap = 1;
    int space_width = 2;
};

struct LayoutLine {
    Box line_box;
    std::vector<Box> words;
};

struct PageLayout {
    std::vector<LayoutLine> lines;
};

namespace detail {

constexpr int kNoiseFloor = 2;  // projection counts at or below this are background

struct Band {
    int begin = 0;  // inclusive
    int end = 0;    // exclusive
    int length() const { return end - begin; }
};

inline std::vector<Band> profile_bands(const std::vector<int>& profile, int noise_floor) {
    std::vector<Band> bands;
    int start = -1;
    for (int i = 0; i <= static_cast<int>(profile.size()); ++i) {
        const bool on = i < static_cast<int>(profile.size()) && profile[static_cast<std::size_t>(i)] > noise_floor;
        if (on && start < 0) start = i;
        if (!on && start >= 0) {
            bands.push_back(Band{start, i});
            start = -1;
        }
    }
    return bands;
}

inline int median_length(std::vector<int> values) {
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

}  // namespace detail

/// Estimate character height, inter-line gap and the inter-word space
/// threshold from the horizontal projection of a foreground mask.
inline CharMetrics estimate_char_metrics(const BinaryImage& mask) {
    if (mask.foreground_count() == 0) throw BlankImageError();
    const auto profile = projection(mask, Axis::Horizontal);
    const auto bands = detail::profile_bands(profile, detail::kNoiseFloor);
    if (bands.empty()) throw BlankImageError("no text bands above the noise floor");

    std::vector<int> heights;
    heights.reserve(bands.size());
    for (const auto& b : bands) heights.push_back(b.length());
    CharMetrics m;
    m.char_height = std::max(1, detail::median_length(heights));

    std::vector<int> gaps;
    for (std::size_t i = 1; i < bands.size(); ++i) gaps.push_back(bands[i].begin - bands[i - 1].end);
    m.line_gap = gaps.empty() ? m.char_height : std::max(1, detail::median_length(gaps));
    m.space_width = std::max(2, detail::round_half_up(0.3 * m.char_height));
    return m;
}

/// Group projection bands into text lines and tighten each to its ink.
inline std::vector<Box> segment_lines(const BinaryImage& mask, const CharMetrics& metrics) {
    const auto profile = projection(mask, Axis::Horizontal);
    auto bands = detail::profile_bands(profile, detail::kNoiseFloor);
    if (bands.empty()) return {};

    const double merge_below = 0.3 * metrics.line_gap;
    std::vector<detail::Band> merged;
    merged.push_back(bands.front());
    for (std::size_t i = 1; i < bands.size(); ++i) {
        if (bands[i].begin - merged.back().end < merge_below)
            merged.back().end = bands[i].end;
        else
            merged.push_back(bands[i]);
    }

    std::vector<Box> out;
    for (const auto& band : merged) {
        int x0 = mask.width, x1 = -1, y0 = mask.height, y1 = -1;
        for (int y = band.begin; y < band.end; ++y) {
            for (int x = 0; x < mask.width; ++x) {
                if (!mask.at(x, y)) continue;
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
        }
        if (x1 >= x0) out.push_back(Box{x0, y0, x1 - x0 + 1, y1 - y0 + 1});
    }
    return out;
}

/// Split one line strip into word boxes: close small horizontal gaps, then
/// cut at empty columns of the vertical projection.
inline std::vector<Box> segment_words(const BinaryImage& mask, const Box& line,
                                      const CharMetrics& metrics) {
    if (line.x < 0 || line.y < 0 || line.right() > mask.width || line.bottom() > mask.height)
        throw std::invalid_argument("segment_words: line box outside mask");

    int close_w = metrics.space_width - 1;
    if (close_w % 2 == 0) ++close_w;  // morphology kernels must be odd
    const int pad = close_w / 2 + 1;  // keep the closing away from the strip border

    BinaryImage strip(std::max(1, line.w), std::max(1, line.h));
    for (int y = 0; y < line.h; ++y)
        for (int x = 0; x < line.w; ++x) strip.at(x, y) = mask.at(line.x + x, line.y + y);

    // column-occupancy profile of the strip, closed with a horizontal kernel
    // so intra-word gaps vanish while inter-word spaces survive
    BinaryImage columns(line.w + 2 * pad, 1);
    const auto vproj = projection(strip, Axis::Vertical);
    for (int x = 0; x < line.w; ++x) columns.at(pad + x, 0) = vproj[static_cast<std::size_t>(x)] > 0;
    const BinaryImage closed =
        close_w >= 3 ? erode(dilate(columns, close_w, 1), close_w, 1) : columns;

    std::vector<Box> words;
    int start = -1;
    for (int x = 0; x <= closed.width; ++x) {
        const bool on = x < closed.width && closed.at(x, 0);
        if (on && start < 0) start = x;
        if (!on && start >= 0) {
            // tighten to the original ink inside [start, x)
            int x0 = strip.width, x1 = -1, y0 = line.h, y1 = -1;
            for (int yy = 0; yy < line.h; ++yy) {
                for (int xx = std::max(0, start - pad); xx < std::min(line.w, x - pad); ++xx) {
                    if (!strip.at(xx, yy)) continue;
                    x0 = std::min(x0, xx);
                    x1 = std::max(x1, xx);
                    y0 = std::min(y0, yy);
                    y1 = std::max(y1, yy);
                }
            }
            if (x1 >= x0)
                words.push_back(Box{line.x + x0, line.y + y0, x1 - x0 + 1, y1 - y0 + 1});
            start = -1;
        }
    }
    return words;
}

/// Full geometric layout of a deskewed page.
inline PageLayout layout_page(const GrayImage& img) {
    const BinaryImage mask = binarize(img);
    const CharMetrics metrics = estimate_char_metrics(mask);
    PageLayout layout;
    for (const auto& line : segment_lines(mask, metrics))
        layout.lines.push_back(LayoutLine{line, segment_words(mask, line, metrics)});
    return layout;
}

}  // namespace docdiff
