#pragma once

#include <string>
#include <utility>
#include <vector>

#include "docdiff/geometry.hpp"
#include "docdiff/textnorm.hpp"

namespace docdiff {

/// A recognized word: its normalized kernel, the original string, and its
/// bounding rectangle on the page.
struct TextPoint {
    std::string kernel;
    std::string raw;
    Box box;
    double confidence = 0.0;  // in [0,1]; 0 when the engine gives none

    TextPoint() = default;
    TextPoint(std::string raw_text, Box b, double conf = 0.0)
        : kernel(normalize_kernel(raw_text)), raw(std::move(raw_text)), box(b), confidence(conf) {}

    friend bool operator==(const TextPoint&, const TextPoint&) = default;
};

struct TextLine {
    Box line_box;
    std::vector<TextPoint> words;
};

/// Ordered text content of one page.
struct DocumentText {
    std::vector<TextLine> lines;
    int page_width = 0;
    int page_height = 0;
};

}  // namespace docdiff
