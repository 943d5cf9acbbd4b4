#pragma once

#include <algorithm>
#include <cstdint>

namespace docdiff {

/// Axis-aligned rectangle: (x,y) is the top-left corner, w/h the extent in pixels.
struct Box {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int right() const { return x + w; }
    int bottom() const { return y + h; }
    std::int64_t area() const { return static_cast<std::int64_t>(w) * h; }
    bool empty() const { return w <= 0 || h <= 0; }

    bool contains(int px, int py) const {
        return px >= x && px < right() && py >= y && py < bottom();
    }
    bool contains(const Box& b) const {
        return b.x >= x && b.y >= y && b.right() <= right() && b.bottom() <= bottom();
    }

    friend bool operator==(const Box&, const Box&) = default;
};

inline Box intersect(const Box& a, const Box& b) {
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.right(), b.right());
    const int y1 = std::min(a.bottom(), b.bottom());
    if (x1 <= x0 || y1 <= y0) return Box{x0, y0, 0, 0};
    return Box{x0, y0, x1 - x0, y1 - y0};
}

inline Box union_box(const Box& a, const Box& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    const int x0 = std::min(a.x, b.x);
    const int y0 = std::min(a.y, b.y);
    const int x1 = std::max(a.right(), b.right());
    const int y1 = std::max(a.bottom(), b.bottom());
    return Box{x0, y0, x1 - x0, y1 - y0};
}

inline double iou(const Box& a, const Box& b) {
    const auto inter = intersect(a, b).area();
    if (inter == 0) return 0.0;
    const auto uni = a.area() + b.area() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Horizontal overlap length of two boxes, ignoring the vertical axis.
inline int x_overlap(const Box& a, const Box& b) {
    return std::max(0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
}

}  // namespace docdiff
