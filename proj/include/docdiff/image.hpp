#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "docdiff/geometry.hpp"

namespace docdiff {

/// 8-bit grayscale raster; 0 is ink, 255 is paper.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // row-major

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 255)
        : width(w), height(h), data(check_dims(w, h), fill) {}
    GrayImage(int w, int h, std::vector<std::uint8_t> pixels)
        : width(w), height(h), data(std::move(pixels)) {
        if (data.size() != check_dims(w, h))
            throw std::invalid_argument("GrayImage: data length != width*height");
    }

    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    Box bounds() const { return Box{0, 0, width, height}; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    static std::size_t check_dims(int w, int h) {
        if (w < 1 || h < 1) throw std::invalid_argument("GrayImage: dimensions must be >= 1");
        return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    }
};

/// Foreground mask produced by binarization; 1 is ink.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // row-major, 0/1

    BinaryImage() = default;
    BinaryImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h),
          data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
        if (w < 1 || h < 1) throw std::invalid_argument("BinaryImage: dimensions must be >= 1");
    }

    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    std::int64_t foreground_count() const {
        std::int64_t n = 0;
        for (auto v : data) n += v ? 1 : 0;
        return n;
    }

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;
};

/// 24-bit color raster used for annotation overlays.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // row-major, 3 bytes per pixel

    RgbImage() = default;
    RgbImage(int w, int h, std::uint8_t r = 255, std::uint8_t g = 255, std::uint8_t b = 255)
        : width(w), height(h) {
        if (w < 1 || h < 1) throw std::invalid_argument("RgbImage: dimensions must be >= 1");
        data.resize(static_cast<std::size_t>(w) * h * 3);
        for (std::size_t i = 0; i < data.size(); i += 3) {
            data[i] = r;
            data[i + 1] = g;
            data[i + 2] = b;
        }
    }

    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        auto* p = &data[(static_cast<std::size_t>(y) * width + x) * 3];
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }
    const std::uint8_t* pixel(int x, int y) const {
        return &data[(static_cast<std::size_t>(y) * width + x) * 3];
    }
};

}  // namespace docdiff
