#pragma once

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "docdiff/error.hpp"
#include "docdiff/image.hpp"

namespace docdiff {

namespace detail {

struct FileHandle {
    std::FILE* f = nullptr;
    explicit FileHandle(const std::string& path, const char* mode) : f(std::fopen(path.c_str(), mode)) {}
    ~FileHandle() {
        if (f) std::fclose(f);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

inline int luma_rec601(int r, int g, int b) {
    // Rec. 601 weights, rounded half-up.
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    const int v = static_cast<int>(y + 0.5);
    return v > 255 ? 255 : v;
}

inline GrayImage load_png(const std::string& path) {
    FileHandle fh(path, "rb");
    if (!fh.f) throw FileNotFoundError(path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw CorruptImageError(path + ": png reader init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw CorruptImageError(path + ": png reader init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw CorruptImageError(path);
    }
    png_init_io(png, fh.f);
    png_read_png(png, info,
                 PNG_TRANSFORM_STRIP_16 | PNG_TRANSFORM_STRIP_ALPHA | PNG_TRANSFORM_EXPAND |
                     PNG_TRANSFORM_PACKING,
                 nullptr);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int channels = png_get_channels(png, info);
    png_bytepp rows = png_get_rows(png, info);

    if (w < 1 || h < 1 || !rows) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw CorruptImageError(path + ": empty image");
    }

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    if (color == PNG_COLOR_TYPE_GRAY && channels == 1) {
        for (png_uint_32 y = 0; y < h; ++y)
            std::memcpy(&img.data[static_cast<std::size_t>(y) * w], rows[y], w);
    } else if (color == PNG_COLOR_TYPE_RGB && channels == 3) {
        for (png_uint_32 y = 0; y < h; ++y) {
            const png_bytep row = rows[y];
            for (png_uint_32 x = 0; x < w; ++x) {
                img.data[static_cast<std::size_t>(y) * w + x] = static_cast<std::uint8_t>(
                    luma_rec601(row[3 * x], row[3 * x + 1], row[3 * x + 2]));
            }
        }
    } else {
        png_destroy_read_struct(&png, &info, nullptr);
        throw UnsupportedFormatError(path + ": PNG must decode to 8-bit gray or RGB");
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

inline GrayImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFoundError(path);

    auto next_token = [&in, &path]() -> std::string {
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') {  // comment to end of line
                while ((c = in.get()) != EOF && c != '\n') {
                }
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) break;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        if (tok.empty()) throw CorruptImageError(path + ": truncated PGM header");
        return tok;
    };

    const std::string magic = next_token();
    if (magic != "P5") throw UnsupportedFormatError(path + ": only binary PGM (P5) is supported");
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(next_token());
        h = std::stoi(next_token());
        maxval = std::stoi(next_token());
    } catch (const std::exception&) {
        throw CorruptImageError(path + ": bad PGM header");
    }
    if (w < 1 || h < 1) throw CorruptImageError(path + ": bad PGM dimensions");
    if (maxval <= 0 || maxval > 255)
        throw UnsupportedFormatError(path + ": PGM maxval must be in [1,255]");

    GrayImage img(w, h);
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.data.size()))
        throw CorruptImageError(path + ": truncated PGM data");
    if (maxval != 255) {
        for (auto& v : img.data)
            v = static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
    }
    return img;
}

}  // namespace detail

/// Load a PNG (8-bit gray or RGB) or binary PGM image as grayscale.
/// Color inputs are reduced with Rec. 601 luma weights.
inline GrayImage load_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw FileNotFoundError(path);
    unsigned char sig[8] = {0};
    probe.read(reinterpret_cast<char*>(sig), 8);
    const auto got = probe.gcount();
    probe.close();

    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    if (got >= 8 && std::memcmp(sig, png_sig, 8) == 0) return detail::load_png(path);
    if (got >= 2 && sig[0] == 'P' && sig[1] == '5') return detail::load_pgm(path);
    throw UnsupportedFormatError(path + ": not a PNG or binary PGM file");
}

inline void save_png(const GrayImage& img, const std::string& path) {
    detail::FileHandle fh(path, "wb");
    if (!fh.f) throw FileNotFoundError(path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        throw Error("png writer init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("png write failed: " + path);
    }
    png_init_io(png, fh.f);
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(&img.data[static_cast<std::size_t>(y) * img.width]);
    png_set_rows(png, info, rows.data());
    png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
    png_destroy_write_struct(&png, &info);
}

inline void save_png(const RgbImage& img, const std::string& path) {
    detail::FileHandle fh(path, "wb");
    if (!fh.f) throw FileNotFoundError(path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        throw Error("png writer init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("png write failed: " + path);
    }
    png_init_io(png, fh.f);
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(&img.data[static_cast<std::size_t>(y) * img.width * 3]);
    png_set_rows(png, info, rows.data());
    png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace docdiff
