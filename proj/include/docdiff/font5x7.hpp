#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <unordered_map>
#include <utility>

namespace docdiff {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;

/// One glyph as 35 row-major cells, 1 = ink.
using GlyphBitmap = std::array<std::uint8_t, kGlyphWidth * kGlyphHeight>;

namespace detail {

struct GlyphDef {
    char ch;
    const char* rows;  // 35 chars, '#' = ink
};

// clang-format off
inline constexpr GlyphDef kGlyphTable[] = {
    {'0', ".###."
          "#...#"
          "#..##"
          "#.#.#"
          "##..#"
          "#...#"
          ".###."},
    {'1', "..#.."
          ".##.."
          "..#.."
          "..#.."
          "..#.."
          "..#.."
          ".###."},
    {'2', ".###."
          "#...#"
          "....#"
          "...#."
          "..#.."
          ".#..."
          "#####"},
    {'3', ".###."
          "#...#"
          "....#"
          "..##."
          "....#"
          "#...#"
          ".###."},
    {'4', "...#."
          "..##."
          ".#.#."
          "#..#."
          "#####"
          "...#."
          "...#."},
    {'5', "#####"
          "#...."
          "####."
          "....#"
          "....#"
          "#...#"
          ".###."},
    {'6', "..##."
          ".#..."
          "#...."
          "####."
          "#...#"
          "#...#"
          ".###."},
    {'7', "#####"
          "....#"
          "...#."
          "..#.."
          "..#.."
          "..#.."
          "..#.."},
    {'8', ".###."
          "#...#"
          "#...#"
          ".###."
          "#...#"
          "#...#"
          ".###."},
    {'9', ".###."
          "#...#"
          "#...#"
          ".####"
          "....#"
          "...#."
          ".##.."},
    {'A', ".###."
          "#...#"
          "#...#"
          "#####"
          "#...#"
          "#...#"
          "#...#"},
    {'B', "####."
          "#...#"
          "#...#"
          "####."
          "#...#"
          "#...#"
          "####."},
    {'C', ".###."
          "#...#"
          "#...."
          "#...."
          "#...."
          "#...#"
          ".###."},
    {'D', "####."
          "#...#"
          "#...#"
          "#...#"
          "#...#"
          "#...#"
          "####."},
    {'E', "#####"
          "#...."
          "#...."
          "####."
          "#...."
          "#...."
          "#####"},
    {'F', "#####"
          "#...."
          "#...."
          "####."
          "#...."
          "#...."
          "#...."},
    {'G', ".###."
          "#...#"
          "#...."
          "#.###"
          "#...#"
          "#...#"
          ".###."},
    {'H', "#...#"
          "#...#"
          "#...#"
          "#####"
          "#...#"
          "#...#"
          "#...#"},
    {'I', ".###."
          "..#.."
          "..#.."
          "..#.."
          "..#.."
          "..#.."
          ".###."},
    {'J', "..###"
          "...#."
          "...#."
          "...#."
          "...#."
          "#..#."
          ".##.."},
    {'K', "#...#"
          "#..#."
          "#.#.."
          "##..."
          "#.#.."
          "#..#."
          "#...#"},
    {'L', "#...."
          "#...."
          "#...."
          "#...."
          "#...."
          "#...."
          "#####"},
    {'M', "#...#"
          "##.##"
          "#.#.#"
          "#.#.#"
          "#...#"
          "#...#"
          "#...#"},
    {'N', "#...#"
          "##..#"
          "#.#.#"
          "#..##"
          "#...#"
          "#...#"
          "#...#"},
    {'O', ".###."
          "#...#"
          "#...#"
          "#...#"
          "#...#"
          "#...#"
          ".###."},
    {'P', "####."
          "#...#"
          "#...#"
          "####."
          "#...."
          "#...."
          "#...."},
    {'Q', ".###."
          "#...#"
          "#...#"
          "#...#"
          "#.#.#"
          "#..#."
          ".##.#"},
    {'R', "####."
          "#...#"
          "#...#"
          "####."
          "#.#.."
          "#..#."
          "#...#"},
    {'S', ".####"
          "#...."
          "#...."
          ".###."
          "....#"
          "....#"
          "####."},
    {'T', "#####"
          "..#.."
          "..#.."
          "..#.."
          "..#.."
          "..#.."
          "..#.."},
    {'U', "#...#"
          "#...#"
          "#...#"
          "#...#"
          "#...#"
          "#...#"
          ".###."},
    {'V', "#...#"
          "#...#"
          "#...#"
          "#...#"
          "#...#"
          ".#.#."
          "..#.."},
    {'W', "#...#"
          "#...#"
          "#...#"
          "#.#.#"
          "#.#.#"
          "##.##"
          "#...#"},
    {'X', "#...#"
          "#...#"
          ".#.#."
          "..#.."
          ".#.#."
          "#...#"
          "#...#"},
    {'Y', "#...#"
          "#...#"
          ".#.#."
          "..#.."
          "..#.."
          "..#.."
          "..#.."},
    {'Z', "#####"
          "....#"
          "...#."
          "..#.."
          ".#..."
          "#...."
          "#####"},
    {'a', "....."
          "....."
          ".###."
          "....#"
          ".####"
          "#...#"
          ".####"},
    {'b', "#...."
          "#...."
          "####."
          "#...#"
          "#...#"
          "#...#"
          "####."},
    {'c', "....."
          "....."
          ".###."
          "#...."
          "#...."
          "#...#"
          ".###."},
    {'d', "....#"
          "....#"
          ".####"
          "#...#"
          "#...#"
          "#...#"
          ".####"},
    {'e', "....."
          "....."
          ".###."
          "#...#"
          "#####"
          "#...."
          ".###."},
    {'f', "..##."
          ".#..#"
          ".#..."
          "###.."
          ".#..."
          ".#..."
          ".#..."},
    {'g', "....."
          ".####"
          "#...#"
          "#...#"
          ".####"
          "....#"
          ".###."},
    {'h', "#...."
          "#...."
          "####."
          "#...#"
          "#...#"
          "#...#"
          "#...#"},
    {'i', "..#.."
          "....."
          ".##.."
          "..#.."
          "..#.."
          "..#.."
          ".###."},
    {'j', "...#."
          "....."
          "..##."
          "...#."
          "...#."
          "#..#."
          ".##.."},
    {'k', "#...."
          "#...."
          "#..#."
          "#.#.."
          "##..."
          "#.#.."
          "#..#."},
    {'l', ".##.."
          "..#.."
          "..#.."
          "..#.."
          "..#.."
          "..#.."
          ".###."},
    {'m', "....."
          "....."
          "##.#."
          "#.#.#"
          "#.#.#"
          "#.#.#"
          "#.#.#"},
    {'n', "....."
          "....."
          "####."
          "#...#"
          "#...#"
          "#...#"
          "#...#"},
    {'o', "....."
          "....."
          ".###."
          "#...#"
          "#...#"
          "#...#"
          ".###."},
    {'p', "....."
          "####."
          "#...#"
          "#...#"
          "####."
          "#...."
          "#...."},
    {'q', "....."
          ".####"
          "#...#"
          "#...#"
          ".####"
          "....#"
          "....#"},
    {'r', "....."
          "....."
          "#.##."
          "##..#"
          "#...."
          "#...."
          "#...."},
    {'s', "....."
          "....."
          ".####"
          "#...."
          ".###."
          "....#"
          "####."},
    {'t', ".#..."
          ".#..."
          "###.."
          ".#..."
          ".#..."
          ".#..#"
          "..##."},
    {'u', "....."
          "....."
          "#...#"
          "#...#"
          "#...#"
          "#..##"
          ".##.#"},
    {'v', "....."
          "....."
          "#...#"
          "#...#"
          "#...#"
          ".#.#."
          "..#.."},
    {'w', "....."
          "....."
          "#...#"
          "#...#"
          "#.#.#"
          "#.#.#"
          ".#.#."},
    {'x', "....."
          "....."
          "#...#"
          ".#.#."
          "..#.."
          ".#.#."
          "#...#"},
    {'y', "....."
          "#...#"
          "#...#"
          "#...#"
          ".####"
          "....#"
          ".###."},
    {'z', "....."
          "....."
          "#####"
          "...#."
          "..#.."
          ".#..."
          "#####"},
    {'-', "....."
          "....."
          "....."
          "#####"
          "....."
          "....."
          "....."},
    {'.', "....."
          "....."
          "....."
          "....."
          "....."
          ".##.."
          ".##.."},
    {',', "....."
          "....."
          "....."
          "....."
          ".##.."
          "..#.."
          ".#..."},
    {'/', "....#"
          "....#"
          "...#."
          "..#.."
          ".#..."
          "#...."
          "#...."},
    {'\'', ".##.."
           "..#.."
           ".#..."
           "....."
           "....."
           "....."
           "....."},
    {'"', ".#.#."
          ".#.#."
          "....."
          "....."
          "....."
          "....."
          "....."},
    {'(', "...#."
          "..#.."
          ".#..."
          ".#..."
          ".#..."
          "..#.."
          "...#."},
    {')', ".#..."
          "..#.."
          "...#."
          "...#."
          "...#."
          "..#.."
          ".#..."},
    {'%', "##..#"
          "##..#"
          "...#."
          "..#.."
          ".#..."
          "#..##"
          "#..##"},
    {'&', ".##.."
          "#..#."
          "#.#.."
          ".#..."
          "#.#.#"
          "#..#."
          ".##.#"},
    {'!', "..#.."
          "..#.."
          "..#.."
          "..#.."
          "..#.."
          "....."
          "..#.."},
    {'?', ".###."
          "#...#"
          "....#"
          "...#."
          "..#.."
          "....."
          "..#.."},
    {'=', "....."
          "....."
          "#####"
          "....."
          "#####"
          "....."
          "....."},
    {'+', "....."
          "..#.."
          "..#.."
          "#####"
          "..#.."
          "..#.."
          "....."},
    {':', "....."
          ".##.."
          ".##.."
          "....."
          ".##.."
          ".##.."
          "....."},
    {';', "....."
          ".##.."
          ".##.."
          "....."
          ".##.."
          "..#.."
          ".#..."},
    {'_', "....."
          "....."
          "....."
          "....."
          "....."
          "....."
          "#####"},
    {'|', "..#.."
          "..#.."
          "..#.."
          "..#.."
          "..#.."
          "..#.."
          "..#.."},
    {'*', "....."
          "#.#.#"
          ".###."
          "#####"
          ".###."
          "#.#.#"
          "....."},
};
// clang-format on

inline constexpr const char* kFallbackGlyph =
    "#####"
    "#...#"
    "#...#"
    "#...#"
    "#...#"
    "#...#"
    "#####";

}  // namespace detail

/// Bitmap for one character; unknown characters render as a filled frame.
inline const GlyphBitmap& glyph_bitmap(char c) {
    static const std::unordered_map<char, GlyphBitmap> table = [] {
        std::unordered_map<char, GlyphBitmap> t;
        const auto decode = [](const char* rows) {
            GlyphBitmap g{};
            for (int i = 0; i < kGlyphWidth * kGlyphHeight; ++i) g[static_cast<std::size_t>(i)] = rows[i] == '#';
            return g;
        };
        for (const auto& def : detail::kGlyphTable) t.emplace(def.ch, decode(def.rows));
        t.emplace('\0', decode(detail::kFallbackGlyph));
        return t;
    }();
    const auto it = table.find(c);
    return it != table.end() ? it->second : table.at('\0');
}

/// Number of cells in which two glyphs differ; used to keep substituted
/// characters visually distinct.
inline int glyph_difference(char a, char b) {
    const auto& ga = glyph_bitmap(a);
    const auto& gb = glyph_bitmap(b);
    int n = 0;
    for (std::size_t i = 0; i < ga.size(); ++i) n += ga[i] != gb[i];
    return n;
}

namespace detail {

inline GlyphBitmap dilate_glyph(const GlyphBitmap& g) {
    GlyphBitmap out{};
    for (int y = 0; y < kGlyphHeight; ++y)
        for (int x = 0; x < kGlyphWidth; ++x) {
            bool on = false;
            for (int dy = -1; dy <= 1 && !on; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = x + dx, yy = y + dy;
                    if (xx < 0 || xx >= kGlyphWidth || yy < 0 || yy >= kGlyphHeight) continue;
                    if (g[static_cast<std::size_t>(yy) * kGlyphWidth + xx]) {
                        on = true;
                        break;
                    }
                }
            out[static_cast<std::size_t>(y) * kGlyphWidth + x] = on;
        }
    return out;
}

}  // namespace detail

/// Inclusive column range occupied by a glyph's ink.
inline std::pair<int, int> glyph_col_span(char c) {
    const auto& g = glyph_bitmap(c);
    int lo = kGlyphWidth, hi = -1;
    for (int y = 0; y < kGlyphHeight; ++y)
        for (int x = 0; x < kGlyphWidth; ++x)
            if (g[static_cast<std::size_t>(y) * kGlyphWidth + x]) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
    if (hi < 0) return {0, kGlyphWidth - 1};
    return {lo, hi};
}

/// Inclusive row range occupied by a glyph's ink.
inline std::pair<int, int> glyph_row_span(char c) {
    const auto& g = glyph_bitmap(c);
    int lo = kGlyphHeight, hi = -1;
    for (int y = 0; y < kGlyphHeight; ++y)
        for (int x = 0; x < kGlyphWidth; ++x)
            if (g[static_cast<std::size_t>(y) * kGlyphWidth + x]) {
                lo = std::min(lo, y);
                hi = std::max(hi, y);
            }
    if (hi < 0) return {0, kGlyphHeight - 1};
    return {lo, hi};
}

/// Ink cells of each glyph not covered by the unit dilation of the other.
/// This is what survives a tolerance-based pixel comparison, so substituted
/// characters are required to score highly here.
inline int glyph_residual(char a, char b) {
    const auto& ga = glyph_bitmap(a);
    const auto& gb = glyph_bitmap(b);
    const GlyphBitmap da = detail::dilate_glyph(ga);
    const GlyphBitmap db = detail::dilate_glyph(gb);
    int n = 0;
    for (std::size_t i = 0; i < ga.size(); ++i) {
        n += ga[i] && !db[i];
        n += gb[i] && !da[i];
    }
    return n;
}

}  // namespace docdiff
