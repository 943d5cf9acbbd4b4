#include <catch2/catch_amalgamated.hpp>

#include "docdiff/segment.hpp"
#include "docdiff/synth.hpp"
#include "oracles.hpp"

using namespace docdiff;

namespace {

/// Mask with horizontal bands of the given heights separated by gaps.
BinaryImage bands_fixture(const std::vector<std::pair<int, int>>& band_gap, int width = 60) {
    int height = 4;
    for (const auto& [h, g] : band_gap) height += h + g;
    BinaryImage mask(width, height);
    int y = 2;
    for (const auto& [h, g] : band_gap) {
        for (int yy = y; yy < y + h; ++yy)
            for (int x = 4; x < width - 4; ++x) mask.at(x, yy) = 1;
        y += h + g;
    }
    return mask;
}

BinaryImage blob_pair(int gap, int blob_w = 12, int h = 10) {
    BinaryImage mask(blob_w * 2 + gap + 8, h + 4);
    for (int y = 2; y < 2 + h; ++y) {
        for (int x = 0; x < blob_w; ++x) {
            mask.at(4 + x, y) = 1;
            mask.at(4 + blob_w + gap + x, y) = 1;
        }
    }
    return mask;
}

}  // namespace

TEST_CASE("estimate_char_metrics", "[segment]") {
    SECTION("three stripes of height 10 with gaps of 6") {
        const BinaryImage mask = bands_fixture({{10, 6}, {10, 6}, {10, 0}});
        const CharMetrics m = estimate_char_metrics(mask);
        REQUIRE(m.char_height == 10);
        REQUIRE(m.line_gap == 6);
        REQUIRE(m.space_width == 3);  // round(0.3 * 10)
    }
    SECTION("single stripe falls back to char height for the gap") {
        const BinaryImage mask = bands_fixture({{5, 0}});
        const CharMetrics m = estimate_char_metrics(mask);
        REQUIRE(m.char_height == 5);
        REQUIRE(m.line_gap == 5);
    }
    SECTION("empty mask throws") {
        const BinaryImage mask(8, 8);
        REQUIRE_THROWS_AS(estimate_char_metrics(mask), BlankImageError);
    }
}

TEST_CASE("segment_lines", "[segment]") {
    SECTION("three stripes give three tight boxes") {
        const BinaryImage mask = bands_fixture({{10, 6}, {10, 6}, {10, 0}});
        const CharMetrics m = estimate_char_metrics(mask);
        const auto lines = segment_lines(mask, m);
        REQUIRE(lines.size() == 3);
        REQUIRE(lines[0] == Box{4, 2, 52, 10});
        REQUIRE(lines[1].y == 18);
        REQUIRE(lines[2].y == 34);
    }
    SECTION("blank mask gives no lines") {
        const BinaryImage mask(10, 10);
        REQUIRE(segment_lines(mask, CharMetrics{10, 6, 3}).empty());
    }
    SECTION("a one-pixel split below the merge threshold is bridged") {
        const BinaryImage mask = bands_fixture({{5, 1}, {5, 0}});
        const auto lines = segment_lines(mask, CharMetrics{10, 6, 3});
        REQUIRE(lines.size() == 1);
        REQUIRE(lines[0].h == 11);
    }
    SECTION("output is invariant under background padding") {
        const BinaryImage mask = bands_fixture({{10, 6}, {10, 0}});
        const CharMetrics m = estimate_char_metrics(mask);
        BinaryImage padded(mask.width + 10, mask.height + 10);
        for (int y = 0; y < mask.height; ++y)
            for (int x = 0; x < mask.width; ++x) padded.at(x + 5, y + 5) = mask.at(x, y);
        const auto lines = segment_lines(mask, m);
        const auto lines_p = segment_lines(padded, m);
        REQUIRE(lines.size() == lines_p.size());
        for (std::size_t i = 0; i < lines.size(); ++i) {
            REQUIRE(lines_p[i].x == lines[i].x + 5);
            REQUIRE(lines_p[i].y == lines[i].y + 5);
            REQUIRE(lines_p[i].w == lines[i].w);
            REQUIRE(lines_p[i].h == lines[i].h);
        }
    }
}

TEST_CASE("segment_words", "[segment]") {
    const CharMetrics metrics{10, 6, 4};  // closing kernel width 3
    SECTION("two blobs separated by twice the space width split") {
        const BinaryImage mask = blob_pair(2 * metrics.space_width);
        const auto lines = segment_lines(mask, metrics);
        REQUIRE(lines.size() == 1);
        const auto words = segment_words(mask, lines[0], metrics);
        REQUIRE(words.size() == 2);
        REQUIRE(words[0].x < words[1].x);
    }
    SECTION("a one-pixel gap is closed") {
        const BinaryImage mask = blob_pair(1);
        const auto lines = segment_lines(mask, metrics);
        const auto words = segment_words(mask, lines[0], metrics);
        REQUIRE(words.size() == 1);
    }
    SECTION("blank strip gives no words") {
        const BinaryImage mask(30, 10);
        const auto words = segment_words(mask, Box{0, 0, 30, 10}, metrics);
        REQUIRE(words.empty());
    }
    SECTION("word boxes are disjoint in x and keep all the ink") {
        const BinaryImage mask = blob_pair(12);
        const auto lines = segment_lines(mask, metrics);
        const auto words = segment_words(mask, lines[0], metrics);
        REQUIRE(words.size() == 2);
        REQUIRE(words[0].right() <= words[1].x);
        std::int64_t covered = 0;
        for (const auto& w : words) {
            for (int y = w.y; y < w.bottom(); ++y)
                for (int x = w.x; x < w.right(); ++x) covered += mask.at(x, y);
        }
        REQUIRE(covered == mask.foreground_count());
    }
    SECTION("line box outside the mask is rejected") {
        const BinaryImage mask(10, 10);
        REQUIRE_THROWS_AS(segment_words(mask, Box{5, 5, 10, 10}, metrics), std::invalid_argument);
    }
}

TEST_CASE("layout_page matches the generator's geometry", "[segment]") {
    SynthSpec spec;
    spec.seed = 5;
    spec.lines = 2;
    spec.words_per_line_min = 3;
    spec.words_per_line_max = 3;
    const SynthPair pair = generate_pair(spec);
    const DocumentText truth = parse_hocr(pair.ref_hocr);
    const PageLayout layout = layout_page(pair.ref_img);

    REQUIRE(layout.lines.size() == truth.lines.size());
    for (std::size_t li = 0; li < layout.lines.size(); ++li) {
        REQUIRE(layout.lines[li].words.size() == truth.lines[li].words.size());
        for (std::size_t wi = 0; wi < layout.lines[li].words.size(); ++wi) {
            const Box got = layout.lines[li].words[wi];
            const Box want = truth.lines[li].words[wi].box;
            REQUIRE(std::abs(got.x - want.x) <= 2);
            REQUIRE(std::abs(got.y - want.y) <= 2);
            REQUIRE(std::abs(got.right() - want.right()) <= 2);
            REQUIRE(std::abs(got.bottom() - want.bottom()) <= 2);
        }
    }
}

TEST_CASE("layout_page edge cases", "[segment]") {
    SECTION("blank page throws") {
        const GrayImage img(40, 40, 255);
        REQUIRE_THROWS_AS(layout_page(img), BlankImageError);
    }
    SECTION("single word page gives one line with one word") {
        GrayImage img(60, 30, 255);
        for (int y = 10; y < 20; ++y)
            for (int x = 15; x < 40; ++x) img.at(x, y) = 0;
        const PageLayout layout = layout_page(img);
        REQUIRE(layout.lines.size() == 1);
        REQUIRE(layout.lines[0].words.size() == 1);
        REQUIRE(layout.lines[0].words[0] == Box{15, 10, 25, 10});
    }
}
