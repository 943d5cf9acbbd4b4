#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "docdiff/error.hpp"
#include "docdiff/image_io.hpp"
#include "docdiff/ocr.hpp"
#include "docdiff/pixmatch.hpp"
#include "docdiff/raster.hpp"
#include "docdiff/textmatch.hpp"

namespace docdiff {

enum class ModificationKind { WordChanged, WordInserted, WordDeleted, LineInserted, LineDeleted };

inline std::string to_string(ModificationKind k) {
    switch (k) {
        case ModificationKind::WordChanged: return "word_changed";
        case ModificationKind::WordInserted: return "word_inserted";
        case ModificationKind::WordDeleted: return "word_deleted";
        case ModificationKind::LineInserted: return "line_inserted";
        case ModificationKind::LineDeleted: return "line_deleted";
    }
    return "word_changed";
}

inline ModificationKind modification_kind_from_string(const std::string& s) {
    if (s == "word_changed") return ModificationKind::WordChanged;
    if (s == "word_inserted") return ModificationKind::WordInserted;
    if (s == "word_deleted") return ModificationKind::WordDeleted;
    if (s == "line_inserted") return ModificationKind::LineInserted;
    if (s == "line_deleted") return ModificationKind::LineDeleted;
    throw std::invalid_argument("unknown modification kind: " + s);
}

/// One reported difference between the two documents.
struct Modification {
    ModificationKind kind = ModificationKind::WordChanged;
    std::optional<Box> ref_box;
    std::optional<Box> test_box;
    std::optional<std::string> ref_kernel;
    std::optional<std::string> test_kernel;
    int line_index = 0;
    std::optional<int> word_index;
    std::optional<double> coeff_ocr;
    std::optional<double> coeff_pix;
};

/// A pair of words established as the same document object.
struct CoordinatedPair {
    TextPoint ref;
    TextPoint test;
    double coeff_ocr = 1.0;
    std::optional<double> coeff_pix;
    int ref_word_count = 1;   // >1 when split fragments were merged
    int test_word_count = 1;
};

enum class CompareMode { OcrOnly, Combined };

inline std::string to_string(CompareMode m) {
    return m == CompareMode::OcrOnly ? "ocr_only" : "combined";
}

inline CompareMode compare_mode_from_string(std::string s) {
    std::replace(s.begin(), s.end(), '-', '_');
    if (s == "ocr_only") return CompareMode::OcrOnly;
    if (s == "combined") return CompareMode::Combined;
    throw std::invalid_argument("mode must be 'ocr-only' or 'combined'");
}

struct DiffConfig {
    MatchParams match;
    PixParams pix;
    double deskew_max_angle = 5.0;
    double deskew_step = 0.1;
    double contrast_low = 0.01;
    double contrast_high = 0.99;
    OcrEngineConfig ocr;
    CompareMode mode = CompareMode::Combined;
    bool pix_binary = false;  // binarize word crops before pixel comparison
};

inline void validate(const DiffConfig& cfg) {
    validate(cfg.match);
    validate(cfg.pix.range);
    if (cfg.pix.word_pixel_coeff < 0.0)
        throw std::invalid_argument("word_pixel_coeff must be >= 0");
    if (!(cfg.contrast_low >= 0.0 && cfg.contrast_low < cfg.contrast_high && cfg.contrast_high <= 1.0))
        throw std::invalid_argument("contrast percentiles must satisfy 0 <= low < high <= 1");
    if (!(cfg.deskew_step > 0.0 && cfg.deskew_step <= cfg.deskew_max_angle && cfg.deskew_max_angle <= 15.0))
        throw std::invalid_argument("deskew grid must satisfy 0 < step <= max_angle <= 15");
    validate(cfg.ocr);
}

struct ComparisonReport {
    std::vector<Modification> modifications;
    std::vector<CoordinatedPair> coordinated;
    int coordinated_count = 0;
    DiffConfig params;
    std::pair<int, int> ref_page{0, 0};
    std::pair<int, int> test_page{0, 0};
};

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

using json = nlohmann::ordered_json;

inline json to_json(const DiffConfig& cfg) {
    json j;
    j["mode"] = to_string(cfg.mode);
    j["word_ocr_simil"] = cfg.match.word_ocr_simil;
    j["line_simil"] = cfg.match.line_simil;
    j["word_pixel_coeff"] = cfg.pix.word_pixel_coeff;
    j["shift_range"] = {cfg.pix.range.x_min, cfg.pix.range.x_max, cfg.pix.range.y_min,
                        cfg.pix.range.y_max};
    j["alpha_range"] = {cfg.pix.range.alpha_min, cfg.pix.range.alpha_max};
    j["alpha_step"] = cfg.pix.range.alpha_step;
    j["pix_binary"] = cfg.pix_binary;
    j["contrast_percentiles"] = {cfg.contrast_low, cfg.contrast_high};
    j["deskew_max_angle"] = cfg.deskew_max_angle;
    j["deskew_step"] = cfg.deskew_step;
    j["ocr"] = {{"executable", cfg.ocr.executable},
                {"language", cfg.ocr.language},
                {"extra_args", cfg.ocr.extra_args},
                {"timeout", cfg.ocr.timeout}};
    return j;
}

/// Apply the fields present in `j` onto `cfg`; absent fields keep their values.
inline void config_from_json(const json& j, DiffConfig& cfg) {
    if (j.contains("mode")) cfg.mode = compare_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("word_ocr_simil")) cfg.match.word_ocr_simil = j.at("word_ocr_simil").get<double>();
    if (j.contains("line_simil")) cfg.match.line_simil = j.at("line_simil").get<double>();
    if (j.contains("word_pixel_coeff")) cfg.pix.word_pixel_coeff = j.at("word_pixel_coeff").get<double>();
    if (j.contains("shift_range")) {
        const auto& r = j.at("shift_range");
        if (!r.is_array() || r.size() != 4)
            throw std::invalid_argument("shift_range must be [x_min,x_max,y_min,y_max]");
        cfg.pix.range.x_min = r[0].get<int>();
        cfg.pix.range.x_max = r[1].get<int>();
        cfg.pix.range.y_min = r[2].get<int>();
        cfg.pix.range.y_max = r[3].get<int>();
    }
    if (j.contains("alpha_range")) {
        const auto& r = j.at("alpha_range");
        if (!r.is_array() || r.size() != 2) throw std::invalid_argument("alpha_range must be [min,max]");
        cfg.pix.range.alpha_min = r[0].get<double>();
        cfg.pix.range.alpha_max = r[1].get<double>();
    }
    if (j.contains("alpha_step")) cfg.pix.range.alpha_step = j.at("alpha_step").get<double>();
    if (j.contains("pix_binary")) cfg.pix_binary = j.at("pix_binary").get<bool>();
    if (j.contains("contrast_percentiles")) {
        const auto& r = j.at("contrast_percentiles");
        if (!r.is_array() || r.size() != 2)
            throw std::invalid_argument("contrast_percentiles must be [low,high]");
        cfg.contrast_low = r[0].get<double>();
        cfg.contrast_high = r[1].get<double>();
    }
    if (j.contains("deskew_max_angle")) cfg.deskew_max_angle = j.at("deskew_max_angle").get<double>();
    if (j.contains("deskew_step")) cfg.deskew_step = j.at("deskew_step").get<double>();
    if (j.contains("ocr")) {
        const auto& o = j.at("ocr");
        if (o.contains("executable")) cfg.ocr.executable = o.at("executable").get<std::string>();
        if (o.contains("language")) cfg.ocr.language = o.at("language").get<std::string>();
        if (o.contains("extra_args")) cfg.ocr.extra_args = o.at("extra_args").get<std::vector<std::string>>();
        if (o.contains("timeout")) cfg.ocr.timeout = o.at("timeout").get<double>();
    }
}

namespace detail {

inline json box_to_json(const std::optional<Box>& b) {
    if (!b) return nullptr;
    return json::array({b->x, b->y, b->w, b->h});
}

inline std::optional<Box> box_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    if (!j.is_array() || j.size() != 4) throw std::invalid_argument("box must be [x,y,w,h]");
    return Box{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

template <typename T>
json opt_to_json(const std::optional<T>& v) {
    if (!v) return nullptr;
    return *v;
}

}  // namespace detail

inline std::string report_to_json(const ComparisonReport& report) {
    json j;
    j["params"] = to_json(report.params);
    j["pages"] = {{"ref", {report.ref_page.first, report.ref_page.second}},
                  {"test", {report.test_page.first, report.test_page.second}}};
    j["modifications"] = json::array();
    for (const auto& m : report.modifications) {
        json e;
        e["kind"] = to_string(m.kind);
        e["ref_box"] = detail::box_to_json(m.ref_box);
        e["test_box"] = detail::box_to_json(m.test_box);
        e["ref_kernel"] = detail::opt_to_json(m.ref_kernel);
        e["test_kernel"] = detail::opt_to_json(m.test_kernel);
        e["line"] = m.line_index;
        e["word"] = detail::opt_to_json(m.word_index);
        e["coeff_ocr"] = detail::opt_to_json(m.coeff_ocr);
        e["coeff_pix"] = detail::opt_to_json(m.coeff_pix);
        j["modifications"].push_back(std::move(e));
    }
    j["coordinated_count"] = report.coordinated_count;
    return j.dump(2) + "\n";
}

inline ComparisonReport report_from_json(const std::string& text) {
    const json j = json::parse(text);
    ComparisonReport report;
    config_from_json(j.at("params"), report.params);
    report.ref_page = {j.at("pages").at("ref")[0].get<int>(), j.at("pages").at("ref")[1].get<int>()};
    report.test_page = {j.at("pages").at("test")[0].get<int>(), j.at("pages").at("test")[1].get<int>()};
    for (const auto& e : j.at("modifications")) {
        Modification m;
        m.kind = modification_kind_from_string(e.at("kind").get<std::string>());
        m.ref_box = detail::box_from_json(e.at("ref_box"));
        m.test_box = detail::box_from_json(e.at("test_box"));
        if (!e.at("ref_kernel").is_null()) m.ref_kernel = e.at("ref_kernel").get<std::string>();
        if (!e.at("test_kernel").is_null()) m.test_kernel = e.at("test_kernel").get<std::string>();
        m.line_index = e.at("line").get<int>();
        if (!e.at("word").is_null()) m.word_index = e.at("word").get<int>();
        if (!e.at("coeff_ocr").is_null()) m.coeff_ocr = e.at("coeff_ocr").get<double>();
        if (!e.at("coeff_pix").is_null()) m.coeff_pix = e.at("coeff_pix").get<double>();
        report.modifications.push_back(std::move(m));
    }
    report.coordinated_count = j.at("coordinated_count").get<int>();
    return report;
}

// ---------------------------------------------------------------------------
// Split/merge repair
// ---------------------------------------------------------------------------

namespace detail {

inline std::string concat_kernels(const std::vector<TextPoint>& words, const std::vector<int>& indices) {
    std::string out;
    for (int i : indices) out += words[static_cast<std::size_t>(i)].kernel;
    return out;
}

inline Box span_box(const std::vector<TextPoint>& words, const std::vector<int>& indices) {
    Box b{};
    for (int i : indices) b = union_box(b, words[static_cast<std::size_t>(i)].box);
    return b;
}

inline bool half_overlap_x(const Box& a, const Box& b) {
    const int overlap = x_overlap(a, b);
    return overlap * 2 >= std::min(a.w, b.w);
}

inline bool contains_index(const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

/// Merge the unmatched fragments on `frag side` into their neighbours when
/// the concatenated kernel coordinates with a counterpart on the other side.
inline void repair_one_side(const std::vector<TextPoint>& counter_words,
                            const std::vector<TextPoint>& frag_words, bool frag_is_test,
                            WordAlignment& a, const MatchParams& p) {
    auto& frag_only = frag_is_test ? a.test_only : a.ref_only;
    auto& counter_only = frag_is_test ? a.ref_only : a.test_only;
    const auto frag_span = [&](AlignedPair& pr) -> std::vector<int>& {
        return frag_is_test ? pr.test_indices : pr.ref_indices;
    };
    const auto counter_span = [&](AlignedPair& pr) -> std::vector<int>& {
        return frag_is_test ? pr.ref_indices : pr.test_indices;
    };

    const std::vector<int> snapshot = frag_only;
    for (int u : snapshot) {
        if (!contains_index(frag_only, u)) continue;  // consumed by an earlier merge
        bool merged = false;
        for (int v : {u - 1, u + 1}) {
            if (v < 0 || v >= static_cast<int>(frag_words.size())) continue;

            // fragment next to a matched word: try absorbing it into the pair
            for (auto& pr : a.pairs) {
                auto& span = frag_span(pr);
                if (span.empty() || (v != span.front() && v != span.back())) continue;
                std::vector<int> new_span = span;
                new_span.push_back(u);
                std::sort(new_span.begin(), new_span.end());
                const double c = coeff_ocr(concat_kernels(frag_words, new_span),
                                           concat_kernels(counter_words, counter_span(pr)));
                // absorbing a genuinely inserted word would degrade the pair,
                // rejoining a split fragment improves it
                if (c > p.word_ocr_simil && c > pr.coeff &&
                    half_overlap_x(span_box(frag_words, new_span),
                                   span_box(counter_words, counter_span(pr)))) {
                    span = std::move(new_span);
                    pr.coeff = c;
                    frag_only.erase(std::remove(frag_only.begin(), frag_only.end(), u), frag_only.end());
                    merged = true;
                }
                break;
            }
            if (merged) break;

            // two adjacent unmatched fragments against an unmatched counterpart
            if (!contains_index(frag_only, v)) continue;
            std::vector<int> pair_span = {std::min(u, v), std::max(u, v)};
            const std::string concat = concat_kernels(frag_words, pair_span);
            const Box ubox = span_box(frag_words, pair_span);
            const auto slot = [&](int index, bool frag_side) {
                int n = 0;
                for (auto& pr : a.pairs) {
                    auto& span = frag_side ? frag_span(pr) : counter_span(pr);
                    if (!span.empty() && span.back() < index) ++n;
                }
                return n;
            };
            for (int w : counter_only) {
                // only counterparts in the same inter-anchor gap keep the
                // alignment non-crossing
                if (slot(w, false) != slot(pair_span.front(), true)) continue;
                const double c = coeff_ocr(counter_words[static_cast<std::size_t>(w)].kernel, concat);
                if (c <= p.word_ocr_simil ||
                    !half_overlap_x(ubox, counter_words[static_cast<std::size_t>(w)].box))
                    continue;
                AlignedPair pr;
                frag_span(pr) = pair_span;
                counter_span(pr) = {w};
                pr.coeff = c;
                a.pairs.push_back(std::move(pr));
                counter_only.erase(std::remove(counter_only.begin(), counter_only.end(), w),
                                   counter_only.end());
                frag_only.erase(std::remove(frag_only.begin(), frag_only.end(), u), frag_only.end());
                frag_only.erase(std::remove(frag_only.begin(), frag_only.end(), v), frag_only.end());
                merged = true;
                break;
            }
            if (merged) break;
        }
    }
    std::sort(a.pairs.begin(), a.pairs.end(), [](const AlignedPair& x, const AlignedPair& y) {
        return x.ref_indices.front() < y.ref_indices.front();
    });
}

}  // namespace detail

/// Rejoin words fragmented by recognition or segmentation: an unmatched word
/// adjacent to a matched or unmatched neighbour is merged when the
/// concatenated kernel coordinates with a counterpart whose box overlaps.
inline WordAlignment repair_split_merge(const std::vector<TextPoint>& ref_line,
                                        const std::vector<TextPoint>& test_line,
                                        const WordAlignment& alignment, const MatchParams& p) {
    WordAlignment out = alignment;
    detail::repair_one_side(ref_line, test_line, /*frag_is_test=*/true, out, p);
    detail::repair_one_side(test_line, ref_line, /*frag_is_test=*/false, out, p);
    return out;
}

// ---------------------------------------------------------------------------
// Page comparison pipeline
// ---------------------------------------------------------------------------

/// One page of input for the comparison pipeline: the raw image plus,
/// optionally, ready-made hOCR markup that replaces the engine run.
struct PageInput {
    GrayImage image;
    std::optional<std::string> hocr_text;
};

namespace detail {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

inline DocumentText obtain_text(const GrayImage& preprocessed,
                                const std::optional<std::string>& hocr_text,
                                const OcrEngineConfig& ocr_cfg) {
    if (hocr_text) return parse_hocr(*hocr_text);
    namespace fs = std::filesystem;
    std::string tmpl = (fs::temp_directory_path() / "docdiff-page-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!::mkdtemp(buf.data())) throw Error("cannot create temp directory");
    const std::string dir(buf.data());
    struct Guard {
        std::string d;
        ~Guard() {
            std::error_code ec;
            fs::remove_all(d, ec);
        }
    } guard{dir};
    const std::string path = dir + "/page.png";
    save_png(preprocessed, path);
    return parse_hocr(run_ocr(path, ocr_cfg));
}

/// Pair up leftover words that occupy the same gap between matched anchors,
/// in reading order. Returns (ref index, test index) candidate pairs plus
/// the words left over on each side.
struct PositionalPairs {
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> ref_left;
    std::vector<int> test_left;
};

inline PositionalPairs pair_positionally(const WordAlignment& a) {
    PositionalPairs out;
    const auto slot_of = [&](int index, bool test_side) {
        int slot = 0;
        for (const auto& pr : a.pairs) {
            const auto& span = test_side ? pr.test_indices : pr.ref_indices;
            if (!span.empty() && span.back() < index) ++slot;
        }
        return slot;
    };
    // group unmatched words by the anchor gap they fall into
    std::vector<std::pair<int, int>> ref_slots, test_slots;  // (slot, index)
    for (int r : a.ref_only) ref_slots.emplace_back(slot_of(r, false), r);
    for (int t : a.test_only) test_slots.emplace_back(slot_of(t, true), t);

    std::size_t ti = 0;
    for (const auto& [slot, r] : ref_slots) {
        while (ti < test_slots.size() && test_slots[ti].first < slot) {
            out.test_left.push_back(test_slots[ti].second);
            ++ti;
        }
        if (ti < test_slots.size() && test_slots[ti].first == slot) {
            out.pairs.emplace_back(r, test_slots[ti].second);
            ++ti;
        } else {
            out.ref_left.push_back(r);
        }
    }
    for (; ti < test_slots.size(); ++ti) out.test_left.push_back(test_slots[ti].second);
    return out;
}

inline Box clamp_to_image(const Box& b, const GrayImage& img) {
    return intersect(b, Box{0, 0, img.width, img.height});
}

}  // namespace detail

/// Compare two preprocessed-or-raw page inputs end to end.
inline ComparisonReport compare_pages(const PageInput& ref_input, const PageInput& test_input,
                                      const DiffConfig& cfg) {
    validate(cfg);

    GrayImage ref_img = detail::stage("contrast", [&] {
        return auto_contrast(ref_input.image, cfg.contrast_low, cfg.contrast_high);
    });
    GrayImage test_img = detail::stage("contrast", [&] {
        return auto_contrast(test_input.image, cfg.contrast_low, cfg.contrast_high);
    });

    detail::stage("deskew", [&] {
        const auto ref_skew = estimate_skew(ref_img, cfg.deskew_max_angle, cfg.deskew_step);
        if (ref_skew.angle != 0.0) ref_img = rotate(ref_img, -ref_skew.angle);
        const auto test_skew = estimate_skew(test_img, cfg.deskew_max_angle, cfg.deskew_step);
        if (test_skew.angle != 0.0) test_img = rotate(test_img, -test_skew.angle);
        return 0;
    });

    const DocumentText ref_doc = detail::stage(
        "ocr", [&] { return detail::obtain_text(ref_img, ref_input.hocr_text, cfg.ocr); });
    const DocumentText test_doc = detail::stage(
        "ocr", [&] { return detail::obtain_text(test_img, test_input.hocr_text, cfg.ocr); });

    ComparisonReport report;
    report.params = cfg;
    report.ref_page = {ref_img.width, ref_img.height};
    report.test_page = {test_img.width, test_img.height};

    const int ref_bin = cfg.pix_binary ? otsu_threshold(ref_img) : -1;
    const int test_bin = cfg.pix_binary ? otsu_threshold(test_img) : -1;

    const LineAlignment lines = detail::stage("align", [&] { return align_lines(ref_doc, test_doc, cfg.match); });

    detail::stage("resolve", [&] {
        for (const auto& [ri, ti] : lines.pairs) {
            const auto& ref_words = ref_doc.lines[static_cast<std::size_t>(ri)].words;
            const auto& test_words = test_doc.lines[static_cast<std::size_t>(ti)].words;
            WordAlignment wa = align_words(ref_words, test_words, cfg.match);
            wa = repair_split_merge(ref_words, test_words, wa, cfg.match);

            for (const auto& pr : wa.pairs) {
                CoordinatedPair cp;
                cp.ref = pr.ref_indices.size() == 1
                             ? ref_words[static_cast<std::size_t>(pr.ref_indices[0])]
                             : TextPoint(
                                   [&] {
                                       std::string s;
                                       for (int i : pr.ref_indices) {
                                           if (!s.empty()) s += ' ';
                                           s += ref_words[static_cast<std::size_t>(i)].raw;
                                       }
                                       return s;
                                   }(),
                                   detail::span_box(ref_words, pr.ref_indices));
                cp.test = pr.test_indices.size() == 1
                              ? test_words[static_cast<std::size_t>(pr.test_indices[0])]
                              : TextPoint(
                                    [&] {
                                        std::string s;
                                        for (int i : pr.test_indices) {
                                            if (!s.empty()) s += ' ';
                                            s += test_words[static_cast<std::size_t>(i)].raw;
                                        }
                                        return s;
                                    }(),
                                    detail::span_box(test_words, pr.test_indices));
                cp.coeff_ocr = pr.coeff;
                cp.ref_word_count = static_cast<int>(pr.ref_indices.size());
                cp.test_word_count = static_cast<int>(pr.test_indices.size());
                report.coordinated.push_back(std::move(cp));
            }

            const auto positional = detail::pair_positionally(wa);
            for (const auto& [r, t] : positional.pairs) {
                const TextPoint& rw = ref_words[static_cast<std::size_t>(r)];
                const TextPoint& tw = test_words[static_cast<std::size_t>(t)];
                const double c_ocr = coeff_ocr(rw, tw);
                std::optional<double> c_pix;
                if (cfg.mode == CompareMode::Combined) {
                    const Box rb = detail::clamp_to_image(rw.box, ref_img);
                    const Box tb = detail::clamp_to_image(tw.box, test_img);
                    if (!rb.empty() && !tb.empty()) {
                        const WordRaster rm = crop_word(ref_img, rb, ref_bin);
                        const WordRaster tm = crop_word(test_img, tb, test_bin);
                        if (rm.ink_sum > 0 || tm.ink_sum > 0)
                            c_pix = coeff_pix(rm, tm, cfg.pix.range);
                    }
                }
                if (c_pix && *c_pix < cfg.pix.word_pixel_coeff) {
                    // visually identical: a recognition artifact, not a modification
                    CoordinatedPair cp;
                    cp.ref = rw;
                    cp.test = tw;
                    cp.coeff_ocr = c_ocr;
                    cp.coeff_pix = c_pix;
                    report.coordinated.push_back(std::move(cp));
                    continue;
                }
                Modification m;
                m.kind = ModificationKind::WordChanged;
                m.ref_box = rw.box;
                m.test_box = tw.box;
                m.ref_kernel = rw.kernel;
                m.test_kernel = tw.kernel;
                m.line_index = ti;
                m.word_index = t;
                m.coeff_ocr = c_ocr;
                m.coeff_pix = c_pix;
                report.modifications.push_back(std::move(m));
            }
            for (int r : positional.ref_left) {
                const TextPoint& rw = ref_words[static_cast<std::size_t>(r)];
                Modification m;
                m.kind = ModificationKind::WordDeleted;
                m.ref_box = rw.box;
                m.ref_kernel = rw.kernel;
                m.line_index = ri;
                m.word_index = r;
                report.modifications.push_back(std::move(m));
            }
            for (int t : positional.test_left) {
                const TextPoint& tw = test_words[static_cast<std::size_t>(t)];
                Modification m;
                m.kind = ModificationKind::WordInserted;
                m.test_box = tw.box;
                m.test_kernel = tw.kernel;
                m.line_index = ti;
                m.word_index = t;
                report.modifications.push_back(std::move(m));
            }
        }

        for (int ri : lines.ref_only) {
            const auto& words = ref_doc.lines[static_cast<std::size_t>(ri)].words;
            Box b{};
            for (const auto& w : words) b = union_box(b, w.box);
            Modification m;
            m.kind = ModificationKind::LineDeleted;
            m.ref_box = b;
            m.line_index = ri;
            report.modifications.push_back(std::move(m));
        }
        for (int ti : lines.test_only) {
            const auto& words = test_doc.lines[static_cast<std::size_t>(ti)].words;
            Box b{};
            for (const auto& w : words) b = union_box(b, w.box);
            Modification m;
            m.kind = ModificationKind::LineInserted;
            m.test_box = b;
            m.line_index = ti;
            report.modifications.push_back(std::move(m));
        }
        return 0;
    });

    report.coordinated_count = static_cast<int>(report.coordinated.size());
    return report;
}

/// Full pipeline from two image files. hOCR override files, when given,
/// substitute for the engine run.
inline ComparisonReport compare_documents(const std::string& ref_path, const std::string& test_path,
                                          const DiffConfig& cfg,
                                          const std::optional<std::string>& hocr_ref_path = std::nullopt,
                                          const std::optional<std::string>& hocr_test_path = std::nullopt) {
    PageInput ref_input;
    PageInput test_input;
    detail::stage("load", [&] {
        ref_input.image = load_image(ref_path);
        test_input.image = load_image(test_path);
        if (hocr_ref_path) ref_input.hocr_text = detail::read_text_file(*hocr_ref_path);
        if (hocr_test_path) test_input.hocr_text = detail::read_text_file(*hocr_test_path);
        return 0;
    });
    return compare_pages(ref_input, test_input, cfg);
}

// ---------------------------------------------------------------------------
// Annotation rendering
// ---------------------------------------------------------------------------

namespace detail {

inline void draw_rect(RgbImage& canvas, Box b, int offset_x, std::uint8_t r, std::uint8_t g,
                      std::uint8_t b_) {
    b.x += offset_x;
    const Box clip = intersect(b, Box{0, 0, canvas.width, canvas.height});
    if (clip.empty()) return;
    for (int t = 0; t < 2; ++t) {  // 2 px outline drawn inward
        const int x0 = b.x + t, x1 = b.right() - 1 - t;
        const int y0 = b.y + t, y1 = b.bottom() - 1 - t;
        if (x1 < x0 || y1 < y0) break;
        for (int x = std::max(0, x0); x <= std::min(canvas.width - 1, x1); ++x) {
            if (y0 >= 0 && y0 < canvas.height) canvas.set(x, y0, r, g, b_);
            if (y1 >= 0 && y1 < canvas.height) canvas.set(x, y1, r, g, b_);
        }
        for (int y = std::max(0, y0); y <= std::min(canvas.height - 1, y1); ++y) {
            if (x0 >= 0 && x0 < canvas.width) canvas.set(x0, y, r, g, b_);
            if (x1 >= 0 && x1 < canvas.width) canvas.set(x1, y, r, g, b_);
        }
    }
}

}  // namespace detail

/// Side-by-side overlay: reference page left, test page right. Blue boxes
/// mark coordinated words, red word-level modifications, magenta inserted
/// and deleted lines.
inline RgbImage render_annotation(const GrayImage& ref_img, const GrayImage& test_img,
                                  const ComparisonReport& report) {
    const int w = ref_img.width + test_img.width;
    const int h = std::max(ref_img.height, test_img.height);
    RgbImage canvas(w, h);
    for (int y = 0; y < ref_img.height; ++y)
        for (int x = 0; x < ref_img.width; ++x) {
            const auto v = ref_img.at(x, y);
            canvas.set(x, y, v, v, v);
        }
    for (int y = 0; y < test_img.height; ++y)
        for (int x = 0; x < test_img.width; ++x) {
            const auto v = test_img.at(x, y);
            canvas.set(ref_img.width + x, y, v, v, v);
        }

    for (const auto& cp : report.coordinated) {
        detail::draw_rect(canvas, cp.ref.box, 0, 0, 0, 255);
        detail::draw_rect(canvas, cp.test.box, ref_img.width, 0, 0, 255);
    }
    for (const auto& m : report.modifications) {
        const bool line_kind =
            m.kind == ModificationKind::LineInserted || m.kind == ModificationKind::LineDeleted;
        const std::uint8_t g = 0;
        const std::uint8_t r = 255;
        const std::uint8_t b = line_kind ? 255 : 0;
        if (m.ref_box) detail::draw_rect(canvas, *m.ref_box, 0, r, g, b);
        if (m.test_box) detail::draw_rect(canvas, *m.test_box, ref_img.width, r, g, b);
    }
    return canvas;
}

}  // namespace docdiff
