#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "docdiff/font5x7.hpp"
#include "docdiff/textmatch.hpp"
#include "docdiff/truth.hpp"

namespace docdiff {

enum class EditKind {
    SubstituteChars,
    ReplaceWord,
    InsertWord,
    DeleteWord,
    InsertLine,
    DeleteLine,
};

inline std::string to_string(EditKind k) {
    switch (k) {
        case EditKind::SubstituteChars: return "substitute_chars";
        case EditKind::ReplaceWord: return "replace_word";
        case EditKind::InsertWord: return "insert_word";
        case EditKind::DeleteWord: return "delete_word";
        case EditKind::InsertLine: return "insert_line";
        case EditKind::DeleteLine: return "delete_line";
    }
    return "substitute_chars";
}

inline EditKind edit_kind_from_string(const std::string& s) {
    if (s == "substitute_chars") return EditKind::SubstituteChars;
    if (s == "replace_word") return EditKind::ReplaceWord;
    if (s == "insert_word") return EditKind::InsertWord;
    if (s == "delete_word") return EditKind::DeleteWord;
    if (s == "insert_line") return EditKind::InsertLine;
    if (s == "delete_line") return EditKind::DeleteLine;
    throw std::invalid_argument("unknown edit kind: " + s);
}

struct EditSpec {
    EditKind kind = EditKind::SubstituteChars;
    int count = 1;
};

/// Recipe for one deterministic synthetic document pair.
struct SynthSpec {
    std::uint64_t seed = 1;
    int lines = 6;
    int words_per_line_min = 3;
    int words_per_line_max = 6;
    std::vector<EditSpec> edits;
    int jitter = 0;              // per-word test render offset, pixels
    double noise = 0.0;          // salt-and-pepper fraction on both pages
    double ocr_error_rate = 0.0; // per-character perturbation of the test hOCR
};

struct SynthPair {
    GrayImage ref_img;
    GrayImage test_img;
    std::string ref_hocr;
    std::string test_hocr;
    GroundTruth truth;
};

/// splitmix64 step; mixes a base seed with a stream index into a fresh seed.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace synth_detail {

constexpr int kScale = 3;
constexpr int kCharGap = kScale;          // one font cell between glyphs
constexpr int kWordGap = 3 * kScale;      // three font cells between words
constexpr int kCharHeight = kGlyphHeight * kScale;
constexpr int kLinePitch = kCharHeight + 12;
constexpr int kMargin = 24;

/// Deterministic RNG wrapper; all draws go through explicit helpers.
struct Rng {
    std::mt19937 gen;
    explicit Rng(std::uint64_t seed) : gen(static_cast<std::uint32_t>(seed ^ (seed >> 32))) {}
    std::uint32_t next() { return gen(); }
    int uniform(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(next() % static_cast<std::uint32_t>(hi - lo + 1));
    }
    bool chance(double p) { return next() < p * 4294967296.0; }
    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
    }
};

inline const std::vector<std::string>& vocabulary() {
    static const std::vector<std::string> words = {
        "salaire",  "brut",    "net",     "total",   "montant",   "prime",   "conges",
        "retenue",  "taux",    "base",    "gain",    "impot",     "cotisation", "date",
        "periode",  "emploi",  "service", "echelon", "societe",   "adresse", "paris",
        "madame",   "monsieur","du",      "au",      "le",        "la",      "les",
        "de",       "des",     "et",      "pour",    "par",       "sur",     "code",
        "ref",      "nom",     "heures",  "jours",   "mois",      "annee",   "euros",
        "tva",      "csg",     "rtt",     "avance",  "acompte",   "plafond", "regime",
        "cadre",    "indice",  "rubrique","quantite","valeur",    "part",    "vu",
        "nb",       "art",     "mme",     "mr",      "ne",        "en",      "un",
        "une",      "ce",      "se",      "sous",    "majo",      "abs",
    };
    return words;
}

inline std::string random_letters(Rng& rng, int len) {
    static const std::string alphabet = "abcdefghjkmnpqrstuvwxyz";  // no confusable chars
    std::string s;
    for (int i = 0; i < len; ++i) s.push_back(alphabet[static_cast<std::size_t>(
        rng.uniform(0, static_cast<int>(alphabet.size()) - 1))]);
    return s;
}

inline std::string random_amount(Rng& rng) {
    std::string s = std::to_string(rng.uniform(2, 9));
    const int more = rng.uniform(0, 2);
    for (int i = 0; i < more; ++i) s += std::to_string(rng.uniform(2, 9));
    s += ',';
    s += std::to_string(rng.uniform(2, 9));
    s += std::to_string(rng.uniform(2, 9));
    return s;
}

inline std::string random_date(Rng& rng) {
    const auto two = [&](int lo, int hi) {
        const int v = rng.uniform(lo, hi);
        return (v < 10 ? "0" : "") + std::to_string(v);
    };
    return two(1, 28) + "/" + two(1, 12) + "/" + two(5, 25);
}

inline std::string make_word(Rng& rng) {
    const int kind = rng.uniform(0, 9);
    if (kind < 7) return rng.pick(vocabulary());
    if (kind < 8) return random_amount(rng);
    if (kind < 9) return random_date(rng);
    return random_letters(rng, rng.uniform(3, 8));
}

using Model = std::vector<std::vector<std::string>>;  // lines of word strings

inline double line_sim(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<TextPoint> ta, tb;
    for (const auto& w : a) ta.emplace_back(w, Box{0, 0, 1, 1});
    for (const auto& w : b) tb.emplace_back(w, Box{0, 0, 1, 1});
    return line_similarity(ta, tb, MatchParams{});
}

inline std::vector<std::string> make_line(Rng& rng, const SynthSpec& spec, const Model& existing) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<std::string> line;
        const int n = rng.uniform(spec.words_per_line_min, spec.words_per_line_max);
        for (int i = 0; i < n; ++i) line.push_back(make_word(rng));
        bool ok = true;
        for (const auto& other : existing) {
            if (line_sim(line, other) > 0.45) {
                ok = false;
                break;
            }
        }
        if (ok) return line;
    }
    // fall back to a line of unique random words
    std::vector<std::string> line;
    const int n = rng.uniform(spec.words_per_line_min, spec.words_per_line_max);
    for (int i = 0; i < n; ++i) line.push_back(random_letters(rng, 7));
    return line;
}

/// A word clearly different from everything on the given line.
inline std::string make_distinct_word(Rng& rng, const std::vector<std::string>& line) {
    for (int attempt = 0; attempt < 256; ++attempt) {
        const std::string w = attempt < 128 ? make_word(rng) : random_letters(rng, rng.uniform(4, 7));
        const std::string k = normalize_kernel(w);
        bool ok = true;
        for (const auto& other : line) {
            if (coeff_ocr(k, normalize_kernel(other)) > 0.5) {
                ok = false;
                break;
            }
        }
        if (ok) return w;
    }
    return random_letters(rng, 9);
}

/// Replace about half the characters, keeping the result dissimilar in both
/// kernel space (coordination must fail) and glyph space (the pixel check
/// must not absorb the edit).
inline std::string substitute_chars(Rng& rng, const std::string& word) {
    static const std::string alphabet = "abcdefghjkmnpqrstuvwxyz23456789";
    const std::string old_kernel = normalize_kernel(word);
    for (int attempt = 0; attempt < 256; ++attempt) {
        std::string out = word;
        const int len = static_cast<int>(out.size());
        const int k = (len + 1) / 2;
        std::vector<int> positions(static_cast<std::size_t>(len));
        for (int i = 0; i < len; ++i) positions[static_cast<std::size_t>(i)] = i;
        for (int i = len - 1; i > 0; --i)
            std::swap(positions[static_cast<std::size_t>(i)],
                      positions[static_cast<std::size_t>(rng.uniform(0, i))]);
        for (int i = 0; i < k; ++i) {
            const int pos = positions[static_cast<std::size_t>(i)];
            for (int tries = 0; tries < 32; ++tries) {
                const char c = alphabet[static_cast<std::size_t>(
                    rng.uniform(0, static_cast<int>(alphabet.size()) - 1))];
                if (c != out[static_cast<std::size_t>(pos)] &&
                    glyph_residual(c, out[static_cast<std::size_t>(pos)]) >= 8) {
                    out[static_cast<std::size_t>(pos)] = c;
                    break;
                }
            }
        }
        if (out != word && coeff_ocr(old_kernel, normalize_kernel(out)) <= 0.5) return out;
    }
    return random_letters(rng, static_cast<int>(word.size()));
}

struct WordGeom {
    Box box;  // render position
    std::string text;
};
struct LineGeom {
    std::vector<WordGeom> words;
};
struct PageGeom {
    std::vector<LineGeom> lines;
    int width = 0;
    int height = 0;
};

/// Proportional word metrics: the box is exactly tight around the ink.
inline Box word_extent(const std::string& text, int pen_x, int line_top) {
    int width = 0;
    int row_lo = kGlyphHeight, row_hi = -1;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto [clo, chi] = glyph_col_span(text[i]);
        width += (chi - clo + 1) * kScale;
        if (i + 1 < text.size()) width += kCharGap;
        const auto [rlo, rhi] = glyph_row_span(text[i]);
        row_lo = std::min(row_lo, rlo);
        row_hi = std::max(row_hi, rhi);
    }
    return Box{pen_x, line_top + row_lo * kScale, std::max(1, width),
               std::max(1, (row_hi - row_lo + 1) * kScale)};
}

inline PageGeom layout_model(const Model& model) {
    PageGeom page;
    int max_right = 0;
    for (std::size_t li = 0; li < model.size(); ++li) {
        LineGeom line;
        int x = kMargin;
        const int line_top = kMargin + static_cast<int>(li) * kLinePitch;
        for (const auto& text : model[li]) {
            const Box box = word_extent(text, x, line_top);
            line.words.push_back(WordGeom{box, text});
            x += box.w + kWordGap;
            max_right = std::max(max_right, box.right());
        }
        page.lines.push_back(std::move(line));
    }
    page.width = max_right + kMargin;
    page.height = kMargin * 2 + (static_cast<int>(model.size()) - 1) * kLinePitch + kCharHeight;
    if (model.empty()) {
        page.width = 2 * kMargin;
        page.height = 2 * kMargin;
    }
    return page;
}

/// Draw a word so its ink lands exactly inside geom.box shifted by (dx, dy).
inline void render_word(GrayImage& img, const WordGeom& geom, int dx, int dy) {
    int pen = geom.box.x + dx;
    int row_lo = kGlyphHeight;
    for (const char c : geom.text) row_lo = std::min(row_lo, glyph_row_span(c).first);
    const int top = geom.box.y + dy - row_lo * kScale;
    for (const char c : geom.text) {
        const auto& glyph = glyph_bitmap(c);
        const auto [clo, chi] = glyph_col_span(c);
        for (int gy = 0; gy < kGlyphHeight; ++gy) {
            for (int gx = clo; gx <= chi; ++gx) {
                if (!glyph[static_cast<std::size_t>(gy) * kGlyphWidth + gx]) continue;
                for (int sy = 0; sy < kScale; ++sy) {
                    for (int sx = 0; sx < kScale; ++sx) {
                        const int px = pen + (gx - clo) * kScale + sx;
                        const int py = top + gy * kScale + sy;
                        if (px >= 0 && px < img.width && py >= 0 && py < img.height)
                            img.at(px, py) = 0;
                    }
                }
            }
        }
        pen += (chi - clo + 1) * kScale + kCharGap;
    }
}

inline void apply_noise(GrayImage& img, double fraction, Rng& rng) {
    if (fraction <= 0.0) return;
    const auto count = static_cast<std::int64_t>(fraction * static_cast<double>(img.data.size()));
    for (std::int64_t i = 0; i < count; ++i) {
        const int x = rng.uniform(0, img.width - 1);
        const int y = rng.uniform(0, img.height - 1);
        img.at(x, y) = rng.chance(0.5) ? 0 : 255;
    }
}

inline std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

/// Tesseract-style misreads that the editorial comparison rules do not
/// absorb; these are what make recognition-induced false positives possible.
inline char misread_of(char c) {
    switch (c) {
        case 'e': return 'c';
        case 'c': return 'e';
        case 's': return '5';
        case '5': return 's';
        case 'g': return '9';
        case '9': return 'g';
        case 'b': return 'h';
        case 'h': return 'b';
        case 'u': return 'v';
        case 'v': return 'u';
        case 't': return 'f';
        case 'f': return 't';
        case 'n': return 'm';
        case 'm': return 'n';
        default: return 0;
    }
}

inline std::string perturb_text(const std::string& text, double rate, Rng& rng) {
    if (rate <= 0.0) return text;
    std::string out = text;
    for (auto& c : out) {
        if (!rng.chance(rate)) continue;
        std::vector<char> options;
        if (c >= 'a' && c <= 'z') {
            options.push_back(static_cast<char>(c - 32));
        } else if (c >= 'A' && c <= 'Z') {
            options.push_back(static_cast<char>(c + 32));
        }
        if (c == 'o') options.push_back('0');
        if (c == 'O') options.push_back('0');
        if (c == '0') options.push_back(rng.chance(0.5) ? 'O' : 'o');
        if (const char m = misread_of(c)) options.push_back(m);
        if (!options.empty()) c = options[static_cast<std::size_t>(
            rng.uniform(0, static_cast<int>(options.size()) - 1))];
    }
    return out;
}

inline std::string emit_hocr(const PageGeom& page, double perturb_rate, Rng& rng) {
    std::string h;
    h += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    h += "<html xmlns=\"http://www.w3.org/1999/xhtml\">\n<head><title></title></head>\n<body>\n";
    h += "  <div class='ocr_page' title='bbox 0 0 " + std::to_string(page.width) + " " +
         std::to_string(page.height) + "'>\n";
    for (const auto& line : page.lines) {
        Box lb{};
        for (const auto& w : line.words) lb = union_box(lb, w.box);
        h += "    <span class='ocr_line' title='bbox " + std::to_string(lb.x) + " " +
             std::to_string(lb.y) + " " + std::to_string(lb.right()) + " " +
             std::to_string(lb.bottom()) + "'>\n";
        for (const auto& w : line.words) {
            const std::string text = perturb_text(w.text, perturb_rate, rng);
            h += "      <span class='ocrx_word' title='bbox " + std::to_string(w.box.x) + " " +
                 std::to_string(w.box.y) + " " + std::to_string(w.box.right()) + " " +
                 std::to_string(w.box.bottom()) + "; x_wconf 95'>" + escape_xml(text) + "</span>\n";
        }
        h += "    </span>\n";
    }
    h += "  </div>\n</body>\n</html>\n";
    return h;
}

}  // namespace synth_detail

/// Render one deterministic reference/test page pair with known edits,
/// matching hOCR for both sides, and word-level ground truth.
inline SynthPair generate_pair(const SynthSpec& spec) {
    using namespace synth_detail;
    if (spec.lines < 1 || spec.words_per_line_min < 1 ||
        spec.words_per_line_max < spec.words_per_line_min)
        throw std::invalid_argument("SynthSpec: bad line/word counts");

    Rng rng(spec.seed);

    Model ref_model;
    for (int i = 0; i < spec.lines; ++i) ref_model.push_back(make_line(rng, spec, ref_model));

    // test model starts as a tagged copy; tags keep identity through line edits
    struct TaggedLine {
        std::vector<std::string> words;
        int origin;  // ref line index, or -1 for inserted lines
    };
    std::vector<TaggedLine> test_model;
    for (std::size_t i = 0; i < ref_model.size(); ++i)
        test_model.push_back(TaggedLine{ref_model[i], static_cast<int>(i)});

    struct PendingTruth {
        ModificationKind kind;
        Side side;
        int ref_line = -1;   // for ref-side entries
        int origin = -1;     // tag of the test line for test-side word edits
        int word_index = -1; // index within the line (final model)
        int insert_tag = -1; // for inserted lines
    };
    std::vector<PendingTruth> pending;

    // expand the edit list and assign each edit its own target line
    std::vector<EditKind> edit_kinds;
    for (const auto& e : spec.edits)
        for (int i = 0; i < e.count; ++i) edit_kinds.push_back(e.kind);

    std::vector<int> free_lines;  // ref line indices not yet touched
    for (int i = 0; i < spec.lines; ++i) free_lines.push_back(i);
    const auto take_line = [&](bool need_three_words) -> int {
        for (std::size_t k = 0; k < free_lines.size() * 4; ++k) {
            if (free_lines.empty()) break;
            const int pos = rng.uniform(0, static_cast<int>(free_lines.size()) - 1);
            const int line = free_lines[static_cast<std::size_t>(pos)];
            if (need_three_words && ref_model[static_cast<std::size_t>(line)].size() < 3) continue;
            free_lines.erase(free_lines.begin() + pos);
            return line;
        }
        return -1;
    };
    const auto test_index_of = [&](int origin) {
        for (std::size_t i = 0; i < test_model.size(); ++i)
            if (test_model[i].origin == origin) return static_cast<int>(i);
        return -1;
    };

    int insert_counter = 0;
    for (const EditKind kind : edit_kinds) {
        switch (kind) {
            case EditKind::SubstituteChars:
            case EditKind::ReplaceWord: {
                const int line = take_line(false);
                if (line < 0) break;
                auto& words = test_model[static_cast<std::size_t>(test_index_of(line))].words;
                const int wi = rng.uniform(0, static_cast<int>(words.size()) - 1);
                const std::string& old = words[static_cast<std::size_t>(wi)];
                words[static_cast<std::size_t>(wi)] =
                    kind == EditKind::SubstituteChars ? substitute_chars(rng, old)
                                                      : make_distinct_word(rng, words);
                pending.push_back({ModificationKind::WordChanged, Side::Test, -1, line, wi, -1});
                break;
            }
            case EditKind::InsertWord: {
                const int line = take_line(false);
                if (line < 0) break;
                auto& words = test_model[static_cast<std::size_t>(test_index_of(line))].words;
                const int at = rng.uniform(0, static_cast<int>(words.size()));
                words.insert(words.begin() + at, make_distinct_word(rng, words));
                pending.push_back({ModificationKind::WordInserted, Side::Test, -1, line, at, -1});
                break;
            }
            case EditKind::DeleteWord: {
                const int line = take_line(true);
                if (line < 0) break;
                auto& words = test_model[static_cast<std::size_t>(test_index_of(line))].words;
                const int wi = rng.uniform(0, static_cast<int>(words.size()) - 1);
                words.erase(words.begin() + wi);
                pending.push_back({ModificationKind::WordDeleted, Side::Ref, line, -1, wi, -1});
                break;
            }
            case EditKind::DeleteLine: {
                const int line = take_line(false);
                if (line < 0) break;
                test_model.erase(test_model.begin() + test_index_of(line));
                pending.push_back({ModificationKind::LineDeleted, Side::Ref, line, -1, -1, -1});
                break;
            }
            case EditKind::InsertLine: {
                Model context;
                for (const auto& l : ref_model) context.push_back(l);
                std::vector<std::string> fresh;
                for (int attempt = 0; attempt < 64; ++attempt) {
                    fresh.clear();
                    const int n = rng.uniform(spec.words_per_line_min, spec.words_per_line_max);
                    std::vector<std::string> empty_line;
                    for (int i = 0; i < n; ++i) fresh.push_back(make_distinct_word(rng, empty_line));
                    bool ok = true;
                    for (const auto& other : context)
                        if (line_sim(fresh, other) > 0.45) ok = false;
                    if (ok) break;
                }
                const int at = rng.uniform(0, static_cast<int>(test_model.size()));
                const int tag = -2 - insert_counter;  // unique negative tags
                test_model.insert(test_model.begin() + at, TaggedLine{fresh, tag});
                pending.push_back({ModificationKind::LineInserted, Side::Test, -1, -1, -1, tag});
                ++insert_counter;
                break;
            }
        }
    }

    Model test_words;
    for (const auto& l : test_model) test_words.push_back(l.words);

    const PageGeom ref_geom = layout_model(ref_model);
    const PageGeom test_geom = layout_model(test_words);

    GrayImage ref_img(ref_geom.width, ref_geom.height, 255);
    for (const auto& line : ref_geom.lines)
        for (const auto& w : line.words) render_word(ref_img, w, 0, 0);

    GrayImage test_img(test_geom.width, test_geom.height, 255);
    std::vector<std::vector<Box>> test_render_boxes(test_geom.lines.size());
    for (std::size_t li = 0; li < test_geom.lines.size(); ++li) {
        for (const auto& w : test_geom.lines[li].words) {
            const int dx = spec.jitter > 0 ? rng.uniform(-spec.jitter, spec.jitter) : 0;
            const int dy = spec.jitter > 0 ? rng.uniform(-spec.jitter, spec.jitter) : 0;
            render_word(test_img, w, dx, dy);
            Box b = w.box;
            b.x += dx;
            b.y += dy;
            test_render_boxes[li].push_back(b);
        }
    }
    apply_noise(ref_img, spec.noise, rng);
    apply_noise(test_img, spec.noise, rng);

    // hOCR boxes follow what was actually rendered
    PageGeom test_hocr_geom = test_geom;
    for (std::size_t li = 0; li < test_hocr_geom.lines.size(); ++li)
        for (std::size_t wi = 0; wi < test_hocr_geom.lines[li].words.size(); ++wi)
            test_hocr_geom.lines[li].words[wi].box = test_render_boxes[li][wi];

    SynthPair out;
    out.ref_img = std::move(ref_img);
    out.test_img = std::move(test_img);
    out.ref_hocr = emit_hocr(ref_geom, 0.0, rng);
    out.test_hocr = emit_hocr(test_hocr_geom, spec.ocr_error_rate, rng);

    out.truth.page_width = test_geom.width;
    out.truth.page_height = test_geom.height;
    for (const auto& p : pending) {
        TruthEntry e;
        e.kind = p.kind;
        e.side = p.side;
        if (p.side == Side::Ref) {
            const auto& line = ref_geom.lines[static_cast<std::size_t>(p.ref_line)];
            if (p.kind == ModificationKind::LineDeleted) {
                Box b{};
                for (const auto& w : line.words) b = union_box(b, w.box);
                e.box = b;
            } else {
                e.box = line.words[static_cast<std::size_t>(p.word_index)].box;
            }
        } else {
            const int ti = [&] {
                for (std::size_t i = 0; i < test_model.size(); ++i) {
                    if (p.insert_tag != -1 && test_model[i].origin == p.insert_tag)
                        return static_cast<int>(i);
                    if (p.insert_tag == -1 && test_model[i].origin == p.origin)
                        return static_cast<int>(i);
                }
                return -1;
            }();
            if (p.kind == ModificationKind::LineInserted) {
                Box b{};
                for (const auto& box : test_render_boxes[static_cast<std::size_t>(ti)])
                    b = union_box(b, box);
                e.box = b;
            } else {
                e.box = test_render_boxes[static_cast<std::size_t>(ti)]
                                         [static_cast<std::size_t>(p.word_index)];
            }
        }
        out.truth.entries.push_back(e);
    }
    return out;
}

}  // namespace docdiff
