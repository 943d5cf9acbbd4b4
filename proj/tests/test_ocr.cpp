#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sys/stat.h>

#include "docdiff/ocr.hpp"
#include "oracles.hpp"

using namespace docdiff;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "docdiff-ocr-test-XXXXXX").string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        REQUIRE(::mkdtemp(buf.data()) != nullptr);
        path = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
    std::string script(const std::string& name, const std::string& body) const {
        const std::string p = file(name);
        std::ofstream out(p);
        out << "#!/bin/sh\n" << body;
        out.close();
        ::chmod(p.c_str(), 0755);
        return p;
    }
};

const char* kMinimalHocr = R"(<?xml version="1.0" encoding="UTF-8"?>
<html xmlns="http://www.w3.org/1999/xhtml">
 <body>
  <div class='ocr_page' id='page_1' title='image "x.png"; bbox 0 0 200 100'>
   <span class='ocr_line' title='bbox 10 20 60 40'>
    <span class='ocrx_word' title='bbox 10 20 60 40; x_wconf 91'>Total</span>
   </span>
  </div>
 </body>
</html>
)";

}  // namespace

TEST_CASE("normalize_kernel applies the editorial rules", "[ocr]") {
    SECTION("named examples") {
        REQUIRE(normalize_kernel("Mr.") == "mr");
        REQUIRE(normalize_kernel("27/07/07") == "27/07/07");
        REQUIRE(normalize_kernel("B0nus") == "bonus");
    }
    SECTION("case folding covers accented letters") {
        REQUIRE(normalize_kernel("Élan") == "élan");
        REQUIRE(normalize_kernel("ÉLAN") == "élan");
    }
    SECTION("dash and quote variants canonicalize") {
        REQUIRE(normalize_kernel("3–4") == "3-4");          // en dash between digits
        REQUIRE(normalize_kernel("a—b") == "ab");           // em dash inside letters drops
        REQUIRE(normalize_kernel("“quote”") == "quote");
    }
    SECTION("digit-majority tokens canonicalize O to 0 and l to 1") {
        REQUIRE(normalize_kernel("2O17") == "2017");
        REQUIRE(normalize_kernel("4l7") == "417");
        REQUIRE(normalize_kernel("Tota1") == "total");
        REQUIRE(normalize_kernel("0ffice") == "office");
    }
    SECTION("digit-context punctuation survives") {
        REQUIRE(normalize_kernel("1 234,56") == "1234,56");
        REQUIRE(normalize_kernel("((1.5))") == "1.5");
        REQUIRE(normalize_kernel("...") == "");
    }
    SECTION("idempotent and case-insensitive on fuzzed strings") {
        oracle::Rand rng(41);
        for (int iter = 0; iter < 400; ++iter) {
            const std::string raw = oracle::random_kernel(rng, 14);
            const std::string once = normalize_kernel(raw);
            REQUIRE(normalize_kernel(once) == once);
            std::string upper = raw, lower = raw;
            for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            REQUIRE(normalize_kernel(upper) == normalize_kernel(lower));
        }
    }
}

TEST_CASE("parse_hocr extracts lines, words, boxes and confidence", "[ocr]") {
    SECTION("minimal document") {
        const DocumentText doc = parse_hocr(kMinimalHocr);
        REQUIRE(doc.lines.size() == 1);
        REQUIRE(doc.lines[0].words.size() == 1);
        const TextPoint& w = doc.lines[0].words[0];
        REQUIRE(w.kernel == "total");
        REQUIRE(w.raw == "Total");
        REQUIRE(w.box == Box{10, 20, 50, 20});
        REQUIRE(w.confidence == Catch::Approx(0.91));
        REQUIRE(doc.page_width == 200);
        REQUIRE(doc.page_height == 100);
    }
    SECTION("zero words") {
        const DocumentText doc = parse_hocr("<html><body><div class='ocr_page'></div></body></html>");
        REQUIRE(doc.lines.empty());
    }
    SECTION("word without bbox throws") {
        REQUIRE_THROWS_AS(
            parse_hocr("<html><body><span class='ocrx_word'>oops</span></body></html>"),
            MissingBboxError);
    }
    SECTION("degenerate bbox throws") {
        REQUIRE_THROWS_AS(
            parse_hocr("<html><body><span class='ocrx_word' title='bbox 5 5 5 9'>x</span></body></html>"),
            MissingBboxError);
    }
    SECTION("entities, nested markup and whitespace collapse") {
        const DocumentText doc = parse_hocr(
            "<html><body><span class='ocr_line' title='bbox 0 0 90 10'>"
            "<span class='ocrx_word' title='bbox 0 0 40 10'> A&amp;B <strong>C</strong> </span>"
            "<span class='ocrx_word' title='bbox 50 0 90 10'>&#x45;t&#233;</span>"
            "</span></body></html>");
        REQUIRE(doc.lines.size() == 1);
        REQUIRE(doc.lines[0].words[0].raw == "A&B C");
        REQUIRE(doc.lines[0].words[1].raw == "Eté");
    }
    SECTION("empty-text words are dropped") {
        const DocumentText doc = parse_hocr(
            "<html><body><span class='ocr_line' title='bbox 0 0 60 10'>"
            "<span class='ocrx_word' title='bbox 0 0 20 10'>  </span>"
            "<span class='ocrx_word' title='bbox 30 0 60 10'>kept</span>"
            "</span></body></html>");
        REQUIRE(doc.lines.size() == 1);
        REQUIRE(doc.lines[0].words.size() == 1);
        REQUIRE(doc.lines[0].words[0].raw == "kept");
    }
    SECTION("reading order is document order") {
        std::string hocr = "<html><body>";
        for (int li = 0; li < 3; ++li) {
            hocr += "<span class='ocr_line' title='bbox 0 " + std::to_string(li * 20) + " 100 " +
                    std::to_string(li * 20 + 10) + "'>";
            for (int wi = 0; wi < 3; ++wi) {
                const int x = wi * 30;
                hocr += "<span class='ocrx_word' title='bbox " + std::to_string(x) + " " +
                        std::to_string(li * 20) + " " + std::to_string(x + 20) + " " +
                        std::to_string(li * 20 + 10) + "'>w" + std::to_string(li) +
                        std::to_string(wi) + "</span>";
            }
            hocr += "</span>";
        }
        hocr += "</body></html>";
        const DocumentText doc = parse_hocr(hocr);
        REQUIRE(doc.lines.size() == 3);
        for (std::size_t li = 0; li < 3; ++li) {
            for (std::size_t wi = 0; wi < 3; ++wi) {
                REQUIRE(doc.lines[li].words[wi].raw ==
                        "w" + std::to_string(li) + std::to_string(wi));
                if (wi > 0)
                    REQUIRE(doc.lines[li].words[wi - 1].box.x < doc.lines[li].words[wi].box.x);
            }
            if (li > 0) REQUIRE(doc.lines[li - 1].line_box.y < doc.lines[li].line_box.y);
        }
    }
    SECTION("unterminated markup throws") {
        REQUIRE_THROWS_AS(parse_hocr("<html><span class='ocrx_word' title='bbox 0 0 5 5"),
                          MalformedHocrError);
        REQUIRE_THROWS_AS(
            parse_hocr("<html><body><span class='ocrx_word' title='bbox 0 0 5 5'>x"),
            MalformedHocrError);
    }
}

TEST_CASE("run_ocr drives the external engine", "[ocr]") {
    TempDir tmp;
    const std::string image = tmp.file("page.pgm");
    {
        std::ofstream out(image, std::ios::binary);
        out << "P5\n1 1\n255\n" << static_cast<char>(0);
    }

    SECTION("missing executable") {
        OcrEngineConfig cfg;
        cfg.executable = tmp.file("no-such-engine");
        REQUIRE_THROWS_AS(run_ocr(image, cfg), EngineNotFoundError);
    }
    SECTION("missing image") {
        OcrEngineConfig cfg;
        cfg.executable = "/bin/sh";
        REQUIRE_THROWS_AS(run_ocr(tmp.file("no-image.png"), cfg), FileNotFoundError);
    }
    SECTION("successful run returns the hOCR text") {
        OcrEngineConfig cfg;
        cfg.executable = tmp.script("engine-ok", "printf '%s' '<html/>' > \"$2.hocr\"\nexit 0\n");
        cfg.language = "fra";
        REQUIRE(run_ocr(image, cfg) == "<html/>");
    }
    SECTION("nonzero exit becomes EngineFailed with stderr") {
        OcrEngineConfig cfg;
        cfg.executable = tmp.script("engine-bad", "echo broken >&2\nexit 3\n");
        try {
            run_ocr(image, cfg);
            FAIL("expected EngineFailedError");
        } catch (const EngineFailedError& e) {
            REQUIRE(std::string(e.what()).find("broken") != std::string::npos);
        }
    }
    SECTION("no output file becomes EngineFailed") {
        OcrEngineConfig cfg;
        cfg.executable = tmp.script("engine-silent", "exit 0\n");
        REQUIRE_THROWS_AS(run_ocr(image, cfg), EngineFailedError);
    }
    SECTION("slow engine times out") {
        OcrEngineConfig cfg;
        cfg.executable = tmp.script("engine-slow", "sleep 5\n");
        cfg.timeout = 0.05;
        REQUIRE_THROWS_AS(run_ocr(image, cfg), TimeoutError);
    }
    SECTION("bad timeout rejected") {
        OcrEngineConfig cfg;
        cfg.timeout = 0.0;
        REQUIRE_THROWS_AS(run_ocr(image, cfg), std::invalid_argument);
    }
}

TEST_CASE("load_document_text prefers the override", "[ocr]") {
    TempDir tmp;
    const std::string hocr_path = tmp.file("fixture.hocr");
    {
        std::ofstream out(hocr_path);
        out << kMinimalHocr;
    }
    OcrEngineConfig cfg;
    cfg.executable = tmp.file("engine-does-not-exist");

    SECTION("override parses without touching the engine") {
        const DocumentText doc = load_document_text("ignored.png", cfg, hocr_path);
        REQUIRE(doc.lines.size() == 1);
        REQUIRE(doc.lines[0].words[0].kernel == "total");
    }
    SECTION("no override reaches engine resolution") {
        const std::string image = tmp.file("img.pgm");
        std::ofstream out(image, std::ios::binary);
        out << "P5\n1 1\n255\n" << static_cast<char>(0);
        out.close();
        REQUIRE_THROWS_AS(load_document_text(image, cfg), EngineNotFoundError);
    }
    SECTION("missing override file") {
        REQUIRE_THROWS_AS(load_document_text("x.png", cfg, tmp.file("absent.hocr")),
                          FileNotFoundError);
    }
}
