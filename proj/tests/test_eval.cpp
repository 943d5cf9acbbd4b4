#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "docdiff/eval.hpp"
#include "oracles.hpp"

using namespace docdiff;
namespace fs = std::filesystem;

namespace {

PageLayout two_word_layout() {
    PageLayout layout;
    layout.lines.push_back(LayoutLine{Box{0, 0, 100, 12}, {Box{0, 0, 40, 12}, Box{60, 0, 40, 12}}});
    return layout;
}

Modification test_side_mod(const Box& b, ModificationKind kind = ModificationKind::WordChanged) {
    Modification m;
    m.kind = kind;
    m.test_box = b;
    if (kind == ModificationKind::WordChanged) m.ref_box = b;
    return m;
}

TruthEntry test_truth(const Box& b) { return TruthEntry{b, ModificationKind::WordChanged, Side::Test}; }

}  // namespace

TEST_CASE("aggregate_chars_to_words", "[eval]") {
    const PageLayout layout = two_word_layout();
    SECTION("chars inside one word collapse to one entry") {
        const std::vector<Box> chars = {{2, 2, 8, 8}, {12, 2, 8, 8}, {22, 2, 8, 8}};
        const auto out = aggregate_chars_to_words(chars, layout);
        REQUIRE(out.size() == 1);
        REQUIRE(out[0] == Box{0, 0, 40, 12});
    }
    SECTION("chars across two words give two entries") {
        const std::vector<Box> chars = {{2, 2, 8, 8}, {62, 2, 8, 8}};
        const auto out = aggregate_chars_to_words(chars, layout);
        REQUIRE(out.size() == 2);
        REQUIRE(out[0] == Box{0, 0, 40, 12});
        REQUIRE(out[1] == Box{60, 0, 40, 12});
    }
    SECTION("a stray char passes through unchanged") {
        const std::vector<Box> chars = {{2, 2, 8, 8}, {200, 50, 8, 8}};
        const auto out = aggregate_chars_to_words(chars, layout);
        REQUIRE(out.size() == 2);
        REQUIRE(out[1] == Box{200, 50, 8, 8});
    }
}

TEST_CASE("match_report counts and conventions", "[eval]") {
    SECTION("exact boxes give a perfect score") {
        ComparisonReport report;
        GroundTruth truth;
        truth.page_width = truth.page_height = 500;
        for (int i = 0; i < 4; ++i) {
            const Box b{i * 50, 10, 40, 12};
            report.modifications.push_back(test_side_mod(b));
            truth.entries.push_back(test_truth(b));
        }
        const EvalResult r = match_report(report, truth, 0.5);
        REQUIRE(r.tp == 4);
        REQUIRE(r.fp == 0);
        REQUIRE(r.fn == 0);
        REQUIRE(r.precision == 1.0);
        REQUIRE(r.recall == 1.0);
    }
    SECTION("tp=7 fp=3 fn=1 arithmetic") {
        ComparisonReport report;
        GroundTruth truth;
        for (int i = 0; i < 7; ++i) {
            const Box b{i * 50, 10, 40, 12};
            report.modifications.push_back(test_side_mod(b));
            truth.entries.push_back(test_truth(b));
        }
        for (int i = 0; i < 3; ++i)
            report.modifications.push_back(test_side_mod(Box{i * 50, 200, 40, 12}));
        truth.entries.push_back(test_truth(Box{400, 400, 40, 12}));
        const EvalResult r = match_report(report, truth, 0.5);
        REQUIRE(r.tp == 7);
        REQUIRE(r.fp == 3);
        REQUIRE(r.fn == 1);
        REQUIRE(r.precision == 0.7);
        REQUIRE(r.recall == 0.875);
    }
    SECTION("empty report against truth keeps precision 1") {
        ComparisonReport report;
        GroundTruth truth;
        truth.entries.push_back(test_truth(Box{0, 0, 10, 10}));
        const EvalResult r = match_report(report, truth, 0.5);
        REQUIRE(r.precision == 1.0);
        REQUIRE(r.recall == 0.0);
    }
    SECTION("report against empty truth keeps recall 1") {
        ComparisonReport report;
        report.modifications.push_back(test_side_mod(Box{0, 0, 10, 10}));
        const EvalResult r = match_report(report, GroundTruth{}, 0.5);
        REQUIRE(r.precision == 0.0);
        REQUIRE(r.recall == 1.0);
    }
    SECTION("sides do not cross-match") {
        ComparisonReport report;
        Modification m;
        m.kind = ModificationKind::WordDeleted;
        m.ref_box = Box{0, 0, 40, 12};  // ref-side box only
        report.modifications.push_back(m);
        GroundTruth truth;
        truth.entries.push_back(test_truth(Box{0, 0, 40, 12}));  // test-side truth
        const EvalResult r = match_report(report, truth, 0.5);
        REQUIRE(r.tp == 0);
        truth.entries[0].side = Side::Ref;
        REQUIRE(match_report(report, truth, 0.5).tp == 1);
    }
    SECTION("permutation of the report does not change counts") {
        oracle::Rand rng(151);
        ComparisonReport report;
        GroundTruth truth;
        for (int i = 0; i < 6; ++i) {
            const Box b{i * 30, 10, 25, 10};
            if (i < 4) truth.entries.push_back(test_truth(b));
            report.modifications.push_back(test_side_mod(Box{i * 30 + rng.uniform(0, 2), 10, 25, 10}));
        }
        const EvalResult base = match_report(report, truth, 0.5);
        for (int shuffle = 0; shuffle < 5; ++shuffle) {
            for (int i = static_cast<int>(report.modifications.size()) - 1; i > 0; --i)
                std::swap(report.modifications[static_cast<std::size_t>(i)],
                          report.modifications[static_cast<std::size_t>(rng.uniform(0, i))]);
            const EvalResult r = match_report(report, truth, 0.5);
            REQUIRE(r.tp == base.tp);
            REQUIRE(r.fp == base.fp);
            REQUIRE(r.fn == base.fn);
        }
    }
    SECTION("counts always partition both sides") {
        const ComparisonReport report = [] {
            ComparisonReport r;
            r.modifications.push_back(test_side_mod(Box{0, 0, 10, 10}));
            r.modifications.push_back(test_side_mod(Box{100, 0, 10, 10}));
            return r;
        }();
        GroundTruth truth;
        truth.entries.push_back(test_truth(Box{1, 1, 10, 10}));
        const EvalResult r = match_report(report, truth, 0.5);
        REQUIRE(r.tp + r.fn == static_cast<int>(truth.entries.size()));
        REQUIRE(r.tp + r.fp == static_cast<int>(report.modifications.size()));
    }
    SECTION("threshold must be positive") {
        REQUIRE_THROWS_AS(match_report(ComparisonReport{}, GroundTruth{}, 0.0),
                          std::invalid_argument);
    }
}

TEST_CASE("generate_pair determinism and truth", "[eval]") {
    SynthSpec spec;
    spec.seed = 404;
    spec.lines = 4;
    spec.words_per_line_min = 3;
    spec.words_per_line_max = 5;
    SECTION("same seed, same bytes") {
        spec.edits = {{EditKind::ReplaceWord, 1}};
        spec.jitter = 1;
        spec.ocr_error_rate = 0.05;
        spec.noise = 0.001;
        const SynthPair a = generate_pair(spec);
        const SynthPair b = generate_pair(spec);
        REQUIRE(a.ref_img == b.ref_img);
        REQUIRE(a.test_img == b.test_img);
        REQUIRE(a.ref_hocr == b.ref_hocr);
        REQUIRE(a.test_hocr == b.test_hocr);
        REQUIRE(truth_to_json(a.truth) == truth_to_json(b.truth));
    }
    SECTION("no edits means empty truth and a clean compare") {
        const SynthPair pair = generate_pair(spec);
        REQUIRE(pair.truth.entries.empty());
        DiffConfig cfg;
        const ComparisonReport report = compare_pages(PageInput{pair.ref_img, pair.ref_hocr},
                                                      PageInput{pair.test_img, pair.test_hocr}, cfg);
        REQUIRE(report.modifications.empty());
    }
    SECTION("one substitution records one test-side entry") {
        spec.edits = {{EditKind::SubstituteChars, 1}};
        const SynthPair pair = generate_pair(spec);
        REQUIRE(pair.truth.entries.size() == 1);
        REQUIRE(pair.truth.entries[0].side == Side::Test);
        REQUIRE(pair.truth.entries[0].kind == ModificationKind::WordChanged);
    }
    SECTION("truth json round trip") {
        spec.edits = {{EditKind::DeleteLine, 1}};
        const SynthPair pair = generate_pair(spec);
        const GroundTruth back = truth_from_json(truth_to_json(pair.truth));
        REQUIRE(truth_to_json(back) == truth_to_json(pair.truth));
    }
}

TEST_CASE("run_experiment aggregates and soft-fails", "[eval]") {
    SECTION("ten clean pairs are vacuously perfect") {
        std::vector<CorpusPair> corpus;
        for (int i = 0; i < 10; ++i) {
            SynthSpec spec;
            spec.seed = mix_seed(1000, static_cast<std::uint64_t>(i));
            spec.lines = 4;
            corpus.push_back(CorpusPair{"p" + std::to_string(i), "clean", spec});
        }
        const ExperimentResult r = run_experiment(corpus, DiffConfig{}, 0.5, 2);
        REQUIRE(r.aggregate.tp == 0);
        REQUIRE(r.aggregate.fp == 0);
        REQUIRE(r.aggregate.fn == 0);
        REQUIRE(r.aggregate.precision == 1.0);
        REQUIRE(r.aggregate.recall == 1.0);
        REQUIRE(r.pairs.size() == 10);
    }
    SECTION("an errored pair is flagged, the rest aggregate") {
        std::vector<CorpusPair> corpus;
        for (int i = 0; i < 5; ++i) {
            SynthSpec spec;
            spec.seed = mix_seed(2000, static_cast<std::uint64_t>(i));
            spec.lines = i == 2 ? 0 : 4;  // one invalid spec
            spec.edits = {{EditKind::ReplaceWord, 1}};
            corpus.push_back(CorpusPair{"p" + std::to_string(i), "mixed", spec});
        }
        const ExperimentResult r = run_experiment(corpus, DiffConfig{});
        int errored = 0;
        for (const auto& p : r.pairs) errored += !p.ok;
        REQUIRE(errored == 1);
        REQUIRE_FALSE(r.pairs[2].ok);
        REQUIRE(r.pairs[2].error.find("SynthSpec") != std::string::npos);
        REQUIRE(r.aggregate.tp == 4);
        const auto rows = r.by_category();
        REQUIRE(rows.size() == 1);
        REQUIRE(rows[0].pairs == 5);
        REQUIRE(rows[0].errors == 1);
    }
    SECTION("empty corpus rejected") {
        REQUIRE_THROWS_AS(run_experiment({}, DiffConfig{}), std::invalid_argument);
    }
}

TEST_CASE("materialized corpus evaluates identically", "[eval]") {
    std::vector<CorpusPair> corpus;
    for (int i = 0; i < 3; ++i) {
        SynthSpec spec;
        spec.seed = mix_seed(3000, static_cast<std::uint64_t>(i));
        spec.lines = 4;
        spec.edits = {{EditKind::InsertWord, 1}};
        corpus.push_back(CorpusPair{"pair_" + std::to_string(i), "ins", spec});
    }
    std::string tmpl = (fs::temp_directory_path() / "docdiff-eval-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    REQUIRE(::mkdtemp(buf.data()) != nullptr);
    const std::string dir(buf.data());

    materialize_corpus(corpus, dir);
    REQUIRE(fs::exists(fs::path(dir) / "index.json"));
    REQUIRE(fs::exists(fs::path(dir) / "pair_0" / "ref.png"));

    const ExperimentResult mem = run_experiment(corpus, DiffConfig{});
    const ExperimentResult disk = run_experiment_dir(dir, DiffConfig{});
    REQUIRE(disk.aggregate.tp == mem.aggregate.tp);
    REQUIRE(disk.aggregate.fp == mem.aggregate.fp);
    REQUIRE(disk.aggregate.fn == mem.aggregate.fn);
    REQUIRE(disk.pairs.size() == 3);
    REQUIRE(disk.pairs[0].category == "ins");

    const std::string csv = experiment_csv(disk);
    REQUIRE(csv.find("category,pairs,tp,fp,fn,precision,recall\n") == 0);
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + category + all

    std::error_code ec;
    fs::remove_all(dir, ec);
}
