#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "docdiff/docdiff.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitClean = 0;
constexpr int kExitModified = 1;
constexpr int kExitError = 2;

struct CommonFlags {
    std::string config_path;
    std::string mode;
    double word_ocr_simil = 0.0;
    double line_simil = 0.0;
    double word_pixel_coeff = 0.0;
    int shift_range = 0;
    double alpha_range = 0.0;
    double alpha_step = 0.0;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file mirroring the parameter block");
    cmd->add_option("--mode", f.mode, "Comparison mode: ocr-only or combined");
    cmd->add_option("--word-ocr-simil", f.word_ocr_simil, "Word coordination threshold (0..1)");
    cmd->add_option("--line-simil", f.line_simil, "Line coordination threshold (0..1)");
    cmd->add_option("--word-pixel-coeff", f.word_pixel_coeff,
                    "Pixel similarity threshold; lower is stricter");
    cmd->add_option("--shift-range", f.shift_range, "Symmetric shift search range, pixels");
    cmd->add_option("--alpha-range", f.alpha_range, "Symmetric rotation search range, degrees");
    cmd->add_option("--alpha-step", f.alpha_step, "Rotation search step, degrees");
}

/// Precedence: built-in defaults, then config file, then explicit flags.
docdiff::DiffConfig resolve_config(const CLI::App* cmd, const CommonFlags& f) {
    docdiff::DiffConfig cfg;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw docdiff::FileNotFoundError(f.config_path);
        docdiff::config_from_json(docdiff::json::parse(in), cfg);
    }
    if (cmd->count("--mode")) cfg.mode = docdiff::compare_mode_from_string(f.mode);
    if (cmd->count("--word-ocr-simil")) cfg.match.word_ocr_simil = f.word_ocr_simil;
    if (cmd->count("--line-simil")) cfg.match.line_simil = f.line_simil;
    if (cmd->count("--word-pixel-coeff")) cfg.pix.word_pixel_coeff = f.word_pixel_coeff;
    if (cmd->count("--shift-range")) {
        cfg.pix.range.x_min = -f.shift_range;
        cfg.pix.range.x_max = f.shift_range;
        cfg.pix.range.y_min = -f.shift_range;
        cfg.pix.range.y_max = f.shift_range;
    }
    if (cmd->count("--alpha-range")) {
        cfg.pix.range.alpha_min = -f.alpha_range;
        cfg.pix.range.alpha_max = f.alpha_range;
    }
    if (cmd->count("--alpha-step")) cfg.pix.range.alpha_step = f.alpha_step;
    docdiff::validate(cfg);
    return cfg;
}

int cmd_compare(const CLI::App* cmd, const CommonFlags& flags, const std::string& ref_path,
                const std::string& test_path, const std::string& hocr_ref,
                const std::string& hocr_test, const std::string& report_path,
                const std::string& annotate_path) {
    const docdiff::DiffConfig cfg = resolve_config(cmd, flags);
    const auto opt = [](const std::string& s) {
        return s.empty() ? std::nullopt : std::optional<std::string>(s);
    };
    const docdiff::ComparisonReport report =
        docdiff::compare_documents(ref_path, test_path, cfg, opt(hocr_ref), opt(hocr_test));

    const std::string text = docdiff::report_to_json(report);
    if (report_path.empty()) {
        std::cout << text;
    } else {
        docdiff::detail::write_file_atomic(report_path, text);
    }

    if (!annotate_path.empty()) {
        // re-run the preprocessing so boxes land on the images being drawn
        docdiff::GrayImage ref_img = docdiff::load_image(ref_path);
        docdiff::GrayImage test_img = docdiff::load_image(test_path);
        ref_img = docdiff::auto_contrast(ref_img, cfg.contrast_low, cfg.contrast_high);
        test_img = docdiff::auto_contrast(test_img, cfg.contrast_low, cfg.contrast_high);
        const auto rs = docdiff::estimate_skew(ref_img, cfg.deskew_max_angle, cfg.deskew_step);
        if (rs.angle != 0.0) ref_img = docdiff::rotate(ref_img, -rs.angle);
        const auto ts = docdiff::estimate_skew(test_img, cfg.deskew_max_angle, cfg.deskew_step);
        if (ts.angle != 0.0) test_img = docdiff::rotate(test_img, -ts.angle);
        const docdiff::RgbImage canvas = docdiff::render_annotation(ref_img, test_img, report);
        const std::string tmp = annotate_path + ".tmp";
        docdiff::save_png(canvas, tmp);
        fs::rename(tmp, annotate_path);
    }
    return report.modifications.empty() ? kExitClean : kExitModified;
}

int cmd_evaluate(const CLI::App* cmd, const CommonFlags& flags, const std::string& corpus_dir,
                 const std::string& csv_path, const std::string& json_path, double iou_threshold,
                 int jobs) {
    const docdiff::DiffConfig cfg = resolve_config(cmd, flags);
    const docdiff::ExperimentResult result =
        docdiff::run_experiment_dir(corpus_dir, cfg, iou_threshold, jobs);

    const std::string csv = docdiff::experiment_csv(result);
    if (csv_path.empty())
        std::cout << csv;
    else
        docdiff::detail::write_file_atomic(csv_path, csv);
    if (!json_path.empty())
        docdiff::detail::write_file_atomic(json_path, docdiff::experiment_json(result).dump(2) + "\n");

    int errored = 0;
    for (const auto& p : result.pairs)
        if (!p.ok) ++errored;
    if (errored > 0)
        std::cerr << "warning: " << errored << " pair(s) failed and were excluded\n";
    return kExitClean;
}

std::vector<docdiff::CorpusPair> parse_corpus_spec(const std::string& spec_path) {
    std::ifstream in(spec_path);
    if (!in) throw docdiff::FileNotFoundError(spec_path);
    const docdiff::json j = docdiff::json::parse(in);

    const std::uint64_t base_seed = j.value("seed", 1ULL);
    std::vector<docdiff::CorpusPair> corpus;
    std::uint64_t stream = 0;
    int pair_index = 0;
    for (const auto& cat : j.at("categories")) {
        const std::string name = cat.at("name").get<std::string>();
        const int pairs = cat.at("pairs").get<int>();
        docdiff::SynthSpec base;
        base.lines = cat.value("lines", base.lines);
        if (cat.contains("words_per_line")) {
            base.words_per_line_min = cat.at("words_per_line")[0].get<int>();
            base.words_per_line_max = cat.at("words_per_line")[1].get<int>();
        }
        base.jitter = cat.value("jitter", base.jitter);
        base.noise = cat.value("noise", base.noise);
        base.ocr_error_rate = cat.value("ocr_error_rate", base.ocr_error_rate);
        if (cat.contains("edits")) {
            for (const auto& e : cat.at("edits"))
                base.edits.push_back(docdiff::EditSpec{
                    docdiff::edit_kind_from_string(e.at("kind").get<std::string>()),
                    e.value("count", 1)});
        }
        for (int i = 0; i < pairs; ++i) {
            docdiff::SynthSpec spec = base;
            spec.seed = docdiff::mix_seed(base_seed, stream++);
            char buf[32];
            std::snprintf(buf, sizeof(buf), "pair_%04d", pair_index++);
            corpus.push_back(docdiff::CorpusPair{buf, name, spec});
        }
    }
    if (corpus.empty()) throw docdiff::Error("corpus spec defines no pairs");
    return corpus;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
    const auto corpus = parse_corpus_spec(spec_path);
    docdiff::materialize_corpus(corpus, out_dir);
    std::cout << "wrote " << corpus.size() << " pair(s) to " << out_dir << "\n";
    return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"docdiff: locate word-level modifications between two scans of one document"};
    app.require_subcommand(1);

    // compare
    auto* compare = app.add_subcommand("compare", "Compare a reference scan with a test scan");
    std::string ref_path, test_path, hocr_ref, hocr_test, report_path, annotate_path;
    CommonFlags compare_flags;
    compare->add_option("ref", ref_path, "Reference image (PNG or PGM)")->required();
    compare->add_option("test", test_path, "Test image (PNG or PGM)")->required();
    add_common_flags(compare, compare_flags);
    compare->add_option("--hocr-ref", hocr_ref, "Use this hOCR file instead of running OCR (ref)");
    compare->add_option("--hocr-test", hocr_test, "Use this hOCR file instead of running OCR (test)");
    compare->add_option("--report", report_path, "Write the JSON report here (default: stdout)");
    compare->add_option("--annotate", annotate_path, "Write a side-by-side annotated PNG here");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score a corpus of pairs against ground truth");
    std::string corpus_dir, csv_path, json_path;
    double iou_threshold = 0.5;
    int jobs = 1;
    CommonFlags eval_flags;
    evaluate->add_option("corpus", corpus_dir, "Corpus directory")->required();
    add_common_flags(evaluate, eval_flags);
    evaluate->add_option("--csv", csv_path, "Write the category table CSV here (default: stdout)");
    evaluate->add_option("--json", json_path, "Write per-pair results and the aggregate here");
    evaluate->add_option("--iou", iou_threshold, "IoU threshold for matching boxes to truth");
    evaluate->add_option("--jobs", jobs, "Evaluate pairs with this many worker threads");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
    std::string spec_path, out_dir;
    synth->add_option("spec", spec_path, "Corpus spec JSON file")->required();
    synth->add_option("out", out_dir, "Output corpus directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (compare->parsed())
            return cmd_compare(compare, compare_flags, ref_path, test_path, hocr_ref, hocr_test,
                               report_path, annotate_path);
        if (evaluate->parsed())
            return cmd_evaluate(evaluate, eval_flags, corpus_dir, csv_path, json_path,
                                iou_threshold, jobs);
        if (synth->parsed()) return cmd_synth(spec_path, out_dir);
    } catch (const docdiff::StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
