#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "docdiff/segment.hpp"
#include "docdiff/synth.hpp"
#include "docdiff/truth.hpp"

namespace docdiff {

struct EvalResult {
    int tp = 0;
    int fp = 0;
    int fn = 0;
    double precision = 1.0;
    double recall = 1.0;
    std::vector<std::pair<int, int>> matched;  // (truth index, report index)
};

inline void finish_counts(EvalResult& r) {
    r.precision = (r.tp + r.fp) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 1.0;
    r.recall = (r.tp + r.fn) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 1.0;
}

/// Collapse character-level truth boxes onto the words of a page layout.
/// Characters overlapping no word pass through as their own entries.
inline std::vector<Box> aggregate_chars_to_words(const std::vector<Box>& char_boxes,
                                                 const PageLayout& layout) {
    std::vector<Box> word_boxes;
    for (const auto& line : layout.lines)
        for (const auto& w : line.words) word_boxes.push_back(w);

    std::vector<bool> word_hit(word_boxes.size(), false);
    std::vector<Box> strays;
    for (const auto& cb : char_boxes) {
        std::int64_t best_area = 0;
        int best = -1;
        for (std::size_t i = 0; i < word_boxes.size(); ++i) {
            const auto a = intersect(cb, word_boxes[i]).area();
            if (a > best_area) {
                best_area = a;
                best = static_cast<int>(i);
            }
        }
        if (best >= 0)
            word_hit[static_cast<std::size_t>(best)] = true;
        else
            strays.push_back(cb);
    }

    std::vector<Box> out;
    for (std::size_t i = 0; i < word_boxes.size(); ++i)
        if (word_hit[i]) out.push_back(word_boxes[i]);
    out.insert(out.end(), strays.begin(), strays.end());
    return out;
}

/// Greedy IoU matching of reported modifications against ground truth,
/// side-aware: a truth entry only matches the report box on its own side.
inline EvalResult match_report(const ComparisonReport& report, const GroundTruth& truth,
                               double iou_threshold = 0.5) {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
        throw std::invalid_argument("iou threshold must lie in (0,1]");

    struct Candidate {
        double iou;
        int truth_idx;
        int mod_idx;
    };
    std::vector<Candidate> candidates;
    for (std::size_t t = 0; t < truth.entries.size(); ++t) {
        const auto& entry = truth.entries[t];
        for (std::size_t m = 0; m < report.modifications.size(); ++m) {
            const auto& mod = report.modifications[m];
            const auto& box = entry.side == Side::Test ? mod.test_box : mod.ref_box;
            if (!box) continue;
            const double v = iou(entry.box, *box);
            if (v >= iou_threshold)
                candidates.push_back(Candidate{v, static_cast<int>(t), static_cast<int>(m)});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.truth_idx != b.truth_idx) return a.truth_idx < b.truth_idx;
        return a.mod_idx < b.mod_idx;
    });

    std::vector<bool> truth_used(truth.entries.size(), false);
    std::vector<bool> mod_used(report.modifications.size(), false);
    EvalResult r;
    for (const auto& c : candidates) {
        if (truth_used[static_cast<std::size_t>(c.truth_idx)] ||
            mod_used[static_cast<std::size_t>(c.mod_idx)])
            continue;
        truth_used[static_cast<std::size_t>(c.truth_idx)] = true;
        mod_used[static_cast<std::size_t>(c.mod_idx)] = true;
        r.matched.emplace_back(c.truth_idx, c.mod_idx);
        ++r.tp;
    }
    r.fp = static_cast<int>(report.modifications.size()) - r.tp;
    r.fn = static_cast<int>(truth.entries.size()) - r.tp;
    finish_counts(r);
    return r;
}

// ---------------------------------------------------------------------------
// Corpus experiments
// ---------------------------------------------------------------------------

struct CorpusPair {
    std::string name;
    std::string category;
    SynthSpec spec;
};

struct PairOutcome {
    std::string name;
    std::string category;
    bool ok = false;
    std::string error;
    EvalResult eval;
    ComparisonReport report;
};

struct ExperimentResult {
    std::vector<PairOutcome> pairs;
    EvalResult aggregate;  // micro-average over successful pairs

    struct CategoryRow {
        std::string category;
        int pairs = 0;
        int errors = 0;
        EvalResult eval;
    };
    std::vector<CategoryRow> by_category() const {
        std::vector<CategoryRow> rows;
        for (const auto& p : pairs) {
            auto it = std::find_if(rows.begin(), rows.end(),
                                   [&](const CategoryRow& r) { return r.category == p.category; });
            if (it == rows.end()) {
                rows.push_back(CategoryRow{p.category, 0, 0, {}});
                it = rows.end() - 1;
            }
            ++it->pairs;
            if (!p.ok) {
                ++it->errors;
                continue;
            }
            it->eval.tp += p.eval.tp;
            it->eval.fp += p.eval.fp;
            it->eval.fn += p.eval.fn;
        }
        for (auto& r : rows) finish_counts(r.eval);
        return rows;
    }
};

namespace detail {

template <typename WorkFn>
void parallel_for(int count, int jobs, WorkFn&& work) {
    jobs = std::max(1, jobs);
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> threads;
    const int n_threads = std::min(jobs, count);
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        threads.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                work(i);
            }
        });
    }
    for (auto& th : threads) th.join();
}

inline void aggregate_outcomes(ExperimentResult& result) {
    for (const auto& p : result.pairs) {
        if (!p.ok) continue;
        result.aggregate.tp += p.eval.tp;
        result.aggregate.fp += p.eval.fp;
        result.aggregate.fn += p.eval.fn;
    }
    finish_counts(result.aggregate);
}

}  // namespace detail

/// Run the pipeline over generated pairs and score each against its truth.
/// Per-pair failures are recorded, not fatal.
inline ExperimentResult run_experiment(const std::vector<CorpusPair>& corpus, const DiffConfig& cfg,
                                       double iou_threshold = 0.5, int jobs = 1) {
    if (corpus.empty()) throw std::invalid_argument("corpus is empty");
    ExperimentResult result;
    result.pairs.resize(corpus.size());
    detail::parallel_for(static_cast<int>(corpus.size()), jobs, [&](int i) {
        auto& out = result.pairs[static_cast<std::size_t>(i)];
        out.name = corpus[static_cast<std::size_t>(i)].name;
        out.category = corpus[static_cast<std::size_t>(i)].category;
        try {
            const SynthPair pair = generate_pair(corpus[static_cast<std::size_t>(i)].spec);
            out.report = compare_pages(PageInput{pair.ref_img, pair.ref_hocr},
                                       PageInput{pair.test_img, pair.test_hocr}, cfg);
            out.eval = match_report(out.report, pair.truth, iou_threshold);
            out.ok = true;
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    });
    detail::aggregate_outcomes(result);
    return result;
}

/// Same experiment over a materialized corpus directory (the layout written
/// by the synth command: per-pair subdirectories with images, hOCR and truth).
inline ExperimentResult run_experiment_dir(const std::string& corpus_dir, const DiffConfig& cfg,
                                           double iou_threshold = 0.5, int jobs = 1) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(corpus_dir)) throw FileNotFoundError(corpus_dir);

    struct Entry {
        std::string dir;
        std::string name;
        std::string category;
    };
    std::vector<Entry> entries;
    const fs::path index_path = fs::path(corpus_dir) / "index.json";
    if (fs::exists(index_path)) {
        const json idx = json::parse(detail::read_text_file(index_path.string()));
        for (const auto& e : idx.at("pairs")) {
            entries.push_back(Entry{(fs::path(corpus_dir) / e.at("dir").get<std::string>()).string(),
                                    e.at("dir").get<std::string>(),
                                    e.value("category", std::string("all"))});
        }
    } else {
        std::vector<std::string> dirs;
        for (const auto& d : fs::directory_iterator(corpus_dir))
            if (d.is_directory()) dirs.push_back(d.path().string());
        std::sort(dirs.begin(), dirs.end());
        for (const auto& d : dirs)
            entries.push_back(Entry{d, fs::path(d).filename().string(), "all"});
    }
    if (entries.empty()) throw Error("corpus directory has no pairs: " + corpus_dir);

    ExperimentResult result;
    result.pairs.resize(entries.size());
    detail::parallel_for(static_cast<int>(entries.size()), jobs, [&](int i) {
        const auto& e = entries[static_cast<std::size_t>(i)];
        auto& out = result.pairs[static_cast<std::size_t>(i)];
        out.name = e.name;
        out.category = e.category;
        try {
            const fs::path dir(e.dir);
            const auto opt_path = [&](const char* file) -> std::optional<std::string> {
                const auto p = dir / file;
                if (fs::exists(p)) return p.string();
                return std::nullopt;
            };
            out.report = compare_documents((dir / "ref.png").string(), (dir / "test.png").string(),
                                           cfg, opt_path("ref.hocr"), opt_path("test.hocr"));
            const GroundTruth truth =
                truth_from_json(json::parse(detail::read_text_file((dir / "truth.json").string())));
            out.eval = match_report(out.report, truth, iou_threshold);
            out.ok = true;
        } catch (const std::exception& ex) {
            out.error = ex.what();
        }
    });
    detail::aggregate_outcomes(result);
    return result;
}

namespace detail {

inline void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("short write to " + tmp);
    }
    fs::rename(tmp, path);
}

}  // namespace detail

/// Write a corpus to disk in the layout the evaluate command reads:
/// one subdirectory per pair plus an index with category labels.
inline void materialize_corpus(const std::vector<CorpusPair>& corpus, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    json index;
    index["pairs"] = json::array();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& entry = corpus[i];
        const SynthPair pair = generate_pair(entry.spec);
        const fs::path dir = fs::path(out_dir) / entry.name;
        fs::create_directories(dir);
        const std::string ref_tmp = (dir / "ref.png.tmp").string();
        save_png(pair.ref_img, ref_tmp);
        fs::rename(ref_tmp, dir / "ref.png");
        const std::string test_tmp = (dir / "test.png.tmp").string();
        save_png(pair.test_img, test_tmp);
        fs::rename(test_tmp, dir / "test.png");
        detail::write_file_atomic((dir / "ref.hocr").string(), pair.ref_hocr);
        detail::write_file_atomic((dir / "test.hocr").string(), pair.test_hocr);
        detail::write_file_atomic((dir / "truth.json").string(), truth_to_json(pair.truth).dump(2) + "\n");
        index["pairs"].push_back({{"dir", entry.name}, {"category", entry.category}});
    }
    detail::write_file_atomic((fs::path(out_dir) / "index.json").string(), index.dump(2) + "\n");
}

inline std::string experiment_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "category,pairs,tp,fp,fn,precision,recall\n";
    const auto row = [&out](const std::string& name, int pairs, const EvalResult& e) {
        out << name << ',' << pairs << ',' << e.tp << ',' << e.fp << ',' << e.fn << ','
            << e.precision << ',' << e.recall << '\n';
    };
    for (const auto& cat : result.by_category()) row(cat.category, cat.pairs, cat.eval);
    row("all", static_cast<int>(result.pairs.size()), result.aggregate);
    return out.str();
}

inline json experiment_json(const ExperimentResult& result) {
    json j;
    j["aggregate"] = {{"tp", result.aggregate.tp},     {"fp", result.aggregate.fp},
                      {"fn", result.aggregate.fn},     {"precision", result.aggregate.precision},
                      {"recall", result.aggregate.recall}};
    j["pairs"] = json::array();
    for (const auto& p : result.pairs) {
        json e;
        e["name"] = p.name;
        e["category"] = p.category;
        e["ok"] = p.ok;
        if (p.ok) {
            e["tp"] = p.eval.tp;
            e["fp"] = p.eval.fp;
            e["fn"] = p.eval.fn;
            e["precision"] = p.eval.precision;
            e["recall"] = p.eval.recall;
            e["modifications"] = p.report.modifications.size();
        } else {
            e["error"] = p.error;
        }
        j["pairs"].push_back(std::move(e));
    }
    return j;
}

}  // namespace docdiff
