#pragma once

#include <string>
#include <vector>

#include "docdiff/diff.hpp"

namespace docdiff {

enum class Side { Ref, Test };

inline std::string to_string(Side s) { return s == Side::Ref ? "ref" : "test"; }

inline Side side_from_string(const std::string& s) {
    if (s == "ref") return Side::Ref;
    if (s == "test") return Side::Test;
    throw std::invalid_argument("side must be 'ref' or 'test'");
}

struct TruthEntry {
    Box box;
    ModificationKind kind = ModificationKind::WordChanged;
    Side side = Side::Test;
};

/// Word-level ground truth for one document pair. `page` refers to the test
/// image; ref-side entries live on the reference page.
struct GroundTruth {
    std::vector<TruthEntry> entries;
    int page_width = 0;
    int page_height = 0;
};

inline json truth_to_json(const GroundTruth& t) {
    json j;
    j["page"] = {t.page_width, t.page_height};
    j["entries"] = json::array();
    for (const auto& e : t.entries) {
        j["entries"].push_back({{"box", {e.box.x, e.box.y, e.box.w, e.box.h}},
                                {"kind", to_string(e.kind)},
                                {"side", to_string(e.side)}});
    }
    return j;
}

inline GroundTruth truth_from_json(const json& j) {
    GroundTruth t;
    t.page_width = j.at("page")[0].get<int>();
    t.page_height = j.at("page")[1].get<int>();
    for (const auto& e : j.at("entries")) {
        TruthEntry entry;
        const auto& b = e.at("box");
        entry.box = Box{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
        entry.kind = modification_kind_from_string(e.at("kind").get<std::string>());
        entry.side = side_from_string(e.at("side").get<std::string>());
        t.entries.push_back(entry);
    }
    return t;
}

}  // namespace docdiff
