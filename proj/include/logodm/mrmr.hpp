#pragma once

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "logodm/error.hpp"
#include "logodm/mutual_info.hpp"
#include "logodm/schema.hpp"

namespace logodm {

struct SelectionStep {
    int rank = 0;  // 1-based
    std::string attribute;
    double relevance = 0.0;   // I(candidate; class), bits
    double redundancy = 0.0;  // mean I(candidate; selected), bits
    double score = 0.0;       // relevance - redundancy (MID form)
};

struct SelectionTrace {
    std::vector<SelectionStep> steps;

    [[nodiscard]] std::vector<std::string> attributes() const {
        std::vector<std::string> out;
        out.reserve(steps.size());
        for (const auto& s : steps) out.push_back(s.attribute);
        return out;
    }
};

inline nlohmann::json trace_to_json(const SelectionTrace& trace) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : trace.steps) {
        nlohmann::json j;
        j["rank"] = s.rank;
        j["attribute"] = s.attribute;
        j["relevance"] = s.relevance;
        j["redundancy"] = s.redundancy;
        j["score"] = s.score;
        out.push_back(std::move(j));
    }
    return out;
}

/// I(candidate; class) in bits.
inline double relevance(const Dataset& ds, const std::string& candidate) {
    if (!ds.schema.class_attribute)
        throw Error(errc::schema_mismatch, "dataset has no class attribute");
    return mutual_information(ds, candidate, *ds.schema.class_attribute);
}

/// Mean pairwise I(candidate; s) over the selected set; 0 when empty.
inline double redundancy(const Dataset& ds, const std::string& candidate,
                         const std::vector<std::string>& selected) {
    if (selected.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& s : selected) sum += mutual_information(ds, candidate, s);
    return sum / static_cast<double>(selected.size());
}

/// Greedy forward mRMR selection (MID criterion: relevance minus mean
/// redundancy). Step 1 maximizes relevance alone; ties break to the
/// lexicographically smallest attribute name. Stops after k picks or when
/// candidates run out.
inline SelectionTrace mrmr_select(const Dataset& ds, int k) {
    if (k < 1) throw Error(errc::parameter, "k must be >= 1, got " + std::to_string(k));
    auto ci = ds.class_index();
    if (!ci) throw Error(errc::schema_mismatch, "dataset has no class attribute");
    if (ds.records.empty()) throw Error(errc::empty_input, "dataset has no records");

    const EncodedDataset enc = EncodedDataset::from(ds);
    const EncodedColumn& cls = enc.columns[*ci];

    // Candidate order: lexicographic by name, so strict-greater comparisons
    // resolve score ties toward the smaller name.
    struct Candidate {
        std::size_t col;
        double relevance;
        double redundancy_sum;
        bool taken;
    };
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < enc.columns.size(); ++i)
        if (i != *ci) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return enc.columns[a].name < enc.columns[b].name;
    });

    std::vector<Candidate> cands;
    cands.reserve(order.size());
    for (auto col : order) {
        const auto& c = enc.columns[col];
        cands.push_back({col, mutual_information(c.values, cls.values, c.cardinality,
                                                 cls.cardinality),
                         0.0, false});
    }

    SelectionTrace trace;
    const int target = std::min<int>(k, static_cast<int>(cands.size()));
    for (int step = 0; step < target; ++step) {
        const double selected_n = static_cast<double>(step);
        int best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (cands[i].taken) continue;
            const double red = step == 0 ? 0.0 : cands[i].redundancy_sum / selected_n;
            const double score = cands[i].relevance - red;
            if (score > best_score) {
                best_score = score;
                best = static_cast<int>(i);
            }
        }
        Candidate& pick = cands[static_cast<std::size_t>(best)];
        pick.taken = true;
        const double red = step == 0 ? 0.0 : pick.redundancy_sum / selected_n;
        trace.steps.push_back({step + 1, enc.columns[pick.col].name, pick.relevance, red,
                               pick.relevance - red});
        // Fold the new pick into every remaining candidate's redundancy sum.
        const EncodedColumn& picked_col = enc.columns[pick.col];
        for (auto& c : cands) {
            if (c.taken) continue;
            const EncodedColumn& cc = enc.columns[c.col];
            c.redundancy_sum += mutual_information(cc.values, picked_col.values, cc.cardinality,
                                                   picked_col.cardinality);
        }
    }
    return trace;
}

}  // namespace logodm
