#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "logodm/error.hpp"
#include "logodm/mrmr.hpp"
#include "logodm/rng.hpp"
#include "logodm/schema.hpp"
#include "logodm/tree.hpp"

namespace logodm {

struct FoldSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Square count matrix over the class domain, rows = true class,
/// columns = predicted class.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::vector<std::string> labels)
        : labels_(std::move(labels)), cells_(labels_.size() * labels_.size(), 0) {}

    void add(const std::string& truth, const std::string& predicted, std::size_t count = 1) {
        cells_.at(index_of(truth) * labels_.size() + index_of(predicted)) += count;
        total_ += count;
    }

    [[nodiscard]] std::size_t count(const std::string& truth, const std::string& predicted) const {
        return cells_.at(index_of(truth) * labels_.size() + index_of(predicted));
    }
    [[nodiscard]] std::size_t total() const noexcept { return total_; }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }

    [[nodiscard]] std::size_t true_count(const std::string& label) const {
        std::size_t s = 0;
        for (const auto& p : labels_) s += count(label, p);
        return s;
    }

    [[nodiscard]] double accuracy() const {
        if (total_ == 0) return 0.0;
        std::size_t diag = 0;
        for (const auto& l : labels_) diag += count(l, l);
        return static_cast<double>(diag) / static_cast<double>(total_);
    }

    [[nodiscard]] double recall(const std::string& label) const {
        const std::size_t row = true_count(label);
        if (row == 0) return 0.0;
        return static_cast<double>(count(label, label)) / static_cast<double>(row);
    }

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["labels"] = labels_;
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& t : labels_) {
            nlohmann::json row = nlohmann::json::array();
            for (const auto& p : labels_) row.push_back(count(t, p));
            rows.push_back(std::move(row));
        }
        j["matrix"] = std::move(rows);
        j["total"] = total_;
        j["accuracy"] = accuracy();
        nlohmann::json rec = nlohmann::json::object();
        for (const auto& l : labels_) rec[l] = recall(l);
        j["recall"] = std::move(rec);
        return j;
    }

private:
    [[nodiscard]] std::size_t index_of(const std::string& label) const {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == label) return i;
        throw Error(errc::parameter, "label '" + label + "' not in the class domain");
    }

    std::vector<std::string> labels_;
    std::vector<std::size_t> cells_;
    std::size_t total_ = 0;
};

/// Disjoint, exhaustive stratified partitions. Indices of each class are
/// shuffled with the seeded stream (classes visited in domain order) and
/// dealt round-robin, so per-class counts across folds differ by at most 1.
inline std::vector<FoldSplit> stratified_kfold(const Dataset& ds, int folds, std::uint64_t seed) {
    if (folds < 2) throw Error(errc::parameter, "folds must be >= 2");
    auto ci = ds.class_index();
    if (!ci) throw Error(errc::schema_mismatch, "dataset has no class attribute");

    const auto& domain = ds.schema.attributes[*ci].domain;
    std::vector<std::vector<std::size_t>> strata(domain.size());
    for (std::size_t r = 0; r < ds.records.size(); ++r) {
        const CellValue& c = ds.records[r][*ci];
        if (c.is_missing())
            throw Error(errc::unimputed_data, "record " + std::to_string(r) + " has no class label");
        for (std::size_t d = 0; d < domain.size(); ++d)
            if (domain[d] == c.category_name()) {
                strata[d].push_back(r);
                break;
            }
    }
    for (std::size_t d = 0; d < domain.size(); ++d)
        if (strata[d].size() < static_cast<std::size_t>(folds))
            throw Error(errc::insufficient_data,
                        "class '" + domain[d] + "' has " + std::to_string(strata[d].size()) +
                            " records, fewer than " + std::to_string(folds) + " folds");

    SplitMix64 rng(seed);
    std::vector<std::vector<std::size_t>> fold_members(static_cast<std::size_t>(folds));
    for (auto& stratum : strata) {
        rng.shuffle(stratum);
        for (std::size_t i = 0; i < stratum.size(); ++i)
            fold_members[i % static_cast<std::size_t>(folds)].push_back(stratum[i]);
    }

    std::vector<FoldSplit> out(static_cast<std::size_t>(folds));
    for (std::size_t f = 0; f < out.size(); ++f) {
        out[f].test = fold_members[f];
        std::sort(out[f].test.begin(), out[f].test.end());
        for (std::size_t g = 0; g < out.size(); ++g)
            if (g != f)
                out[f].train.insert(out[f].train.end(), fold_members[g].begin(),
                                    fold_members[g].end());
        std::sort(out[f].train.begin(), out[f].train.end());
    }
    return out;
}

/// Pooled confusion matrix over k folds: induce on each train split, predict
/// its test split, accumulate.
inline ConfusionMatrix evaluate_classifier(const Dataset& ds, const TreeParams& params, int folds,
                                           std::uint64_t seed) {
    auto ci = ds.class_index();
    if (!ci) throw Error(errc::schema_mismatch, "dataset has no class attribute");
    ConfusionMatrix cm(ds.schema.attributes[*ci].domain);
    for (const auto& split : stratified_kfold(ds, folds, seed)) {
        const DecisionTree tree = induce_tree(subset_records(ds, split.train), params);
        for (auto r : split.test) {
            const auto result = predict(tree, ds.records[r]);
            cm.add(ds.records[r][*ci].category_name(), result.label);
        }
    }
    return cm;
}

struct ErrorCurvePoint {
    int k = 0;
    double mean_error = 0.0;
    double std_error = 0.0;  // population standard deviation across folds
};

struct ErrorCurve {
    std::vector<ErrorCurvePoint> points;

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& p : points) {
            nlohmann::json j;
            j["k"] = p.k;
            j["mean_error"] = p.mean_error;
            j["std_error"] = p.std_error;
            out.push_back(std::move(j));
        }
        return out;
    }
};

struct FoldCurve {
    SelectionTrace trace;           // mRMR trace computed on the train split only
    std::vector<double> errors;     // test error per requested k
};

/// Per-fold body of the error-versus-feature-count experiment. Selection and
/// induction see only the train split; greedy selection is incremental, so
/// one trace at max(k) yields every prefix.
inline FoldCurve curve_on_split(const Dataset& train, const Dataset& test,
                                const std::vector<int>& k_values, const TreeParams& params) {
    if (k_values.empty()) throw Error(errc::parameter, "k_values is empty");
    const int k_max = *std::max_element(k_values.begin(), k_values.end());
    FoldCurve out;
    out.trace = mrmr_select(train, k_max);
    auto ci = train.class_index();
    const auto picked = out.trace.attributes();
    for (int k : k_values) {
        std::vector<std::string> feats(picked.begin(),
                                       picked.begin() + std::min<std::size_t>(
                                                            static_cast<std::size_t>(k), picked.size()));
        const DecisionTree tree = induce_tree(select_features(train, feats), params);
        std::size_t wrong = 0;
        for (const auto& rec : test.records) {
            Record projected;
            projected.reserve(feats.size() + 1);
            for (const auto& a : tree.schema().attributes)
                projected.push_back(rec[*test.schema.index_of(a.name)]);
            if (predict(tree, projected).label != rec[*ci].category_name()) ++wrong;
        }
        out.errors.push_back(test.records.empty()
                                 ? 0.0
                                 : static_cast<double>(wrong) /
                                       static_cast<double>(test.records.size()));
    }
    return out;
}

/// Mean and spread of the per-fold test error as a function of how many
/// mRMR-selected features the tree may use. Selection runs inside each fold.
inline ErrorCurve error_vs_feature_count(const Dataset& ds, const std::vector<int>& k_values,
                                         int folds, std::uint64_t seed,
                                         const TreeParams& params = {}) {
    if (k_values.empty()) throw Error(errc::parameter, "k_values is empty");
    auto ci = ds.class_index();
    if (!ci) throw Error(errc::schema_mismatch, "dataset has no class attribute");
    const int n_features = static_cast<int>(ds.width()) - 1;
    std::vector<int> ks = k_values;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    if (ks.front() < 1) throw Error(errc::parameter, "feature counts must be >= 1");
    if (ks.back() > n_features)
        throw Error(errc::parameter, "feature count " + std::to_string(ks.back()) +
                                         " exceeds the " + std::to_string(n_features) +
                                         " available attributes");

    const auto splits = stratified_kfold(ds, folds, seed);
    std::vector<std::vector<double>> per_fold;  // [fold][k index]
    for (const auto& split : splits) {
        per_fold.push_back(curve_on_split(subset_records(ds, split.train),
                                          subset_records(ds, split.test), ks, params)
                               .errors);
    }

    ErrorCurve curve;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        double mean = 0.0;
        for (const auto& f : per_fold) mean += f[i];
        mean /= static_cast<double>(per_fold.size());
        double var = 0.0;
        for (const auto& f : per_fold) var += (f[i] - mean) * (f[i] - mean);
        var /= static_cast<double>(per_fold.size());
        curve.points.push_back({ks[i], mean, std::sqrt(var)});
    }
    return curve;
}

}  // namespace logodm
