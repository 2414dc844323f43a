#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "logodm/error.hpp"
#include "logodm/io.hpp"
#include "logodm/mutual_info.hpp"
#include "logodm/schema.hpp"

namespace logodm {

struct TreeParams {
    std::optional<int> max_depth;     // absent = fully grown
    int min_records_per_split = 2;

    void validate() const {
        if (max_depth && *max_depth < 1)
            throw Error(errc::parameter, "max_depth must be a positive integer");
        if (min_records_per_split < 1)
            throw Error(errc::parameter, "min_records_per_split must be >= 1");
    }
};

struct TreeNode {
    bool leaf = true;
    std::string label;  // leaf class, or internal fallback (majority at node)
    std::map<std::string, std::size_t> counts;  // leaf only; omits zero entries
    std::string split_attribute;                // internal only
    std::map<std::string, std::unique_ptr<TreeNode>> branches;
};

struct PredictionResult {
    std::string label;
    std::map<std::string, std::size_t> distribution;
    bool used_fallback = false;
};

namespace detail {

inline void subtree_counts(const TreeNode& node, std::map<std::string, std::size_t>& acc) {
    if (node.leaf) {
        for (const auto& [label, n] : node.counts) acc[label] += n;
        return;
    }
    for (const auto& [value, child] : node.branches) subtree_counts(*child, acc);
}

inline nlohmann::json node_to_json(const TreeNode& node) {
    nlohmann::json j;
    if (node.leaf) {
        j["leaf"] = node.label;
        nlohmann::json counts = nlohmann::json::object();
        for (const auto& [label, n] : node.counts) counts[label] = n;
        j["counts"] = std::move(counts);
        return j;
    }
    j["split"] = node.split_attribute;
    nlohmann::json branches = nlohmann::json::object();
    for (const auto& [value, child] : node.branches) branches[value] = node_to_json(*child);
    j["branches"] = std::move(branches);
    j["fallback"] = node.label;
    return j;
}

inline std::unique_ptr<TreeNode> node_from_json(const nlohmann::json& j) {
    auto node = std::make_unique<TreeNode>();
    if (j.contains("leaf")) {
        node->leaf = true;
        node->label = j.at("leaf").get<std::string>();
        if (j.contains("counts"))
            for (const auto& [label, n] : j.at("counts").items())
                node->counts[label] = n.get<std::size_t>();
        return node;
    }
    node->leaf = false;
    node->split_attribute = j.at("split").get<std::string>();
    node->label = j.at("fallback").get<std::string>();
    for (const auto& [value, sub] : j.at("branches").items())
        node->branches[value] = node_from_json(sub);
    return node;
}

}  // namespace detail

/// Categorical decision tree plus the schema it was induced against.
class DecisionTree {
public:
    DecisionTree() = default;
    DecisionTree(std::unique_ptr<TreeNode> root, DatasetSchema schema)
        : root_(std::move(root)), schema_(std::move(schema)) {}

    [[nodiscard]] const TreeNode& root() const {
        if (!root_) throw Error(errc::parameter, "tree is empty");
        return *root_;
    }
    [[nodiscard]] const DatasetSchema& schema() const { return schema_; }

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema"] = schema_to_json(schema_);
        j["tree"] = detail::node_to_json(root());
        return j;
    }

    static DecisionTree from_json(const nlohmann::json& j) {
        if (!j.contains("schema") || !j.contains("tree"))
            throw Error(errc::io, "model JSON needs 'schema' and 'tree'");
        return DecisionTree(detail::node_from_json(j.at("tree")),
                            schema_from_json(j.at("schema")));
    }

private:
    std::unique_ptr<TreeNode> root_;
    DatasetSchema schema_;
};

/// Class-entropy reduction from partitioning the records by the attribute's
/// values, in bits.
inline double information_gain(const Dataset& ds, const std::string& attribute) {
    auto ci = ds.class_index();
    if (!ci) throw Error(errc::schema_mismatch, "dataset has no class attribute");
    auto ai = ds.schema.index_of(attribute);
    if (!ai) throw Error(errc::schema_mismatch, "no attribute named '" + attribute + "'");
    if (*ai == *ci) throw Error(errc::schema_mismatch, "cannot compute gain on the class attribute");
    if (ds.records.empty()) throw Error(errc::empty_input, "dataset has no records");

    const EncodedDataset enc = EncodedDataset::from(ds);
    const auto& attr = enc.columns[*ai];
    const auto& cls = enc.columns[*ci];
    for (std::size_t r = 0; r < attr.values.size(); ++r)
        if (attr.values[r] < 0 || cls.values[r] < 0)
            throw Error(errc::unimputed_data, "Missing cell in information-gain input");

    // H(class) - H(class | attribute) equals I(attribute; class).
    return mutual_information(attr.values, cls.values, attr.cardinality, cls.cardinality);
}

namespace detail {

struct InductionContext {
    const EncodedDataset* enc;
    const DatasetSchema* schema;
    std::size_t class_col;
    TreeParams params;
};

inline std::string majority_label(const InductionContext& ctx,
                                  const std::vector<std::size_t>& rows,
                                  std::map<std::string, std::size_t>* counts_out) {
    const auto& cls = ctx.enc->columns[ctx.class_col];
    const auto& domain = ctx.schema->attributes[ctx.class_col].domain;
    std::vector<std::size_t> counts(domain.size(), 0);
    for (auto r : rows) counts[static_cast<std::size_t>(cls.values[r])]++;
    // Majority with lexicographically-smallest tie break on the label string.
    std::string best;
    std::size_t best_n = 0;
    for (std::size_t d = 0; d < domain.size(); ++d) {
        if (counts[d] == 0) continue;
        if (counts_out) (*counts_out)[domain[d]] = counts[d];
        if (counts[d] > best_n || (counts[d] == best_n && domain[d] < best)) {
            best = domain[d];
            best_n = counts[d];
        }
    }
    return best;
}

inline double split_gain(const InductionContext& ctx, const std::vector<std::size_t>& rows,
                         std::size_t attr_col) {
    const auto& attr = ctx.enc->columns[attr_col];
    const auto& cls = ctx.enc->columns[ctx.class_col];
    ContingencyTable t(static_cast<std::size_t>(attr.cardinality),
                       static_cast<std::size_t>(cls.cardinality));
    for (auto r : rows)
        t.add(static_cast<std::size_t>(attr.values[r]), static_cast<std::size_t>(cls.values[r]));
    return mutual_information(t);
}

inline std::unique_ptr<TreeNode> induce_node(const InductionContext& ctx,
                                             const std::vector<std::size_t>& rows,
                                             std::vector<std::size_t> available, int depth) {
    auto node = std::make_unique<TreeNode>();
    node->label = majority_label(ctx, rows, &node->counts);

    const auto& cls = ctx.enc->columns[ctx.class_col];
    bool pure = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (cls.values[rows[i]] != cls.values[rows[0]]) {
            pure = false;
            break;
        }
    const bool depth_capped = ctx.params.max_depth && depth >= *ctx.params.max_depth;
    const bool too_small = rows.size() < static_cast<std::size_t>(ctx.params.min_records_per_split);
    if (pure || available.empty() || depth_capped || too_small) return node;  // leaf

    // Split on the maximum-gain attribute; ties go to the smaller name.
    std::size_t best_col = 0;
    double best_gain = -1.0;
    std::string best_name;
    for (auto col : available) {
        const double g = split_gain(ctx, rows, col);
        const std::string& name = ctx.enc->columns[col].name;
        if (g > best_gain || (g == best_gain && name < best_name)) {
            best_gain = g;
            best_col = col;
            best_name = name;
        }
    }

    node->leaf = false;
    node->split_attribute = best_name;
    node->counts.clear();
    std::vector<std::size_t> remaining;
    remaining.reserve(available.size() - 1);
    for (auto col : available)
        if (col != best_col) remaining.push_back(col);

    const auto& attr = ctx.enc->columns[best_col];
    const auto& domain = ctx.schema->attributes[best_col].domain;
    std::vector<std::vector<std::size_t>> partitions(domain.size());
    for (auto r : rows) partitions[static_cast<std::size_t>(attr.values[r])].push_back(r);
    for (std::size_t d = 0; d < domain.size(); ++d) {
        if (partitions[d].empty()) {
            // Zero-record child: leaf carrying the parent's majority class.
            auto child = std::make_unique<TreeNode>();
            child->label = node->label;
            node->branches[domain[d]] = std::move(child);
        } else {
            node->branches[domain[d]] = induce_node(ctx, partitions[d], remaining, depth + 1);
        }
    }
    return node;
}

}  // namespace detail

/// Recursive top-down induction with information-gain splits over the
/// attribute's declared domain. Deterministic: all tie-breaks lexicographic.
inline DecisionTree induce_tree(const Dataset& ds, const TreeParams& params = {}) {
    params.validate();
    if (ds.records.empty()) throw Error(errc::empty_input, "cannot induce a tree from no records");
    auto ci = ds.class_index();
    if (!ci) throw Error(errc::schema_mismatch, "dataset has no class attribute");
    if (ds.has_missing())
        throw Error(errc::unimputed_data, "dataset contains Missing cells; impute first");

    detail::InductionContext ctx{nullptr, &ds.schema, *ci, params};
    const EncodedDataset enc = EncodedDataset::from(ds);
    ctx.enc = &enc;

    std::vector<std::size_t> rows(ds.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::vector<std::size_t> available;
    for (std::size_t i = 0; i < enc.columns.size(); ++i)
        if (i != *ci) available.push_back(i);

    return DecisionTree(detail::induce_node(ctx, rows, std::move(available), 0), ds.schema);
}

/// Routes the record down the tree. A Missing cell or a value with no branch
/// stops at that node and yields its fallback class with the aggregated
/// distribution of the subtree.
inline PredictionResult predict(const DecisionTree& tree, const Record& record) {
    const DatasetSchema& schema = tree.schema();
    auto verdict = validate_record(record, schema);
    if (!verdict.ok()) {
        const auto& v = verdict.violations.front();
        throw Error(errc::schema_mismatch,
                    "record does not match the model schema (attribute '" + v.attribute +
                        "': " + v.reason + ")");
    }
    const TreeNode* node = &tree.root();
    while (!node->leaf) {
        auto ai = schema.index_of(node->split_attribute);
        if (!ai)
            throw Error(errc::schema_mismatch,
                        "model splits on unknown attribute '" + node->split_attribute + "'");
        const CellValue& cell = record[*ai];
        if (cell.is_missing()) break;
        auto it = node->branches.find(cell.category_name());
        if (it == node->branches.end()) break;
        node = it->second.get();
    }
    PredictionResult out;
    out.label = node->label;
    out.used_fallback = !node->leaf;
    if (node->leaf)
        out.distribution = node->counts;
    else
        detail::subtree_counts(*node, out.distribution);
    return out;
}

}  // namespace logodm
