#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "logodm/apriori.hpp"
#include "logodm/error.hpp"
#include "logodm/evaluate.hpp"
#include "logodm/io.hpp"
#include "logodm/mrmr.hpp"
#include "logodm/relation.hpp"
#include "logodm/schema.hpp"
#include "logodm/tree.hpp"

namespace logodm {

inline constexpr const char* kToolName = "logodm";
inline constexpr const char* kToolVersion = "0.1.0";

struct RelationRef {
    std::string name;
    std::filesystem::path csv;
    std::filesystem::path schema;
};

/// Everything one end-to-end run needs. Paths from the config file resolve
/// relative to the file's own directory.
struct PipelineConfig {
    std::vector<RelationRef> relations;
    ProjectionList projection;
    ImputePolicy impute = ImputePolicy::unknown_category;
    int k_features = 1;
    TreeParams tree;
    double min_support = 0.1;
    double min_confidence = 0.7;
    bool include_class = false;
    int folds = 5;
    std::uint64_t seed = 0;
    std::vector<int> k_list;

    void validate() const {
        if (relations.empty()) throw Error(errc::config, "config lists no relations");
        if (projection.empty()) throw Error(errc::config, "config has an empty projection");
        if (k_features < 1) throw Error(errc::config, "k_features must be >= 1");
        tree.validate();
        if (!(min_support > 0.0) || min_support > 1.0)
            throw Error(errc::config, "min_support must lie in (0, 1]");
        if (!(min_confidence > 0.0) || min_confidence > 1.0)
            throw Error(errc::config, "min_confidence must lie in (0, 1]");
        if (folds < 2) throw Error(errc::config, "folds must be >= 2");
        for (const auto& r : relations) {
            if (!std::filesystem::exists(r.csv))
                throw Error(errc::config, "relation data file does not exist: '" + r.csv.string() + "'");
            if (!std::filesystem::exists(r.schema))
                throw Error(errc::config,
                            "relation schema file does not exist: '" + r.schema.string() + "'");
        }
    }
};

inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j,
                                                const std::filesystem::path& base_dir) {
    PipelineConfig cfg;
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    try {
        if (!j.contains("relations") || !j["relations"].is_array())
            throw Error(errc::config, "config needs a 'relations' array");
        for (const auto& r : j["relations"]) {
            RelationRef ref;
            ref.csv = resolve(r.at("csv").get<std::string>());
            ref.schema = resolve(r.at("schema").get<std::string>());
            ref.name = r.value("name", ref.csv.stem().string());
            cfg.relations.push_back(std::move(ref));
        }
        cfg.projection = j.at("projection").get<std::vector<std::string>>();
        cfg.impute = impute_policy_from_name(j.value("impute", "unknown"));
        cfg.k_features = j.value("k_features", 1);
        if (j.contains("max_depth") && !j["max_depth"].is_null())
            cfg.tree.max_depth = j["max_depth"].get<int>();
        cfg.tree.min_records_per_split = j.value("min_split", 2);
        cfg.min_support = j.value("min_support", 0.1);
        cfg.min_confidence = j.value("min_confidence", 0.7);
        cfg.include_class = j.value("include_class", false);
        cfg.folds = j.value("folds", 5);
        if (!j.contains("seed"))
            throw Error(errc::config, "config needs an explicit 'seed'");
        cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("k_list")) cfg.k_list = j["k_list"].get<std::vector<int>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(errc::config, std::string("pipeline config JSON: ") + e.what());
    }
    return cfg;
}

/// Echo that restates every parameter with defaults materialized; feeding it
/// back through pipeline_config_from_json reproduces the run.
inline nlohmann::json pipeline_config_echo(const PipelineConfig& cfg) {
    nlohmann::json j;
    nlohmann::json rels = nlohmann::json::array();
    for (const auto& r : cfg.relations) {
        nlohmann::json e;
        e["name"] = r.name;
        e["csv"] = r.csv.string();
        e["schema"] = r.schema.string();
        rels.push_back(std::move(e));
    }
    j["relations"] = std::move(rels);
    j["projection"] = cfg.projection;
    j["impute"] = impute_policy_name(cfg.impute);
    j["k_features"] = cfg.k_features;
    if (cfg.tree.max_depth)
        j["max_depth"] = *cfg.tree.max_depth;
    else
        j["max_depth"] = nullptr;
    j["min_split"] = cfg.tree.min_records_per_split;
    j["min_support"] = cfg.min_support;
    j["min_confidence"] = cfg.min_confidence;
    j["include_class"] = cfg.include_class;
    j["folds"] = cfg.folds;
    j["seed"] = cfg.seed;
    j["k_list"] = cfg.k_list;
    return j;
}

struct RunReport {
    nlohmann::json document;  // full report including the timings section

    [[nodiscard]] nlohmann::json without_timings() const {
        nlohmann::json j = document;
        j.erase("timings");
        return j;
    }
};

namespace detail {

class StageClock {
public:
    explicit StageClock(nlohmann::json& sink) : sink_(sink) {}

    template <typename F>
    auto run(const std::string& stage, F&& body) -> decltype(body()) {
        const auto start = std::chrono::steady_clock::now();
        try {
            auto result = body();
            record(stage, start);
            return result;
        } catch (const Error& e) {
            throw Error(e.code(), "stage " + stage + ": " + e.what());
        }
    }

private:
    void record(const std::string& stage, std::chrono::steady_clock::time_point start) {
        const auto end = std::chrono::steady_clock::now();
        sink_[stage] =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(end - start)
                .count();
    }

    nlohmann::json& sink_;
};

}  // namespace detail

/// Executes ingest -> build -> impute -> {select -> train -> evaluate} and
/// {transactions -> itemsets -> rules}, writes report.json / model.json /
/// rules.txt / summary.txt under out_dir, and returns the report.
inline RunReport run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);

    nlohmann::json timings = nlohmann::json::object();
    detail::StageClock clock(timings);

    auto tables = clock.run("ingest", [&] {
        std::vector<Relation> rels;
        for (const auto& ref : cfg.relations)
            rels.push_back(load_relation(ref.name, ref.csv, ref.schema));
        return rels;
    });

    Dataset target = clock.run("build", [&] { return build_target_set(tables, cfg.projection); });
    Dataset prepared = clock.run("impute", [&] { return impute_missing(target, cfg.impute); });

    SelectionTrace trace =
        clock.run("select", [&] { return mrmr_select(prepared, cfg.k_features); });

    Dataset modeling = select_features(prepared, trace.attributes());
    DecisionTree tree = clock.run("train", [&] { return induce_tree(modeling, cfg.tree); });

    auto [rules, n_itemsets] = clock.run("rules", [&] {
        const TransactionSet ts = to_transactions(prepared, cfg.include_class);
        const FrequentItemsetTable table = frequent_itemsets(ts, cfg.min_support);
        return std::make_pair(generate_rules(table, cfg.min_confidence), table.total_itemsets());
    });

    struct EvalOut {
        nlohmann::json confusion;
        nlohmann::json curve;
    };
    EvalOut eval = clock.run("evaluate", [&] {
        EvalOut out;
        out.confusion = evaluate_classifier(modeling, cfg.tree, cfg.folds, cfg.seed).to_json();
        if (!cfg.k_list.empty())
            out.curve =
                error_vs_feature_count(prepared, cfg.k_list, cfg.folds, cfg.seed, cfg.tree)
                    .to_json();
        else
            out.curve = nlohmann::json::array();
        return out;
    });

    RunReport report;
    report.document["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    report.document["config"] = pipeline_config_echo(cfg);
    report.document["dataset"] = {{"records", prepared.size()},
                                  {"attributes", prepared.width()}};
    report.document["selection_trace"] = trace_to_json(trace);
    report.document["model"] = tree.to_json();
    report.document["rules"] = rules_to_json(rules);
    report.document["frequent_itemset_count"] = n_itemsets;
    report.document["confusion_matrix"] = eval.confusion;
    report.document["error_curve"] = eval.curve;
    report.document["timings"] = timings;

    save_text_file(out_dir / "report.json", report.document.dump(2) + "\n");
    save_text_file(out_dir / "model.json", tree.to_json().dump(2) + "\n");
    save_text_file(out_dir / "rules.txt", rules_to_text(rules));

    std::string summary;
    summary += std::string(kToolName) + " " + kToolVersion + " run summary\n\n";
    summary += "records: " + std::to_string(prepared.size()) + "\n";
    summary += "attributes: " + std::to_string(prepared.width()) + "\n\n";
    summary += "selected features (mRMR order):\n";
    for (const auto& s : trace.steps) {
        char line[160];
        std::snprintf(line, sizeof(line), "  %2d. %-28s relevance=%.6f redundancy=%.6f score=%.6f\n",
                      s.rank, s.attribute.c_str(), s.relevance, s.redundancy, s.score);
        summary += line;
    }
    summary += "\nconfusion matrix (rows = true class):\n";
    {
        const auto& cmj = eval.confusion;
        summary += "  labels:";
        for (const auto& l : cmj["labels"]) summary += " " + l.get<std::string>();
        summary += "\n";
        std::size_t li = 0;
        for (const auto& row : cmj["matrix"]) {
            summary += "  " + cmj["labels"][li++].get<std::string>() + ":";
            for (const auto& v : row) summary += " " + std::to_string(v.get<std::size_t>());
            summary += "\n";
        }
        char acc[64];
        std::snprintf(acc, sizeof(acc), "  accuracy: %.4f\n", cmj["accuracy"].get<double>());
        summary += acc;
    }
    if (!eval.curve.empty()) {
        summary += "\nerror vs feature count (k, mean_error, std_error):\n";
        for (const auto& p : eval.curve) {
            char line[96];
            std::snprintf(line, sizeof(line), "  %3d  %.6f  %.6f\n", p["k"].get<int>(),
                          p["mean_error"].get<double>(), p["std_error"].get<double>());
            summary += line;
        }
    }
    summary += "\nassociation rules: " + std::to_string(rules.size()) + " (see rules.txt)\n";
    save_text_file(out_dir / "summary.txt", summary);

    return report;
}

// ---------------------------------------------------------------------------
// Single-case / batch prediction against a saved model
// ---------------------------------------------------------------------------

struct CasePrediction {
    std::string label;
    std::map<std::string, std::size_t> distribution;
    bool used_fallback = false;
};

/// Loads the model and classifies every record of the CSV. The record file's
/// header must match the model schema; the class column may be omitted (its
/// cells are then treated as Missing).
inline std::vector<CasePrediction> predict_case(const std::filesystem::path& model_path,
                                                const std::filesystem::path& record_csv) {
    const DecisionTree tree = DecisionTree::from_json(load_json_file(model_path));
    const DatasetSchema& schema = tree.schema();

    std::ifstream in(record_csv, std::ios::binary);
    if (!in) throw Error(errc::io, "cannot open '" + record_csv.string() + "'");

    // Peek the header to learn whether the class column is present.
    std::vector<std::string> header;
    if (!csv::read_row(in, header)) throw Error(errc::io, "record CSV is empty");
    in.clear();
    in.seekg(0);

    DatasetSchema read_schema = schema;
    auto ci = schema.class_index();
    const bool class_omitted =
        ci && header.size() == schema.attributes.size() - 1;
    if (class_omitted) {
        read_schema.attributes.erase(read_schema.attributes.begin() +
                                     static_cast<std::ptrdiff_t>(*ci));
        read_schema.class_attribute.reset();
    }
    std::vector<Record> records = read_csv_records(in, read_schema);

    std::vector<CasePrediction> out;
    out.reserve(records.size());
    for (auto& rec : records) {
        if (class_omitted)
            rec.insert(rec.begin() + static_cast<std::ptrdiff_t>(*ci), CellValue::missing());
        const PredictionResult r = predict(tree, rec);
        out.push_back({r.label, r.distribution, r.used_fallback});
    }
    return out;
}

}  // namespace logodm
