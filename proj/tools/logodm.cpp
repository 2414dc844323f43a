// Command-line front end for the logodm pipeline: synthetic data generation,
// target-set construction, feature selection, tree induction, rule mining,
// evaluation, the full end-to-end run, and case prediction.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "logodm/apriori.hpp"
#include "logodm/evaluate.hpp"
#include "logodm/io.hpp"
#include "logodm/mrmr.hpp"
#include "logodm/pipeline.hpp"
#include "logodm/relation.hpp"
#include "logodm/synth.hpp"
#include "logodm/tree.hpp"

namespace {

using logodm::Error;

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw Error(logodm::errc::parameter, "'" + tok + "' is not an integer");
        }
    }
    if (out.empty()) throw Error(logodm::errc::parameter, "empty integer list");
    return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

// "data.csv:schema.json" pairs for --relation.
logodm::RelationRef parse_relation_arg(const std::string& arg) {
    const auto pos = arg.rfind(':');
    if (pos == std::string::npos || pos == 0 || pos + 1 == arg.size())
        throw Error(logodm::errc::parameter,
                    "--relation expects 'data.csv:schema.json', got '" + arg + "'");
    logodm::RelationRef ref;
    ref.csv = arg.substr(0, pos);
    ref.schema = arg.substr(pos + 1);
    ref.name = ref.csv.stem().string();
    return ref;
}

logodm::Dataset load_data(const std::string& csv, const std::string& schema) {
    return logodm::load_dataset(csv, schema);
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    logodm::save_text_file(path, j.dump(2) + "\n");
}

int cmd_generate(const std::string& spec_path, const std::string& out_csv,
                 const std::string& out_schema, const std::string& out_manifest) {
    const auto spec = logodm::generator_spec_from_json(logodm::load_json_file(spec_path));
    auto generated = logodm::generate_dataset(spec);
    logodm::save_dataset(generated.dataset, out_csv, out_schema);
    if (!out_manifest.empty()) write_json_file(out_manifest, generated.manifest);
    std::cout << "generated " << generated.dataset.size() << " records, "
              << generated.dataset.width() << " attributes\n";
    return 0;
}

int cmd_build(const std::vector<std::string>& relation_args, const std::string& projection,
              const std::string& impute, const std::string& out_csv,
              const std::string& out_schema) {
    std::vector<logodm::Relation> tables;
    for (const auto& arg : relation_args) {
        const auto ref = parse_relation_arg(arg);
        tables.push_back(logodm::load_relation(ref.name, ref.csv, ref.schema));
    }
    logodm::Dataset target = logodm::build_target_set(tables, parse_name_list(projection));
    if (!impute.empty())
        target = logodm::impute_missing(target, logodm::impute_policy_from_name(impute));
    logodm::save_dataset(target, out_csv, out_schema);
    std::cout << "target set: " << target.size() << " records, " << target.width()
              << " attributes\n";
    return 0;
}

int cmd_select(const std::string& csv, const std::string& schema, int k,
               const std::string& out) {
    const auto ds = load_data(csv, schema);
    const auto trace = logodm::mrmr_select(ds, k);
    const auto j = logodm::trace_to_json(trace);
    if (out.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_json_file(out, j);
    return 0;
}

int cmd_train(const std::string& csv, const std::string& schema, int max_depth, int min_split,
              const std::string& out) {
    const auto ds = load_data(csv, schema);
    logodm::TreeParams params;
    if (max_depth > 0) params.max_depth = max_depth;
    params.min_records_per_split = min_split;
    const auto tree = logodm::induce_tree(ds, params);
    write_json_file(out, tree.to_json());
    std::cout << "model written to " << out << "\n";
    return 0;
}

int cmd_rules(const std::string& csv, const std::string& schema, double min_support,
              double min_confidence, bool include_class, const std::string& out,
              const std::string& text_out) {
    const auto ds = load_data(csv, schema);
    const auto ts = logodm::to_transactions(ds, include_class);
    const auto table = logodm::frequent_itemsets(ts, min_support);
    const auto rules = logodm::generate_rules(table, min_confidence);
    const auto j = logodm::rules_to_json(rules);
    if (out.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_json_file(out, j);
    if (!text_out.empty()) logodm::save_text_file(text_out, logodm::rules_to_text(rules));
    std::cout << rules.size() << " rules from " << table.total_itemsets()
              << " frequent itemsets\n";
    return 0;
}

int cmd_evaluate(const std::string& csv, const std::string& schema, int folds,
                 std::uint64_t seed, const std::string& k_list, int max_depth, int min_split,
                 const std::string& out, const std::string& text_out) {
    const auto ds = load_data(csv, schema);
    logodm::TreeParams params;
    if (max_depth > 0) params.max_depth = max_depth;
    params.min_records_per_split = min_split;

    nlohmann::json report;
    report["confusion_matrix"] =
        logodm::evaluate_classifier(ds, params, folds, seed).to_json();
    std::string curve_text = "k\tmean_error\tstd_error\n";
    if (!k_list.empty()) {
        const auto curve =
            logodm::error_vs_feature_count(ds, parse_int_list(k_list), folds, seed, params);
        report["error_curve"] = curve.to_json();
        for (const auto& p : curve.points) {
            char line[96];
            std::snprintf(line, sizeof(line), "%d\t%.6f\t%.6f\n", p.k, p.mean_error, p.std_error);
            curve_text += line;
        }
    } else {
        report["error_curve"] = nlohmann::json::array();
    }
    if (out.empty())
        std::cout << report.dump(2) << "\n";
    else
        write_json_file(out, report);
    if (!text_out.empty())
        logodm::save_text_file(text_out, curve_text);
    else if (!out.empty())
        std::cout << curve_text;
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    const std::filesystem::path cfg_path(config_path);
    const auto cfg = logodm::pipeline_config_from_json(
        logodm::load_json_file(cfg_path),
        cfg_path.has_parent_path() ? cfg_path.parent_path() : std::filesystem::path("."));
    logodm::run_pipeline(cfg, out_dir);
    std::cout << "report written to " << (std::filesystem::path(out_dir) / "report.json").string()
              << "\n";
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& record_path) {
    const auto predictions = logodm::predict_case(model_path, record_path);
    for (const auto& p : predictions) {
        std::cout << p.label << "\t{";
        bool first = true;
        for (const auto& [label, n] : p.distribution) {
            if (!first) std::cout << ", ";
            std::cout << label << ": " << n;
            first = false;
        }
        std::cout << "}";
        if (p.used_fallback) std::cout << "\t(fallback)";
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"logodm: categorical data-mining pipeline (decision trees, mRMR, Apriori)"};
    app.require_subcommand(1);

    // generate
    std::string g_spec, g_out, g_schema, g_manifest;
    auto* generate = app.add_subcommand("generate", "Generate a synthetic dataset");
    generate->add_option("--spec", g_spec, "generator spec JSON")->required();
    generate->add_option("--out", g_out, "output CSV path")->required();
    generate->add_option("--schema", g_schema, "output schema JSON path")->required();
    generate->add_option("--manifest", g_manifest, "ground-truth manifest JSON path");

    // build
    std::vector<std::string> b_relations;
    std::string b_projection, b_impute, b_out, b_out_schema;
    auto* build = app.add_subcommand("build", "Join relations and build the target dataset");
    build->add_option("--relation", b_relations, "data.csv:schema.json (repeatable)")->required();
    build->add_option("--project", b_projection, "comma-separated projection list")->required();
    build->add_option("--impute", b_impute, "imputation policy: unknown|class-mode|drop");
    build->add_option("--out", b_out, "output CSV path")->required();
    build->add_option("--out-schema", b_out_schema, "output schema JSON path")->required();

    // select
    std::string s_csv, s_schema, s_out;
    int s_k = 1;
    auto* select = app.add_subcommand("select", "mRMR feature selection");
    select->add_option("--data", s_csv, "dataset CSV")->required();
    select->add_option("--schema", s_schema, "dataset schema JSON")->required();
    select->add_option("--k-features", s_k, "number of features to select")->required();
    select->add_option("--out", s_out, "trace JSON output (default: stdout)");

    // train
    std::string t_csv, t_schema, t_out;
    int t_max_depth = 0, t_min_split = 2;
    auto* train = app.add_subcommand("train", "Induce a decision tree");
    train->add_option("--data", t_csv, "dataset CSV")->required();
    train->add_option("--schema", t_schema, "dataset schema JSON")->required();
    train->add_option("--max-depth", t_max_depth, "depth cap (0 = fully grown)");
    train->add_option("--min-split", t_min_split, "minimum records to split a node");
    train->add_option("--out", t_out, "model JSON output")->required();

    // rules
    std::string r_csv, r_schema, r_out, r_text;
    double r_sup = 0.1, r_conf = 0.7;
    bool r_include_class = false;
    auto* rules = app.add_subcommand("rules", "Mine association rules with Apriori");
    rules->add_option("--data", r_csv, "dataset CSV")->required();
    rules->add_option("--schema", r_schema, "dataset schema JSON")->required();
    rules->add_option("--min-support", r_sup, "minimum support fraction");
    rules->add_option("--min-confidence", r_conf, "minimum confidence fraction");
    rules->add_flag("--include-class", r_include_class, "include the class attribute as items");
    rules->add_option("--out", r_out, "rules JSON output (default: stdout)");
    rules->add_option("--text", r_text, "human-readable rule table output");

    // evaluate
    std::string e_csv, e_schema, e_klist, e_out, e_text;
    int e_folds = 5, e_max_depth = 0, e_min_split = 2;
    std::uint64_t e_seed = 0;
    auto* evaluate = app.add_subcommand("evaluate", "Cross-validate and trace the error curve");
    evaluate->add_option("--data", e_csv, "dataset CSV")->required();
    evaluate->add_option("--schema", e_schema, "dataset schema JSON")->required();
    evaluate->add_option("--folds", e_folds, "stratified fold count");
    evaluate->add_option("--seed", e_seed, "shuffle seed")->required();
    evaluate->add_option("--k-list", e_klist, "comma-separated feature counts, e.g. 1,2,3");
    evaluate->add_option("--max-depth", e_max_depth, "depth cap (0 = fully grown)");
    evaluate->add_option("--min-split", e_min_split, "minimum records to split a node");
    evaluate->add_option("--out", e_out, "report JSON output (default: stdout)");
    evaluate->add_option("--text", e_text, "plain-text curve table output");

    // run
    std::string run_config, run_out_dir;
    auto* run = app.add_subcommand("run", "Execute the full pipeline from a config file");
    run->add_option("--config", run_config, "pipeline config JSON")->required();
    run->add_option("--out-dir", run_out_dir, "output directory")->required();

    // predict
    std::string p_model, p_record;
    auto* predict = app.add_subcommand("predict", "Classify records with a saved model");
    predict->add_option("--model", p_model, "model JSON path")->required();
    predict->add_option("--record", p_record, "record CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(g_spec, g_out, g_schema, g_manifest);
        if (build->parsed()) return cmd_build(b_relations, b_projection, b_impute, b_out, b_out_schema);
        if (select->parsed()) return cmd_select(s_csv, s_schema, s_k, s_out);
        if (train->parsed()) return cmd_train(t_csv, t_schema, t_max_depth, t_min_split, t_out);
        if (rules->parsed())
            return cmd_rules(r_csv, r_schema, r_sup, r_conf, r_include_class, r_out, r_text);
        if (evaluate->parsed())
            return cmd_evaluate(e_csv, e_schema, e_folds, e_seed, e_klist, e_max_depth,
                                e_min_split, e_out, e_text);
        if (run->parsed()) return cmd_run(run_config, run_out_dir);
        if (predict->parsed()) return cmd_predict(p_model, p_record);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
