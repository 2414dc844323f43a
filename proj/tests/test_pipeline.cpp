#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "logodm/pipeline.hpp"
#include "logodm/synth.hpp"
#include "oracles.hpp"

using namespace logodm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

/// Splits a generated dataset into two relations joined over a record id, so
/// the pipeline exercises join + projection end to end.
void write_split_relations(const Dataset& ds, const fs::path& dir) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "c%03zu", i);
        ids.emplace_back(buf);
    }
    const auto id_attr = oracle::categorical("child_id", ids);

    const std::size_t half = (ds.width() - 1) / 2;

    Dataset left;
    left.schema.attributes.push_back(id_attr);
    for (std::size_t a = 0; a < half; ++a)
        left.schema.attributes.push_back(ds.schema.attributes[a]);
    Dataset right;
    right.schema.attributes.push_back(id_attr);
    for (std::size_t a = half; a < ds.width(); ++a)
        right.schema.attributes.push_back(ds.schema.attributes[a]);
    right.schema.class_attribute = ds.schema.class_attribute;

    for (std::size_t i = 0; i < ds.size(); ++i) {
        Record l{CellValue::category(ids[i])};
        for (std::size_t a = 0; a < half; ++a) l.push_back(ds.records[i][a]);
        left.records.push_back(std::move(l));
        Record r{CellValue::category(ids[i])};
        for (std::size_t a = half; a < ds.width(); ++a) r.push_back(ds.records[i][a]);
        right.records.push_back(std::move(r));
    }
    save_dataset(left, dir / "left.csv", dir / "left.schema.json");
    save_dataset(right, dir / "right.csv", dir / "right.schema.json");
}

PipelineConfig demo_config(const fs::path& dir, const Dataset& ds) {
    PipelineConfig cfg;
    cfg.relations = {{"left", dir / "left.csv", dir / "left.schema.json"},
                     {"right", dir / "right.csv", dir / "right.schema.json"}};
    for (const auto& a : ds.schema.attributes) cfg.projection.push_back(a.name);
    cfg.impute = ImputePolicy::unknown_category;
    cfg.k_features = 4;
    cfg.min_support = 0.15;
    cfg.min_confidence = 0.7;
    cfg.include_class = true;
    cfg.folds = 3;
    cfg.seed = 11;
    cfg.k_list = {1, 2, 3, 4};
    return cfg;
}

Dataset small_synthetic() {
    GeneratorSpec spec;
    spec.n_records = 150;
    spec.n_relevant = 3;
    spec.n_redundant = 1;
    spec.copy_noise = 0.1;
    spec.n_noise = 2;
    spec.cardinality = 2;
    spec.rule.threshold_low = 0;
    spec.rule.threshold_high = 1;
    spec.label_noise = 0.05;
    spec.missing_rate = 0.03;
    spec.seed = 4242;
    return generate_dataset(spec).dataset;
}

/// Contradiction-free variant: deterministic rule, no label noise, complete
/// cells, so a fully grown tree reproduces every training label.
Dataset clean_synthetic() {
    GeneratorSpec spec;
    spec.n_records = 120;
    spec.n_relevant = 3;
    spec.n_noise = 2;
    spec.cardinality = 2;
    spec.rule.threshold_low = 0;
    spec.rule.threshold_high = 1;
    spec.seed = 777;
    return generate_dataset(spec).dataset;
}

int run_cli(const std::string& args, const fs::path& capture = {}) {
    std::string cmd = std::string(LOGODM_CLI_PATH) + " " + args;
    if (!capture.empty()) cmd += " > " + capture.string() + " 2>&1";
    return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("run_pipeline populates every report section and is deterministic") {
    TempDir dir("logodm_pipeline_test");
    const Dataset ds = small_synthetic();
    write_split_relations(ds, dir.path);
    const PipelineConfig cfg = demo_config(dir.path, ds);

    const RunReport first = run_pipeline(cfg, dir.path / "out1");
    const auto& doc = first.document;
    CHECK(doc["tool"]["name"] == "logodm");
    CHECK(doc["config"]["seed"] == 11);
    CHECK(doc["selection_trace"].size() == 4);
    CHECK(doc["model"].contains("tree"));
    CHECK(doc["rules"].is_array());
    CHECK(doc["confusion_matrix"]["total"].get<std::size_t>() == ds.size());
    CHECK(doc["error_curve"].size() == 4);
    CHECK(doc["timings"].contains("ingest"));
    CHECK(doc["timings"].contains("evaluate"));

    for (const char* name : {"report.json", "model.json", "rules.txt", "summary.txt"})
        CHECK(fs::exists(dir.path / "out1" / name));

    const RunReport second = run_pipeline(cfg, dir.path / "out2");
    CHECK(first.without_timings().dump() == second.without_timings().dump());
    CHECK(first.without_timings().dump() != first.document.dump());
}

TEST_CASE("config echo reproduces the run") {
    TempDir dir("logodm_echo_test");
    const Dataset ds = small_synthetic();
    write_split_relations(ds, dir.path);
    const PipelineConfig cfg = demo_config(dir.path, ds);
    const RunReport report = run_pipeline(cfg, dir.path / "out");

    const PipelineConfig replay =
        pipeline_config_from_json(report.document["config"], dir.path);
    const RunReport again = run_pipeline(replay, dir.path / "out_replay");
    CHECK(report.without_timings().dump() == again.without_timings().dump());
}

TEST_CASE("missing inputs abort with the offending path in the diagnostic") {
    TempDir dir("logodm_missing_test");
    const Dataset ds = small_synthetic();
    write_split_relations(ds, dir.path);
    PipelineConfig cfg = demo_config(dir.path, ds);
    cfg.relations[0].csv = dir.path / "nope.csv";
    try {
        run_pipeline(cfg, dir.path / "out");
        FAIL("expected config error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::config);
        CHECK(std::string(e.what()).find("nope.csv") != std::string::npos);
    }
}

TEST_CASE("stage failures carry the stage tag") {
    TempDir dir("logodm_stage_test");
    const Dataset ds = small_synthetic();
    write_split_relations(ds, dir.path);
    PipelineConfig cfg = demo_config(dir.path, ds);
    cfg.projection.push_back("no_such_attribute");
    try {
        run_pipeline(cfg, dir.path / "out");
        FAIL("expected stage error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("stage build") != std::string::npos);
        CHECK(e.code() == errc::unknown_attribute);
    }
}

TEST_CASE("predict_case classifies batches and annotates fallbacks") {
    TempDir dir("logodm_predict_test");
    const Dataset ds = clean_synthetic();
    const DecisionTree tree = induce_tree(ds, {});
    save_text_file(dir.path / "model.json", tree.to_json().dump(2));

    SECTION("training records keep their labels") {
        save_dataset(ds, dir.path / "records.csv", dir.path / "records.schema.json");
        const auto predictions = predict_case(dir.path / "model.json", dir.path / "records.csv");
        REQUIRE(predictions.size() == ds.size());
        const auto ci = *ds.class_index();
        for (std::size_t i = 0; i < predictions.size(); ++i)
            CHECK(predictions[i].label == ds.records[i][ci].category_name());
    }
    SECTION("the class column may be omitted") {
        Dataset features = ds;
        const auto ci = *ds.class_index();
        features.schema.class_attribute.reset();
        features.schema.attributes.erase(features.schema.attributes.begin() +
                                         static_cast<std::ptrdiff_t>(ci));
        for (auto& r : features.records)
            r.erase(r.begin() + static_cast<std::ptrdiff_t>(ci));
        features.records.resize(5);
        save_dataset(features, dir.path / "cases.csv", dir.path / "cases.schema.json");
        const auto predictions = predict_case(dir.path / "model.json", dir.path / "cases.csv");
        REQUIRE(predictions.size() == 5);
        for (std::size_t i = 0; i < predictions.size(); ++i)
            CHECK(predictions[i].label == ds.records[i][ci].category_name());
    }
    SECTION("a Missing split value routes to the fallback") {
        REQUIRE_FALSE(tree.root().leaf);
        Dataset one;
        one.schema = ds.schema;
        Record rec = ds.records[0];
        rec[*ds.schema.index_of(tree.root().split_attribute)] = CellValue::missing();
        one.records.push_back(rec);
        save_dataset(one, dir.path / "one.csv", dir.path / "one.schema.json");
        const auto predictions = predict_case(dir.path / "model.json", dir.path / "one.csv");
        REQUIRE(predictions.size() == 1);
        CHECK(predictions[0].used_fallback);
        CHECK(predictions[0].label == tree.root().label);
    }
    SECTION("schema mismatches are field-level diagnostics") {
        save_text_file(dir.path / "bad.csv", "wrong_column\nx\n");
        CHECK_THROWS_AS(predict_case(dir.path / "model.json", dir.path / "bad.csv"), Error);
    }
}

TEST_CASE("the CLI wires the subcommands end to end") {
    TempDir dir("logodm_cli_test");

    // generate
    GeneratorSpec spec;
    spec.n_records = 60;
    spec.n_relevant = 2;
    spec.n_noise = 1;
    spec.cardinality = 2;
    spec.rule.threshold_low = 0;
    spec.rule.threshold_high = 1;
    spec.seed = 5;
    save_text_file(dir.path / "spec.json", generator_spec_to_json(spec).dump(2));
    REQUIRE(run_cli("generate --spec " + (dir.path / "spec.json").string() + " --out " +
                    (dir.path / "data.csv").string() + " --schema " +
                    (dir.path / "schema.json").string() + " --manifest " +
                    (dir.path / "truth.json").string(),
                    dir.path / "gen.log") == 0);
    REQUIRE(fs::exists(dir.path / "data.csv"));

    // select / train / rules on the generated data
    CHECK(run_cli("select --data " + (dir.path / "data.csv").string() + " --schema " +
                  (dir.path / "schema.json").string() + " --k-features 2 --out " +
                  (dir.path / "trace.json").string(),
                  dir.path / "select.log") == 0);
    CHECK(run_cli("train --data " + (dir.path / "data.csv").string() + " --schema " +
                  (dir.path / "schema.json").string() + " --out " +
                  (dir.path / "model.json").string(),
                  dir.path / "train.log") == 0);
    CHECK(run_cli("rules --data " + (dir.path / "data.csv").string() + " --schema " +
                  (dir.path / "schema.json").string() +
                  " --min-support 0.2 --min-confidence 0.6 --include-class --out " +
                  (dir.path / "rules.json").string() + " --text " +
                  (dir.path / "rules.txt").string(),
                  dir.path / "rules.log") == 0);
    CHECK(run_cli("evaluate --data " + (dir.path / "data.csv").string() + " --schema " +
                  (dir.path / "schema.json").string() + " --folds 3 --seed 2 --k-list 1,2 --out " +
                  (dir.path / "eval.json").string(),
                  dir.path / "eval.log") == 0);
    CHECK(run_cli("predict --model " + (dir.path / "model.json").string() + " --record " +
                  (dir.path / "data.csv").string(),
                  dir.path / "predict.log") == 0);

    const auto trace = load_json_file(dir.path / "trace.json");
    CHECK(trace.is_array());
    CHECK(trace.size() == 2);
    const auto eval = load_json_file(dir.path / "eval.json");
    CHECK(eval.contains("confusion_matrix"));
    CHECK(eval.contains("error_curve"));

    SECTION("a missing config path fails loudly") {
        const int rc = run_cli("run --config " + (dir.path / "absent.json").string() +
                               " --out-dir " + (dir.path / "out").string(),
                               dir.path / "fail.log");
        CHECK(rc != 0);
        CHECK(slurp(dir.path / "fail.log").find("absent.json") != std::string::npos);
    }
}

TEST_CASE("the build subcommand joins the bundled demo relations") {
    TempDir dir("logodm_build_test");
    const fs::path demo(LOGODM_DEMO_DIR);
    const int rc = run_cli(
        "build --relation " + (demo / "anamnesis.csv").string() + ":" +
            (demo / "anamnesis.schema.json").string() + " --relation " +
            (demo / "outcomes.csv").string() + ":" + (demo / "outcomes.schema.json").string() +
            " --project family_climate,family_receptivity,health_problems,outcome" +
            " --impute unknown --out " + (dir.path / "target.csv").string() + " --out-schema " +
            (dir.path / "target.schema.json").string(),
        dir.path / "build.log");
    REQUIRE(rc == 0);

    const Dataset target =
        load_dataset(dir.path / "target.csv", dir.path / "target.schema.json");
    CHECK(target.size() == 240);
    CHECK(target.width() == 8);  // 2 categorical + 5 expanded flags + outcome
    CHECK_FALSE(target.has_missing());
    CHECK(target.schema.class_attribute == "outcome");
}
