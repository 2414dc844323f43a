#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <set>

#include "logodm/evaluate.hpp"
#include "logodm/rng.hpp"
#include "oracles.hpp"

using namespace logodm;

namespace {

Dataset two_class_dataset(int per_class) {
    std::vector<std::vector<int>> features(1);
    std::vector<int> labels;
    for (int i = 0; i < per_class; ++i) {
        features[0].push_back(0);
        labels.push_back(0);
        features[0].push_back(1);
        labels.push_back(1);
    }
    return oracle::dataset_from_columns(features, labels, 2, 2);
}

}  // namespace

TEST_CASE("stratified folds partition the data with balanced classes") {
    const Dataset ds = two_class_dataset(5);  // 10 records, 5 per class
    const auto splits = stratified_kfold(ds, 5, 11);
    REQUIRE(splits.size() == 5);

    std::set<std::size_t> seen;
    for (const auto& s : splits) {
        CHECK(s.test.size() == 2);  // exactly one per class
        std::set<std::string> classes;
        for (auto r : s.test) classes.insert(ds.records[r][1].category_name());
        CHECK(classes.size() == 2);
        for (auto r : s.test) CHECK(seen.insert(r).second);  // disjoint
        CHECK(s.train.size() + s.test.size() == ds.size());
        // train + test together cover everything exactly once
        std::set<std::size_t> fold_union(s.train.begin(), s.train.end());
        fold_union.insert(s.test.begin(), s.test.end());
        CHECK(fold_union.size() == ds.size());
    }
    CHECK(seen.size() == ds.size());  // exhaustive
}

TEST_CASE("per-class fold counts differ by at most one") {
    SplitMix64 rng(5);
    const Dataset ds = oracle::random_dataset(rng, 2, 2, 53, 3);
    const int folds = 4;
    const auto splits = stratified_kfold(ds, folds, 3);
    const auto& domain = ds.schema.attributes.back().domain;
    for (const auto& label : domain) {
        std::vector<std::size_t> counts;
        for (const auto& s : splits) {
            std::size_t c = 0;
            for (auto r : s.test)
                if (ds.records[r].back().category_name() == label) ++c;
            counts.push_back(c);
        }
        const auto [mn, mx] = std::minmax_element(counts.begin(), counts.end());
        CHECK(*mx - *mn <= 1);
    }
}

TEST_CASE("identical seeds give identical partitions; different seeds differ") {
    const Dataset ds = two_class_dataset(10);
    const auto a = stratified_kfold(ds, 5, 42);
    const auto b = stratified_kfold(ds, 5, 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t f = 0; f < a.size(); ++f) {
        CHECK(a[f].train == b[f].train);
        CHECK(a[f].test == b[f].test);
    }
    const auto c = stratified_kfold(ds, 5, 43);
    bool any_difference = false;
    for (std::size_t f = 0; f < a.size(); ++f)
        if (a[f].test != c[f].test) any_difference = true;
    CHECK(any_difference);
}

TEST_CASE("stratification requires every class to fill the folds") {
    SECTION("a class-pure dataset cannot stratify") {
        Dataset pure = two_class_dataset(6);
        for (auto& r : pure.records) r[1] = CellValue::category("k0");
        CHECK_THROWS_MATCHES(stratified_kfold(pure, 2, 1), Error,
                             Catch::Matchers::Predicate<Error>([](const Error& e) {
                                 return e.code() == errc::insufficient_data;
                             }));
    }
    SECTION("a small stratum is rejected") {
        const Dataset ds = two_class_dataset(3);
        CHECK_THROWS_MATCHES(stratified_kfold(ds, 4, 1), Error,
                             Catch::Matchers::Predicate<Error>([](const Error& e) {
                                 return e.code() == errc::insufficient_data;
                             }));
    }
    SECTION("folds < 2 is a parameter error") {
        CHECK_THROWS_MATCHES(stratified_kfold(two_class_dataset(5), 1, 1), Error,
                             Catch::Matchers::Predicate<Error>([](const Error& e) {
                                 return e.code() == errc::parameter;
                             }));
    }
}

TEST_CASE("confusion matrix arithmetic") {
    ConfusionMatrix cm({"C", "I", "S"});
    cm.add("C", "C", 3);
    cm.add("C", "I", 1);
    cm.add("I", "I", 4);
    cm.add("S", "C", 2);
    CHECK(cm.total() == 10);
    CHECK(cm.count("C", "I") == 1);
    CHECK(cm.true_count("C") == 4);
    CHECK(cm.accuracy() == Catch::Approx(0.7));
    CHECK(cm.recall("C") == Catch::Approx(0.75));
    CHECK(cm.recall("I") == 1.0);
    CHECK(cm.recall("S") == 0.0);
    CHECK_THROWS_AS(cm.add("X", "C"), Error);

    const auto j = cm.to_json();
    CHECK(j["labels"].size() == 3);
    CHECK(j["matrix"][0][0] == 3);
    CHECK(j["total"] == 10);
}

TEST_CASE("a perfectly learnable dataset evaluates without confusion") {
    const Dataset ds = two_class_dataset(10);
    const ConfusionMatrix cm = evaluate_classifier(ds, {}, 5, 17);
    CHECK(cm.total() == ds.size());
    CHECK(cm.count("k0", "k1") == 0);
    CHECK(cm.count("k1", "k0") == 0);
    CHECK(cm.accuracy() == 1.0);
}

TEST_CASE("pooled row sums equal full-dataset class counts") {
    SplitMix64 rng(0xEEL);
    const Dataset ds = oracle::random_dataset(rng, 3, 2, 60, 3);
    const ConfusionMatrix cm = evaluate_classifier(ds, {}, 5, 2);
    CHECK(cm.total() == ds.size());
    std::map<std::string, std::size_t> expected;
    for (const auto& r : ds.records) expected[r.back().category_name()]++;
    for (const auto& label : cm.labels()) CHECK(cm.true_count(label) == expected[label]);
}

TEST_CASE("error curve at full feature count reproduces plain evaluation") {
    // Balanced classes so every fold has the same size and the unweighted
    // fold mean coincides with the pooled error.
    SplitMix64 rng(0x1CE);
    std::vector<std::vector<int>> features(4, std::vector<int>(60));
    std::vector<int> labels(60);
    for (auto& col : features)
        for (auto& v : col) v = static_cast<int>(rng.below(2));
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 2);
    const Dataset ds = oracle::dataset_from_columns(features, labels, 2, 2);

    const int n_features = static_cast<int>(ds.width()) - 1;
    const auto curve = error_vs_feature_count(ds, {n_features}, 5, 9);
    REQUIRE(curve.points.size() == 1);
    const ConfusionMatrix cm = evaluate_classifier(ds, {}, 5, 9);
    CHECK(curve.points[0].mean_error ==
          Catch::Approx(1.0 - cm.accuracy()).margin(1e-9));
}

TEST_CASE("error curve rejects out-of-range feature counts") {
    const Dataset ds = two_class_dataset(10);
    CHECK_THROWS_MATCHES(error_vs_feature_count(ds, {0}, 2, 1), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == errc::parameter; }));
    CHECK_THROWS_MATCHES(error_vs_feature_count(ds, {5}, 2, 1), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == errc::parameter; }));
    CHECK_THROWS_AS(error_vs_feature_count(ds, {}, 2, 1), Error);
}

TEST_CASE("per-fold selection and induction never see the test split") {
    SplitMix64 rng(0xAB1E);
    const Dataset ds = oracle::random_dataset(rng, 5, 2, 50, 2);
    const auto splits = stratified_kfold(ds, 5, 21);
    const Dataset train = subset_records(ds, splits[0].train);
    const Dataset test_full = subset_records(ds, splits[0].test);
    Dataset test_reduced = test_full;
    test_reduced.records.pop_back();

    const std::vector<int> ks = {1, 2, 3};
    const auto full = curve_on_split(train, test_full, ks, {});
    const auto reduced = curve_on_split(train, test_reduced, ks, {});
    CHECK(full.trace.attributes() == reduced.trace.attributes());

    // Same features, same train: induction is a function of the train split.
    const auto picked = full.trace.attributes();
    for (int k : ks) {
        const std::vector<std::string> feats(picked.begin(), picked.begin() + k);
        const auto t1 = induce_tree(select_features(train, feats), {});
        const auto t2 = induce_tree(select_features(train, feats), {});
        CHECK(t1.to_json().dump() == t2.to_json().dump());
    }
}

TEST_CASE("the curve is invariant under row permutation of record identity") {
    SplitMix64 rng(0x90D);
    const Dataset ds = oracle::random_dataset(rng, 4, 2, 40, 2);
    const auto splits = stratified_kfold(ds, 4, 5);

    // Permute the records, then rebuild the same logical split through the
    // permutation; the per-fold curve must not change.
    std::vector<std::size_t> perm(ds.size());
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<std::size_t> inverse(ds.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inverse[perm[i]] = i;

    Dataset permuted;
    permuted.schema = ds.schema;
    for (auto p : perm) permuted.records.push_back(ds.records[p]);

    const std::vector<int> ks = {1, 2, 4};
    for (const auto& split : splits) {
        auto map_indices = [&](const std::vector<std::size_t>& idx) {
            std::vector<std::size_t> out;
            for (auto i : idx) out.push_back(inverse[i]);
            std::sort(out.begin(), out.end());
            return out;
        };
        const auto a = curve_on_split(subset_records(ds, split.train),
                                      subset_records(ds, split.test), ks, {});
        const auto b = curve_on_split(subset_records(permuted, map_indices(split.train)),
                                      subset_records(permuted, map_indices(split.test)), ks, {});
        CHECK(a.trace.attributes() == b.trace.attributes());
        CHECK(a.errors == b.errors);
    }
}

TEST_CASE("planted-rule data beats the noise floor under cross-validation") {
    // label = f0 XOR f1 with two extra noise attributes; trees recover it.
    SplitMix64 rng(0x7007);
    std::vector<std::vector<int>> features(4);
    std::vector<int> labels;
    for (int r = 0; r < 200; ++r) {
        for (auto& col : features) col.push_back(static_cast<int>(rng.below(2)));
        labels.push_back(features[0].back() ^ features[1].back());
    }
    const Dataset ds = oracle::dataset_from_columns(features, labels, 2, 2);
    const ConfusionMatrix cm = evaluate_classifier(ds, {}, 5, 3);
    CHECK(cm.accuracy() >= 0.9);
}
