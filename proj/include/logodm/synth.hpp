#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "logodm/error.hpp"
#include "logodm/rng.hpp"
#include "logodm/schema.hpp"

namespace logodm {

inline const std::vector<std::string> kOutcomeClasses = {"C", "I", "S"};

/// Deterministic mapping from relevant-attribute value tuples to one of the
/// three outcome classes. Either an explicit table over the product space
/// (row-major, first attribute most significant) or a two-threshold cut on
/// the sum of value indices.
struct ClassRule {
    enum class Kind { table, threshold_sum };
    Kind kind = Kind::threshold_sum;
    std::vector<int> table;       // class index per tuple (kind == table)
    int threshold_low = 1;        // sum <= low       -> class 0
    int threshold_high = 3;       // low < sum <= high -> class 1, else 2

    [[nodiscard]] int apply(const std::vector<int>& values, int cardinality) const {
        if (kind == Kind::threshold_sum) {
            int sum = 0;
            for (int v : values) sum += v;
            if (sum <= threshold_low) return 0;
            if (sum <= threshold_high) return 1;
            return 2;
        }
        std::size_t idx = 0;
        for (int v : values) idx = idx * static_cast<std::size_t>(cardinality) +
                                   static_cast<std::size_t>(v);
        return table.at(idx);
    }
};

/// Parameters of one synthetic dataset: planted relevant attributes drive the
/// class through the rule; redundant attributes echo a relevant source with
/// re-sampling rate epsilon; noise attributes are independent uniform.
struct GeneratorSpec {
    std::size_t n_records = 0;
    int n_relevant = 0;
    int n_redundant = 0;
    double copy_noise = 0.0;  // epsilon: redundant cell re-sampled uniformly
    int n_noise = 0;
    int cardinality = 2;      // value count of every generated attribute
    ClassRule rule;
    double label_noise = 0.0;   // probability the label flips to a wrong class
    double missing_rate = 0.0;  // per feature cell
    std::uint64_t seed = 0;

    void validate() const {
        if (n_records < 1) throw Error(errc::parameter, "n_records must be >= 1");
        if (n_relevant < 1) throw Error(errc::parameter, "n_relevant must be >= 1");
        if (n_redundant < 0 || n_noise < 0)
            throw Error(errc::parameter, "attribute counts must be non-negative");
        if (cardinality < 2) throw Error(errc::parameter, "cardinality must be >= 2");
        auto rate_ok = [](double r) { return r >= 0.0 && r < 1.0; };
        if (!rate_ok(copy_noise) || !rate_ok(label_noise) || !rate_ok(missing_rate))
            throw Error(errc::parameter, "rates must lie in [0, 1)");
        if (rule.kind == ClassRule::Kind::table) {
            std::size_t cells = 1;
            for (int i = 0; i < n_relevant; ++i) cells *= static_cast<std::size_t>(cardinality);
            if (rule.table.size() != cells)
                throw Error(errc::parameter, "rule table must cover the full value product space (" +
                                                 std::to_string(cells) + " entries)");
            for (int v : rule.table)
                if (v < 0 || v > 2) throw Error(errc::parameter, "rule table entries must be 0..2");
        } else {
            const int max_sum = n_relevant * (cardinality - 1);
            if (rule.threshold_low < 0 || rule.threshold_low > rule.threshold_high ||
                rule.threshold_high > max_sum)
                throw Error(errc::parameter, "rule thresholds must satisfy 0 <= low <= high <= " +
                                                 std::to_string(max_sum));
        }
    }
};

struct GeneratedData {
    Dataset dataset;
    nlohmann::json manifest;
};

namespace detail {

inline std::vector<std::string> relevant_names(int n) {
    static const std::array<const char*, 8> pool = {
        "family_climate", "family_receptivity", "health_history", "lifestyle",
        "speech_environment", "school_integration", "attention_span", "motivation"};
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) {
        if (i < static_cast<int>(pool.size()))
            out.emplace_back(pool[static_cast<std::size_t>(i)]);
        else
            out.push_back("trait_" + std::to_string(i));
    }
    return out;
}

inline std::vector<std::string> noise_names(int n) {
    static const std::array<const char*, 12> pool = {
        "birth_order", "siblings", "pet_ownership", "bedtime_routine", "screen_time",
        "diet_pattern", "commute_mode", "play_style", "weather_pref", "shoe_size",
        "favorite_color", "lucky_number"};
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) {
        if (i < static_cast<int>(pool.size()))
            out.emplace_back(pool[static_cast<std::size_t>(i)]);
        else
            out.push_back("context_" + std::to_string(i));
    }
    return out;
}

inline nlohmann::json rule_to_json(const ClassRule& rule) {
    nlohmann::json j;
    if (rule.kind == ClassRule::Kind::threshold_sum) {
        j["kind"] = "threshold_sum";
        j["thresholds"] = {rule.threshold_low, rule.threshold_high};
    } else {
        j["kind"] = "table";
        nlohmann::json classes = nlohmann::json::array();
        for (int v : rule.table) classes.push_back(kOutcomeClasses[static_cast<std::size_t>(v)]);
        j["classes"] = std::move(classes);
    }
    return j;
}

inline ClassRule rule_from_json(const nlohmann::json& j) {
    ClassRule rule;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "threshold_sum") {
        rule.kind = ClassRule::Kind::threshold_sum;
        auto t = j.at("thresholds");
        if (!t.is_array() || t.size() != 2)
            throw Error(errc::parameter, "threshold_sum rule needs 'thresholds': [low, high]");
        rule.threshold_low = t[0].get<int>();
        rule.threshold_high = t[1].get<int>();
    } else if (kind == "table") {
        rule.kind = ClassRule::Kind::table;
        for (const auto& c : j.at("classes")) {
            const std::string label = c.get<std::string>();
            auto it = std::find(kOutcomeClasses.begin(), kOutcomeClasses.end(), label);
            if (it == kOutcomeClasses.end())
                throw Error(errc::parameter, "rule class '" + label + "' is not one of C/I/S");
            rule.table.push_back(static_cast<int>(it - kOutcomeClasses.begin()));
        }
    } else {
        throw Error(errc::parameter, "unknown rule kind '" + kind + "'");
    }
    return rule;
}

}  // namespace detail

inline nlohmann::json generator_spec_to_json(const GeneratorSpec& spec) {
    nlohmann::json j;
    j["n_records"] = spec.n_records;
    j["n_relevant"] = spec.n_relevant;
    j["n_redundant"] = spec.n_redundant;
    j["copy_noise"] = spec.copy_noise;
    j["n_noise"] = spec.n_noise;
    j["cardinality"] = spec.cardinality;
    j["rule"] = detail::rule_to_json(spec.rule);
    j["label_noise"] = spec.label_noise;
    j["missing_rate"] = spec.missing_rate;
    j["seed"] = spec.seed;
    return j;
}

inline GeneratorSpec generator_spec_from_json(const nlohmann::json& j) {
    GeneratorSpec spec;
    try {
        spec.n_records = j.at("n_records").get<std::size_t>();
        spec.n_relevant = j.at("n_relevant").get<int>();
        spec.n_redundant = j.value("n_redundant", 0);
        spec.copy_noise = j.value("copy_noise", 0.0);
        spec.n_noise = j.value("n_noise", 0);
        spec.cardinality = j.value("cardinality", 2);
        if (j.contains("rule")) spec.rule = detail::rule_from_json(j.at("rule"));
        spec.label_noise = j.value("label_noise", 0.0);
        spec.missing_rate = j.value("missing_rate", 0.0);
        spec.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(errc::parameter, std::string("generator spec JSON: ") + e.what());
    }
    spec.validate();
    return spec;
}

/// Minimum achievable 0/1 error under the planted distribution. The rule is
/// deterministic and label noise flips to a uniformly chosen wrong class, so
/// the optimum predictor is the rule itself and its error is the flip rate.
inline double bayes_error(const GeneratorSpec& spec) {
    spec.validate();
    return spec.label_noise;
}

/// Draws the dataset. Stream layout per record, in order: relevant values,
/// redundant cells (one unit() each, plus one below(cardinality) when
/// re-sampling), noise values, one unit() for label noise (plus one below(2)
/// when flipping), then one unit() per feature cell for Missing injection.
/// Identical seeds give byte-identical datasets.
inline GeneratedData generate_dataset(const GeneratorSpec& spec) {
    spec.validate();

    const auto relevant = detail::relevant_names(spec.n_relevant);
    std::vector<std::string> redundant;
    std::vector<int> redundant_source;
    for (int i = 0; i < spec.n_redundant; ++i) {
        const int src = i % spec.n_relevant;
        redundant.push_back(relevant[static_cast<std::size_t>(src)] + "_proxy" +
                            (i >= spec.n_relevant ? std::to_string(i / spec.n_relevant) : ""));
        redundant_source.push_back(src);
    }
    const auto noise = detail::noise_names(spec.n_noise);

    std::vector<std::string> values;
    for (int v = 0; v < spec.cardinality; ++v) values.push_back("v" + std::to_string(v));

    Dataset ds;
    auto add_attr = [&](const std::string& name) {
        AttributeDescriptor d;
        d.name = name;
        d.kind = AttrKind::categorical;
        d.domain = values;
        ds.schema.attributes.push_back(std::move(d));
    };
    for (const auto& n : relevant) add_attr(n);
    for (const auto& n : redundant) add_attr(n);
    for (const auto& n : noise) add_attr(n);
    AttributeDescriptor cls;
    cls.name = "outcome";
    cls.kind = AttrKind::class_label;
    cls.domain = kOutcomeClasses;
    ds.schema.attributes.push_back(std::move(cls));
    ds.schema.class_attribute = "outcome";
    ds.schema.validate();

    const std::size_t n_features = relevant.size() + redundant.size() + noise.size();
    SplitMix64 rng(spec.seed);
    std::vector<int> rel_values(relevant.size());
    ds.records.reserve(spec.n_records);
    for (std::size_t r = 0; r < spec.n_records; ++r) {
        Record rec;
        rec.reserve(n_features + 1);
        for (auto& v : rel_values) {
            v = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.cardinality)));
            rec.push_back(CellValue::category(values[static_cast<std::size_t>(v)]));
        }
        for (std::size_t i = 0; i < redundant.size(); ++i) {
            int v = rel_values[static_cast<std::size_t>(redundant_source[i])];
            if (rng.unit() < spec.copy_noise)
                v = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.cardinality)));
            rec.push_back(CellValue::category(values[static_cast<std::size_t>(v)]));
        }
        for (std::size_t i = 0; i < noise.size(); ++i) {
            const int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.cardinality)));
            rec.push_back(CellValue::category(values[static_cast<std::size_t>(v)]));
        }
        int label = spec.rule.apply(rel_values, spec.cardinality);
        if (rng.unit() < spec.label_noise)
            label = (label + 1 + static_cast<int>(rng.below(2))) % 3;
        rec.push_back(CellValue::category(kOutcomeClasses[static_cast<std::size_t>(label)]));
        for (std::size_t i = 0; i < n_features; ++i)
            if (rng.unit() < spec.missing_rate) rec[i] = CellValue::missing();
        ds.records.push_back(std::move(rec));
    }

    nlohmann::json manifest;
    manifest["synthetic"] = true;
    manifest["generator"] = "splitmix64";
    manifest["spec"] = generator_spec_to_json(spec);
    manifest["relevant"] = relevant;
    nlohmann::json red = nlohmann::json::array();
    for (std::size_t i = 0; i < redundant.size(); ++i) {
        nlohmann::json j;
        j["name"] = redundant[i];
        j["source"] = relevant[static_cast<std::size_t>(redundant_source[i])];
        j["copy_noise"] = spec.copy_noise;
        red.push_back(std::move(j));
    }
    manifest["redundant"] = std::move(red);
    manifest["noise"] = noise;
    manifest["rule"] = detail::rule_to_json(spec.rule);
    manifest["class_attribute"] = "outcome";
    manifest["classes"] = kOutcomeClasses;
    manifest["bayes_error"] = bayes_error(spec);
    return {std::move(ds), std::move(manifest)};
}

}  // namespace logodm
