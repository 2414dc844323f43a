#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "logodm/error.hpp"
#include "logodm/schema.hpp"

namespace logodm {

/// Named table participating in the target-set construction.
struct Relation {
    std::string name;
    DatasetSchema schema;
    std::vector<Record> rows;
};

using ProjectionList = std::vector<std::string>;

/// (attribute, value) pair; the unit of the transactional representation.
struct Item {
    std::string attribute;
    std::string value;
    auto operator<=>(const Item&) const = default;
};

using Transaction = std::set<Item>;

struct TransactionSet {
    std::vector<Transaction> transactions;
    [[nodiscard]] std::size_t size() const noexcept { return transactions.size(); }
};

namespace detail {

// Join key for a row over the shared attribute positions. Missing cells have
// no key: they never match.
inline bool join_key(const Record& row, const std::vector<std::size_t>& shared_idx,
                     std::string& out) {
    out.clear();
    for (auto i : shared_idx) {
        const CellValue& c = row[i];
        if (c.is_missing()) return false;
        if (c.is_category()) {
            out += 'c';
            out += c.category_name();
        } else {
            out += 'f';
            for (const auto& fl : c.flag_set()) {
                out += fl;
                out += '\x1e';
            }
        }
        out += '\x1f';
    }
    return true;
}

}  // namespace detail

/// Natural join on the attributes the two schemas share by name. Output rows
/// pair left rows (in order) with their matching right rows (in order); rows
/// with a Missing shared cell on either side never match.
inline Relation natural_join(const Relation& left, const Relation& right) {
    std::vector<std::size_t> shared_left;
    std::vector<std::size_t> shared_right;
    for (std::size_t i = 0; i < left.schema.attributes.size(); ++i) {
        const auto& a = left.schema.attributes[i];
        auto j = right.schema.index_of(a.name);
        if (!j) continue;
        const auto& b = right.schema.attributes[*j];
        if (a != b)
            throw Error(errc::schema_conflict,
                        "attribute '" + a.name + "' has conflicting descriptors in '" + left.name +
                            "' and '" + right.name + "'");
        shared_left.push_back(i);
        shared_right.push_back(*j);
    }
    if (shared_left.empty())
        throw Error(errc::disjoint_schema, "relations '" + left.name + "' and '" + right.name +
                                               "' share no attribute; refusing Cartesian product");

    Relation out;
    out.name = left.name + "*" + right.name;
    out.schema.attributes = left.schema.attributes;
    std::vector<std::size_t> right_extra;  // right columns not shared
    for (std::size_t j = 0; j < right.schema.attributes.size(); ++j) {
        if (!left.schema.index_of(right.schema.attributes[j].name)) {
            right_extra.push_back(j);
            out.schema.attributes.push_back(right.schema.attributes[j]);
        }
    }
    out.schema.class_attribute = left.schema.class_attribute ? left.schema.class_attribute
                                                             : right.schema.class_attribute;

    // Hash the right side by shared-key; preserves right-row order per bucket.
    std::unordered_map<std::string, std::vector<std::size_t>> buckets;
    std::string key;
    for (std::size_t j = 0; j < right.rows.size(); ++j)
        if (detail::join_key(right.rows[j], shared_right, key)) buckets[key].push_back(j);

    for (const auto& lrow : left.rows) {
        if (!detail::join_key(lrow, shared_left, key)) continue;
        auto it = buckets.find(key);
        if (it == buckets.end()) continue;
        for (auto j : it->second) {
            Record merged = lrow;
            for (auto idx : right_extra) merged.push_back(right.rows[j][idx]);
            out.rows.push_back(std::move(merged));
        }
    }
    return out;
}

/// Restricts and reorders columns to the projection list. Bag semantics:
/// duplicate rows are kept so class and support frequencies survive.
inline Relation project(const Relation& rel, const ProjectionList& attrs) {
    if (attrs.empty()) throw Error(errc::parameter, "projection list is empty");
    std::set<std::string> uniq(attrs.begin(), attrs.end());
    if (uniq.size() != attrs.size())
        throw Error(errc::parameter, "projection list contains duplicate names");
    std::vector<std::size_t> idx;
    idx.reserve(attrs.size());
    for (const auto& a : attrs) {
        auto i = rel.schema.index_of(a);
        if (!i)
            throw Error(errc::unknown_attribute,
                        "projection names unknown attribute '" + a + "'");
        idx.push_back(*i);
    }
    Relation out;
    out.name = rel.name;
    for (auto i : idx) out.schema.attributes.push_back(rel.schema.attributes[i]);
    if (rel.schema.class_attribute && uniq.count(*rel.schema.class_attribute))
        out.schema.class_attribute = rel.schema.class_attribute;
    out.rows.reserve(rel.rows.size());
    for (const auto& row : rel.rows) {
        Record nr;
        nr.reserve(idx.size());
        for (auto i : idx) nr.push_back(row[i]);
        out.rows.push_back(std::move(nr));
    }
    return out;
}

namespace detail {

/// Expands every coded-flag attribute into one binary categorical attribute
/// per flag, named `<attribute>.<flag>` with domain {absent, present};
/// Missing coded cells expand to Missing in every derived column.
inline Dataset expand_coded_flags(const Relation& rel) {
    Dataset out;
    out.schema.class_attribute = rel.schema.class_attribute;
    struct ColPlan {
        std::size_t source;
        bool expand;
        std::vector<std::string> flags;  // when expanding
    };
    std::vector<ColPlan> plan;
    for (std::size_t i = 0; i < rel.schema.attributes.size(); ++i) {
        const auto& a = rel.schema.attributes[i];
        if (a.kind == AttrKind::coded_flag) {
            plan.push_back({i, true, a.flag_names});
            for (const auto& f : a.flag_names) {
                AttributeDescriptor d;
                d.name = a.name + "." + f;
                d.kind = AttrKind::categorical;
                d.domain = {"absent", "present"};
                out.schema.attributes.push_back(std::move(d));
            }
        } else {
            plan.push_back({i, false, {}});
            out.schema.attributes.push_back(a);
        }
    }
    out.schema.validate();  // catches name collisions with expanded columns
    out.records.reserve(rel.rows.size());
    for (const auto& row : rel.rows) {
        Record nr;
        for (const auto& p : plan) {
            const CellValue& c = row[p.source];
            if (!p.expand) {
                nr.push_back(c);
                continue;
            }
            if (c.is_missing()) {
                for (std::size_t k = 0; k < p.flags.size(); ++k) nr.push_back(CellValue::missing());
            } else {
                const FlagSet& fs = c.flag_set();
                for (const auto& f : p.flags)
                    nr.push_back(CellValue::category(fs.count(f) ? "present" : "absent"));
            }
        }
        out.records.push_back(std::move(nr));
    }
    return out;
}

}  // namespace detail

/// Left-fold natural join over the tables, project onto the chosen
/// attributes, and expand coded-flag columns so downstream stages see pure
/// categories.
inline Dataset build_target_set(const std::vector<Relation>& tables, const ProjectionList& attrs) {
    if (tables.empty()) throw Error(errc::parameter, "no input tables");
    Relation joined = tables.front();
    for (std::size_t i = 1; i < tables.size(); ++i) joined = natural_join(joined, tables[i]);
    return detail::expand_coded_flags(project(joined, attrs));
}

enum class ImputePolicy { unknown_category, per_class_mode, drop_record };

inline ImputePolicy impute_policy_from_name(const std::string& s) {
    if (s == "unknown") return ImputePolicy::unknown_category;
    if (s == "class-mode") return ImputePolicy::per_class_mode;
    if (s == "drop") return ImputePolicy::drop_record;
    throw Error(errc::parameter, "unknown imputation policy '" + s + "' (use unknown|class-mode|drop)");
}

constexpr const char* impute_policy_name(ImputePolicy p) noexcept {
    switch (p) {
        case ImputePolicy::unknown_category: return "unknown";
        case ImputePolicy::per_class_mode: return "class-mode";
        case ImputePolicy::drop_record: return "drop";
    }
    return "?";
}

/// Reserved category appended to a domain by the unknown-category policy.
inline constexpr const char* kUnknownCategory = "?unknown";

/// Removes every Missing cell according to the policy. The result contains
/// no Missing cells.
inline Dataset impute_missing(const Dataset& ds, ImputePolicy policy) {
    Dataset out;
    out.schema = ds.schema;

    // Columns that actually contain Missing.
    std::vector<bool> has_missing(ds.width(), false);
    for (const auto& r : ds.records)
        for (std::size_t i = 0; i < r.size(); ++i)
            if (r[i].is_missing()) has_missing[i] = true;

    for (std::size_t i = 0; i < ds.width(); ++i)
        if (has_missing[i] && ds.schema.attributes[i].kind == AttrKind::coded_flag)
            throw Error(errc::policy_precondition,
                        "coded-flag attribute '" + ds.schema.attributes[i].name +
                            "' contains Missing; expand it before imputation");

    if (policy == ImputePolicy::drop_record) {
        for (const auto& r : ds.records) {
            bool any = false;
            for (const auto& c : r)
                if (c.is_missing()) {
                    any = true;
                    break;
                }
            if (!any) out.records.push_back(r);
        }
        return out;
    }

    if (policy == ImputePolicy::unknown_category) {
        for (std::size_t i = 0; i < ds.width(); ++i)
            if (has_missing[i]) out.schema.attributes[i].domain.push_back(kUnknownCategory);
        out.records = ds.records;
        for (auto& r : out.records)
            for (auto& c : r)
                if (c.is_missing()) c = CellValue::category(kUnknownCategory);
        return out;
    }

    // per-class-mode
    auto ci = ds.class_index();
    if (!ci)
        throw Error(errc::policy_precondition, "per-class-mode imputation requires a class attribute");
    for (const auto& r : ds.records)
        if (r[*ci].is_missing())
            throw Error(errc::policy_precondition,
                        "per-class-mode imputation requires complete class labels");

    out.records = ds.records;
    for (std::size_t col = 0; col < ds.width(); ++col) {
        if (!has_missing[col] || col == *ci) continue;
        // Frequency of each non-missing value per class stratum, plus global.
        std::map<std::string, std::map<std::string, std::size_t>> per_class;
        std::map<std::string, std::size_t> global;
        for (const auto& r : ds.records) {
            if (r[col].is_missing()) continue;
            const std::string& v = r[col].category_name();
            per_class[r[*ci].category_name()][v]++;
            global[v]++;
        }
        auto mode_of = [](const std::map<std::string, std::size_t>& counts) -> const std::string* {
            const std::string* best = nullptr;
            std::size_t best_n = 0;
            for (const auto& [v, n] : counts) {  // ordered map: ties keep smallest value
                if (n > best_n) {
                    best = &v;
                    best_n = n;
                }
            }
            return best;
        };
        const std::string* global_mode = mode_of(global);
        for (auto& r : out.records) {
            if (!r[col].is_missing()) continue;
            const std::string& cls = r[*ci].category_name();
            const std::string* fill = nullptr;
            auto it = per_class.find(cls);
            if (it != per_class.end()) fill = mode_of(it->second);
            if (!fill) fill = global_mode;  // class stratum all-missing
            if (!fill)
                throw Error(errc::policy_precondition,
                            "attribute '" + ds.schema.attributes[col].name +
                                "' has no observed value to impute from");
            r[col] = CellValue::category(*fill);
        }
    }
    return out;
}

/// Turns each record into a set of (attribute, value) items. The class
/// attribute participates iff include_class. Coded-flag cells (when present
/// unexpanded) contribute a single item holding the encoded integer, keeping
/// attribute names unique within each transaction.
inline TransactionSet to_transactions(const Dataset& ds, bool include_class) {
    auto ci = ds.class_index();
    TransactionSet out;
    out.transactions.reserve(ds.records.size());
    for (const auto& r : ds.records) {
        Transaction t;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (ci && i == *ci && !include_class) continue;
            const CellValue& c = r[i];
            if (c.is_missing())
                throw Error(errc::unimputed_data,
                            "Missing cell in attribute '" + ds.schema.attributes[i].name +
                                "'; impute before mining");
            if (c.is_category()) {
                t.insert({ds.schema.attributes[i].name, c.category_name()});
            } else {
                const auto raw = encode_coded_field(c.flag_set(), ds.schema.attributes[i]);
                t.insert({ds.schema.attributes[i].name, std::to_string(raw)});
            }
        }
        out.transactions.push_back(std::move(t));
    }
    return out;
}

}  // namespace logodm
