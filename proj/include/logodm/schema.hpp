#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "logodm/error.hpp"

namespace logodm {

enum class AttrKind { categorical, coded_flag, class_label };

constexpr const char* attr_kind_name(AttrKind k) noexcept {
    switch (k) {
        case AttrKind::categorical: return "categorical";
        case AttrKind::coded_flag: return "coded-flag";
        case AttrKind::class_label: return "class-label";
    }
    return "unknown";
}

inline AttrKind attr_kind_from_name(const std::string& s) {
    if (s == "categorical") return AttrKind::categorical;
    if (s == "coded-flag") return AttrKind::coded_flag;
    if (s == "class-label") return AttrKind::class_label;
    throw Error(errc::schema_mismatch, "unknown attribute kind '" + s + "'");
}

/// Set of flag labels carried by one coded-flag cell.
using FlagSet = std::set<std::string>;

/// Declares one column: its name, kind, and closed value domain.
/// Categorical and class-label attributes enumerate admissible category
/// names; coded-flag attributes list their flag labels most-significant
/// decimal digit first.
struct AttributeDescriptor {
    std::string name;
    AttrKind kind = AttrKind::categorical;
    std::vector<std::string> domain;      // categorical / class-label
    std::vector<std::string> flag_names;  // coded-flag, MSD first

    [[nodiscard]] bool is_categorical_like() const noexcept {
        return kind == AttrKind::categorical || kind == AttrKind::class_label;
    }

    [[nodiscard]] bool in_domain(const std::string& value) const {
        return std::find(domain.begin(), domain.end(), value) != domain.end();
    }

    /// Throws schema-mismatch if the descriptor violates its invariants.
    void validate() const {
        if (name.empty()) throw Error(errc::schema_mismatch, "attribute name must be non-empty");
        if (is_categorical_like()) {
            std::unordered_set<std::string> seen;
            for (const auto& v : domain) {
                if (v.empty())
                    throw Error(errc::schema_mismatch, "empty domain value in attribute '" + name + "'");
                if (!seen.insert(v).second)
                    throw Error(errc::schema_mismatch,
                                "duplicate domain value '" + v + "' in attribute '" + name + "'");
            }
            if (!flag_names.empty())
                throw Error(errc::schema_mismatch,
                            "attribute '" + name + "' of kind " + attr_kind_name(kind) +
                                " must not carry flag_names");
        } else {
            if (flag_names.empty() || flag_names.size() > 9)
                throw Error(errc::schema_mismatch,
                            "coded-flag attribute '" + name + "' needs between 1 and 9 flags");
            std::unordered_set<std::string> seen;
            for (const auto& f : flag_names) {
                if (f.empty())
                    throw Error(errc::schema_mismatch, "empty flag label in attribute '" + name + "'");
                if (!seen.insert(f).second)
                    throw Error(errc::schema_mismatch,
                                "duplicate flag label '" + f + "' in attribute '" + name + "'");
            }
            if (!domain.empty())
                throw Error(errc::schema_mismatch,
                            "coded-flag attribute '" + name + "' must not carry a category domain");
        }
    }

    bool operator==(const AttributeDescriptor&) const = default;
};

/// Ordered attribute list plus the optional class-label designation.
struct DatasetSchema {
    std::vector<AttributeDescriptor> attributes;
    std::optional<std::string> class_attribute;

    [[nodiscard]] std::optional<std::size_t> index_of(const std::string& name) const {
        for (std::size_t i = 0; i < attributes.size(); ++i)
            if (attributes[i].name == name) return i;
        return std::nullopt;
    }

    [[nodiscard]] const AttributeDescriptor& attribute(const std::string& name) const {
        auto idx = index_of(name);
        if (!idx) throw Error(errc::unknown_attribute, "no attribute named '" + name + "'");
        return attributes[*idx];
    }

    [[nodiscard]] std::optional<std::size_t> class_index() const {
        if (!class_attribute) return std::nullopt;
        return index_of(*class_attribute);
    }

    void validate() const {
        std::unordered_set<std::string> names;
        for (const auto& a : attributes) {
            a.validate();
            if (!names.insert(a.name).second)
                throw Error(errc::schema_mismatch, "duplicate attribute name '" + a.name + "'");
        }
        if (class_attribute) {
            auto idx = index_of(*class_attribute);
            if (!idx)
                throw Error(errc::schema_mismatch,
                            "class_attribute '" + *class_attribute + "' does not exist");
            if (attributes[*idx].kind != AttrKind::class_label)
                throw Error(errc::schema_mismatch,
                            "class_attribute '" + *class_attribute + "' is not of kind class-label");
        }
    }

    bool operator==(const DatasetSchema&) const = default;
};

/// One cell: a category name, a set of flags, or the Missing marker.
/// Missing is first-class and never conflated with an empty FlagSet.
class CellValue {
public:
    CellValue() = default;  // Missing

    static CellValue missing() { return CellValue(); }

    static CellValue category(std::string name) {
        CellValue v;
        v.tag_ = Tag::category;
        v.category_ = std::move(name);
        return v;
    }

    static CellValue flags(FlagSet fs) {
        CellValue v;
        v.tag_ = Tag::flags;
        v.flags_ = std::move(fs);
        return v;
    }

    [[nodiscard]] bool is_missing() const noexcept { return tag_ == Tag::missing; }
    [[nodiscard]] bool is_category() const noexcept { return tag_ == Tag::category; }
    [[nodiscard]] bool is_flags() const noexcept { return tag_ == Tag::flags; }

    [[nodiscard]] const std::string& category_name() const {
        if (!is_category()) throw Error(errc::parameter, "cell does not hold a category");
        return category_;
    }

    [[nodiscard]] const FlagSet& flag_set() const {
        if (!is_flags()) throw Error(errc::parameter, "cell does not hold a flag set");
        return flags_;
    }

    bool operator==(const CellValue&) const = default;
    auto operator<=>(const CellValue&) const = default;

private:
    enum class Tag { missing, category, flags };
    Tag tag_ = Tag::missing;
    std::string category_;
    FlagSet flags_;
};

using Record = std::vector<CellValue>;

/// Rectangular collection of records over a schema.
struct Dataset {
    DatasetSchema schema;
    std::vector<Record> records;

    [[nodiscard]] std::size_t size() const noexcept { return records.size(); }
    [[nodiscard]] std::size_t width() const noexcept { return schema.attributes.size(); }

    [[nodiscard]] std::optional<std::size_t> class_index() const { return schema.class_index(); }

    [[nodiscard]] bool has_missing() const {
        for (const auto& r : records)
            for (const auto& c : r)
                if (c.is_missing()) return true;
        return false;
    }
};

// ---------------------------------------------------------------------------
// Decimal-flag codec
// ---------------------------------------------------------------------------

namespace detail {
inline std::uint64_t pow10(std::size_t e) {
    std::uint64_t v = 1;
    while (e--) v *= 10;
    return v;
}
}  // namespace detail

/// Decodes a decimal-flag integer: digit position i (0 = least significant)
/// maps to flag_names[k-1-i]. Digits must all be 0 or 1.
inline FlagSet decode_coded_field(std::uint64_t raw, const AttributeDescriptor& spec) {
    if (spec.kind != AttrKind::coded_flag)
        throw Error(errc::parameter, "attribute '" + spec.name + "' is not coded-flag");
    const std::size_t k = spec.flag_names.size();
    if (raw >= detail::pow10(k))
        throw Error(errc::code_overflow,
                    "value " + std::to_string(raw) + " has more than " + std::to_string(k) +
                        " digits for attribute '" + spec.name + "'");
    FlagSet out;
    std::uint64_t rest = raw;
    for (int pos = 0; pos < static_cast<int>(k); ++pos) {
        const std::uint64_t digit = rest % 10;
        rest /= 10;
        if (digit > 1)
            throw Error(errc::malformed_code,
                        "digit " + std::to_string(digit) + " at position " + std::to_string(pos) +
                            " of value " + std::to_string(raw) + " (attribute '" + spec.name + "')",
                        pos);
        if (digit == 1) out.insert(spec.flag_names[k - 1 - static_cast<std::size_t>(pos)]);
    }
    return out;
}

/// Inverse of decode_coded_field.
inline std::uint64_t encode_coded_field(const FlagSet& flags, const AttributeDescriptor& spec) {
    if (spec.kind != AttrKind::coded_flag)
        throw Error(errc::parameter, "attribute '" + spec.name + "' is not coded-flag");
    const std::size_t k = spec.flag_names.size();
    std::uint64_t out = 0;
    for (const auto& f : flags) {
        auto it = std::find(spec.flag_names.begin(), spec.flag_names.end(), f);
        if (it == spec.flag_names.end())
            throw Error(errc::unknown_flag,
                        "flag '" + f + "' is not declared for attribute '" + spec.name + "'");
        const auto idx = static_cast<std::size_t>(it - spec.flag_names.begin());
        out += detail::pow10(k - 1 - idx);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Record validation
// ---------------------------------------------------------------------------

struct Violation {
    std::string attribute;
    std::string reason;
    bool operator==(const Violation&) const = default;
};

struct ValidationVerdict {
    std::vector<Violation> violations;
    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

/// Checks one cell against its attribute; empty string means no violation.
inline std::string check_cell(const CellValue& cell, const AttributeDescriptor& attr) {
    if (cell.is_missing()) return {};  // Missing is always admissible
    if (cell.is_category()) {
        if (!attr.is_categorical_like())
            return "category value on " + std::string(attr_kind_name(attr.kind)) + " attribute";
        if (!attr.in_domain(cell.category_name()))
            return "category '" + cell.category_name() + "' not in domain";
        return {};
    }
    // flag set
    if (attr.kind != AttrKind::coded_flag)
        return "flag set on " + std::string(attr_kind_name(attr.kind)) + " attribute";
    for (const auto& f : cell.flag_set())
        if (std::find(attr.flag_names.begin(), attr.flag_names.end(), f) == attr.flag_names.end())
            return "flag '" + f + "' not declared";
    return {};
}

inline ValidationVerdict validate_record(const Record& record, const DatasetSchema& schema) {
    ValidationVerdict verdict;
    if (record.size() != schema.attributes.size()) {
        verdict.violations.push_back(
            {"", "record has " + std::to_string(record.size()) + " cells, schema has " +
                     std::to_string(schema.attributes.size()) + " attributes"});
        return verdict;
    }
    for (std::size_t i = 0; i < record.size(); ++i) {
        std::string reason = check_cell(record[i], schema.attributes[i]);
        if (!reason.empty()) verdict.violations.push_back({schema.attributes[i].name, reason});
    }
    return verdict;
}

/// Validates every record; throws errc::validation naming the first offender.
inline void validate_dataset(const Dataset& ds) {
    ds.schema.validate();
    for (std::size_t r = 0; r < ds.records.size(); ++r) {
        auto verdict = validate_record(ds.records[r], ds.schema);
        if (!verdict.ok()) {
            const auto& v = verdict.violations.front();
            throw Error(errc::validation, "record " + std::to_string(r) + ", attribute '" +
                                              v.attribute + "': " + v.reason);
        }
    }
}

// ---------------------------------------------------------------------------
// Dataset utilities shared by the selection/model/evaluation stages
// ---------------------------------------------------------------------------

/// New dataset holding the given feature columns plus the class column (when
/// present and not already listed). Feature order is preserved as given.
inline Dataset select_features(const Dataset& ds, const std::vector<std::string>& features) {
    std::vector<std::size_t> idx;
    idx.reserve(features.size() + 1);
    for (const auto& f : features) {
        auto i = ds.schema.index_of(f);
        if (!i) throw Error(errc::unknown_attribute, "no attribute named '" + f + "'");
        idx.push_back(*i);
    }
    if (auto ci = ds.class_index()) {
        if (std::find(idx.begin(), idx.end(), *ci) == idx.end()) idx.push_back(*ci);
    }
    Dataset out;
    out.schema.class_attribute = ds.schema.class_attribute;
    for (auto i : idx) out.schema.attributes.push_back(ds.schema.attributes[i]);
    out.records.reserve(ds.records.size());
    for (const auto& r : ds.records) {
        Record nr;
        nr.reserve(idx.size());
        for (auto i : idx) nr.push_back(r[i]);
        out.records.push_back(std::move(nr));
    }
    return out;
}

/// New dataset holding the records at the given indices, in index order.
inline Dataset subset_records(const Dataset& ds, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.schema = ds.schema;
    out.records.reserve(rows.size());
    for (auto r : rows) {
        if (r >= ds.records.size())
            throw Error(errc::parameter, "record index " + std::to_string(r) + " out of range");
        out.records.push_back(ds.records[r]);
    }
    return out;
}

}  // namespace logodm
