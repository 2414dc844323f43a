#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "logodm/error.hpp"
#include "logodm/relation.hpp"
#include "logodm/schema.hpp"

namespace logodm {

// ---------------------------------------------------------------------------
// CSV (RFC-4180 dialect: comma separator, double-quote escaping, CRLF or LF)
// ---------------------------------------------------------------------------

namespace csv {

/// Reads one CSV record (possibly spanning physical lines inside quotes).
/// Returns false at end of input with no data consumed.
inline bool read_row(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    int c = in.get();
    if (c == EOF) return false;
    std::string field;
    bool in_quotes = false;
    bool row_open = true;
    while (row_open) {
        if (c == EOF) break;
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                int nxt = in.peek();
                if (nxt == '"') {
                    field += '"';
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            row_open = false;
        } else if (ch == '\r') {
            if (in.peek() == '\n') in.get();
            row_open = false;
        } else {
            field += ch;
        }
        if (row_open) c = in.get();
    }
    fields.push_back(std::move(field));
    return true;
}

inline void write_field(std::ostream& out, const std::string& field) {
    bool need_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!need_quotes) {
        out << field;
        return;
    }
    out << '"';
    for (char ch : field) {
        if (ch == '"') out << '"';
        out << ch;
    }
    out << '"';
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        write_field(out, fields[i]);
    }
    out << '\n';
}

}  // namespace csv

/// Parses records against the schema. The header row must name the schema's
/// attributes in order; empty cells are Missing; coded-flag cells hold the
/// raw integer.
inline std::vector<Record> read_csv_records(std::istream& in, const DatasetSchema& schema,
                                            bool validate = true) {
    std::vector<std::string> fields;
    if (!csv::read_row(in, fields)) throw Error(errc::io, "CSV input is empty (no header row)");
    if (fields.size() != schema.attributes.size())
        throw Error(errc::schema_mismatch,
                    "CSV header has " + std::to_string(fields.size()) + " columns, schema has " +
                        std::to_string(schema.attributes.size()));
    for (std::size_t i = 0; i < fields.size(); ++i)
        if (fields[i] != schema.attributes[i].name)
            throw Error(errc::schema_mismatch, "CSV column " + std::to_string(i) + " is '" +
                                                   fields[i] + "', schema expects '" +
                                                   schema.attributes[i].name + "'");

    std::vector<Record> records;
    std::size_t line = 1;
    while (csv::read_row(in, fields)) {
        ++line;
        if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
        if (fields.size() != schema.attributes.size())
            throw Error(errc::schema_mismatch, "CSV row " + std::to_string(line) + " has " +
                                                   std::to_string(fields.size()) + " cells");
        Record rec;
        rec.reserve(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const auto& attr = schema.attributes[i];
            const std::string& text = fields[i];
            if (text.empty()) {
                rec.push_back(CellValue::missing());
                continue;
            }
            if (attr.kind == AttrKind::coded_flag) {
                std::uint64_t raw = 0;
                auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), raw);
                if (ec != std::errc{} || ptr != text.data() + text.size())
                    throw Error(errc::validation, "row " + std::to_string(line) + ", attribute '" +
                                                      attr.name + "': '" + text +
                                                      "' is not a non-negative integer");
                try {
                    rec.push_back(CellValue::flags(decode_coded_field(raw, attr)));
                } catch (const Error& e) {
                    throw Error(e.code(), "row " + std::to_string(line) + ": " + e.what());
                }
            } else {
                if (validate && !attr.in_domain(text))
                    throw Error(errc::validation, "row " + std::to_string(line) + ", attribute '" +
                                                      attr.name + "': category '" + text +
                                                      "' not in domain");
                rec.push_back(CellValue::category(text));
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

inline void write_csv_records(std::ostream& out, const DatasetSchema& schema,
                              const std::vector<Record>& records) {
    std::vector<std::string> fields;
    for (const auto& a : schema.attributes) fields.push_back(a.name);
    csv::write_row(out, fields);
    for (const auto& rec : records) {
        fields.clear();
        for (std::size_t i = 0; i < rec.size(); ++i) {
            const CellValue& c = rec[i];
            if (c.is_missing())
                fields.emplace_back();
            else if (c.is_category())
                fields.push_back(c.category_name());
            else
                fields.push_back(
                    std::to_string(encode_coded_field(c.flag_set(), schema.attributes[i])));
        }
        csv::write_row(out, fields);
    }
}

// ---------------------------------------------------------------------------
// Schema JSON:
//   {"attributes": [{"name", "kind", "domain" | "flag_names"}, ...],
//    "class_attribute": optional}
// ---------------------------------------------------------------------------

inline nlohmann::json schema_to_json(const DatasetSchema& schema) {
    nlohmann::json attrs = nlohmann::json::array();
    for (const auto& a : schema.attributes) {
        nlohmann::json j;
        j["name"] = a.name;
        j["kind"] = attr_kind_name(a.kind);
        if (a.kind == AttrKind::coded_flag)
            j["flag_names"] = a.flag_names;
        else
            j["domain"] = a.domain;
        attrs.push_back(std::move(j));
    }
    nlohmann::json out;
    out["attributes"] = std::move(attrs);
    if (schema.class_attribute) out["class_attribute"] = *schema.class_attribute;
    return out;
}

inline DatasetSchema schema_from_json(const nlohmann::json& j) {
    DatasetSchema schema;
    if (!j.is_object() || !j.contains("attributes") || !j["attributes"].is_array())
        throw Error(errc::schema_mismatch, "schema JSON must be an object with an 'attributes' array");
    for (const auto& a : j["attributes"]) {
        AttributeDescriptor d;
        if (!a.contains("name") || !a.contains("kind"))
            throw Error(errc::schema_mismatch, "attribute entry needs 'name' and 'kind'");
        d.name = a["name"].get<std::string>();
        d.kind = attr_kind_from_name(a["kind"].get<std::string>());
        if (d.kind == AttrKind::coded_flag) {
            if (!a.contains("flag_names"))
                throw Error(errc::schema_mismatch,
                            "coded-flag attribute '" + d.name + "' needs 'flag_names'");
            d.flag_names = a["flag_names"].get<std::vector<std::string>>();
        } else {
            if (!a.contains("domain"))
                throw Error(errc::schema_mismatch,
                            "attribute '" + d.name + "' needs 'domain'");
            d.domain = a["domain"].get<std::vector<std::string>>();
        }
        schema.attributes.push_back(std::move(d));
    }
    if (j.contains("class_attribute") && !j["class_attribute"].is_null())
        schema.class_attribute = j["class_attribute"].get<std::string>();
    schema.validate();
    return schema;
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------

inline nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io, "cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(errc::io, "cannot parse '" + path.string() + "': " + e.what());
    }
    return j;
}

inline void save_text_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::io, "cannot write '" + path.string() + "'");
    out << body;
}

inline DatasetSchema load_schema(const std::filesystem::path& path) {
    return schema_from_json(load_json_file(path));
}

inline Dataset load_dataset(const std::filesystem::path& csv_path,
                            const std::filesystem::path& schema_path) {
    Dataset ds;
    ds.schema = load_schema(schema_path);
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw Error(errc::io, "cannot open '" + csv_path.string() + "'");
    ds.records = read_csv_records(in, ds.schema);
    return ds;
}

inline Relation load_relation(const std::string& name, const std::filesystem::path& csv_path,
                              const std::filesystem::path& schema_path) {
    Dataset ds = load_dataset(csv_path, schema_path);
    return Relation{name, std::move(ds.schema), std::move(ds.records)};
}

inline void save_dataset(const Dataset& ds, const std::filesystem::path& csv_path,
                         const std::filesystem::path& schema_path) {
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw Error(errc::io, "cannot write '" + csv_path.string() + "'");
        write_csv_records(out, ds.schema, ds.records);
    }
    save_text_file(schema_path, schema_to_json(ds.schema).dump(2) + "\n");
}

inline std::string dataset_to_csv_string(const Dataset& ds) {
    std::ostringstream out;
    write_csv_records(out, ds.schema, ds.records);
    return out.str();
}

}  // namespace logodm
