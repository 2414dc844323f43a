#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "logodm/error.hpp"
#include "logodm/schema.hpp"

namespace logodm {

/// Joint counts over two categorical variables; marginals derived by summing.
class ContingencyTable {
public:
    ContingencyTable(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), cells_(rows * cols, 0) {}

    /// Tabulates two aligned columns of value indices (-1 marks Missing).
    static ContingencyTable from_columns(std::span<const int> x, std::span<const int> y,
                                         int card_x, int card_y) {
        if (x.size() != y.size())
            throw Error(errc::shape_mismatch, "columns have lengths " + std::to_string(x.size()) +
                                                  " and " + std::to_string(y.size()));
        ContingencyTable t(static_cast<std::size_t>(card_x), static_cast<std::size_t>(card_y));
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] < 0 || y[i] < 0)
                throw Error(errc::unimputed_data, "Missing cell in mutual-information input");
            t.add(static_cast<std::size_t>(x[i]), static_cast<std::size_t>(y[i]));
        }
        return t;
    }

    void add(std::size_t i, std::size_t j, std::size_t count = 1) {
        cells_.at(i * cols_ + j) += count;
        total_ += count;
    }

    [[nodiscard]] std::size_t joint(std::size_t i, std::size_t j) const {
        return cells_.at(i * cols_ + j);
    }
    [[nodiscard]] std::size_t row_total(std::size_t i) const {
        std::size_t s = 0;
        for (std::size_t j = 0; j < cols_; ++j) s += cells_[i * cols_ + j];
        return s;
    }
    [[nodiscard]] std::size_t col_total(std::size_t j) const {
        std::size_t s = 0;
        for (std::size_t i = 0; i < rows_; ++i) s += cells_[i * cols_ + j];
        return s;
    }
    [[nodiscard]] std::size_t total() const noexcept { return total_; }
    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::size_t> cells_;
    std::size_t total_ = 0;
};

/// Plug-in mutual information in bits: sum over non-empty cells of
/// (n_ij/n) * log2(n_ij*n / (n_i*n_j)), with 0*log(.) = 0.
inline double mutual_information(const ContingencyTable& t) {
    if (t.total() == 0) throw Error(errc::empty_input, "mutual information of empty columns");
    const double n = static_cast<double>(t.total());
    std::vector<double> row(t.rows());
    std::vector<double> col(t.cols());
    for (std::size_t i = 0; i < t.rows(); ++i) row[i] = static_cast<double>(t.row_total(i));
    for (std::size_t j = 0; j < t.cols(); ++j) col[j] = static_cast<double>(t.col_total(j));
    double mi = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        for (std::size_t j = 0; j < t.cols(); ++j) {
            const auto nij = static_cast<double>(t.joint(i, j));
            if (nij == 0.0) continue;
            mi += (nij / n) * std::log2((nij * n) / (row[i] * col[j]));
        }
    }
    return mi;
}

inline double mutual_information(std::span<const int> x, std::span<const int> y, int card_x,
                                 int card_y) {
    return mutual_information(ContingencyTable::from_columns(x, y, card_x, card_y));
}

/// Shannon entropy in bits of a label column.
inline double entropy(const std::vector<std::string>& column) {
    if (column.empty()) throw Error(errc::empty_input, "entropy of an empty column");
    std::map<std::string, std::size_t> counts;
    for (const auto& v : column) counts[v]++;
    const double n = static_cast<double>(column.size());
    double h = 0.0;
    for (const auto& [v, c] : counts) {
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

inline double entropy(std::span<const int> column, int cardinality) {
    if (column.empty()) throw Error(errc::empty_input, "entropy of an empty column");
    std::vector<std::size_t> counts(static_cast<std::size_t>(cardinality), 0);
    for (int v : column) {
        if (v < 0) throw Error(errc::unimputed_data, "Missing cell in entropy input");
        counts.at(static_cast<std::size_t>(v))++;
    }
    const double n = static_cast<double>(column.size());
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Dense integer view of a pure-categorical dataset. Cell values become their
// position in the attribute's declared domain; Missing becomes -1.
// ---------------------------------------------------------------------------

struct EncodedColumn {
    std::string name;
    int cardinality = 0;
    std::vector<int> values;
};

struct EncodedDataset {
    std::vector<EncodedColumn> columns;
    std::optional<std::size_t> class_col;

    static EncodedDataset from(const Dataset& ds) {
        EncodedDataset out;
        out.class_col = ds.class_index();
        out.columns.reserve(ds.width());
        for (std::size_t a = 0; a < ds.width(); ++a) {
            const auto& attr = ds.schema.attributes[a];
            if (attr.kind == AttrKind::coded_flag)
                throw Error(errc::parameter, "coded-flag attribute '" + attr.name +
                                                 "' must be expanded before analysis");
            EncodedColumn col;
            col.name = attr.name;
            col.cardinality = static_cast<int>(attr.domain.size());
            col.values.reserve(ds.size());
            std::map<std::string, int> index;
            for (std::size_t d = 0; d < attr.domain.size(); ++d)
                index[attr.domain[d]] = static_cast<int>(d);
            for (const auto& r : ds.records) {
                const CellValue& c = r[a];
                if (c.is_missing()) {
                    col.values.push_back(-1);
                } else {
                    auto it = index.find(c.category_name());
                    if (it == index.end())
                        throw Error(errc::validation, "category '" + c.category_name() +
                                                          "' not in domain of '" + attr.name + "'");
                    col.values.push_back(it->second);
                }
            }
            out.columns.push_back(std::move(col));
        }
        return out;
    }

    [[nodiscard]] std::size_t index_of(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i].name == name) return i;
        throw Error(errc::unknown_attribute, "no attribute named '" + name + "'");
    }
};

/// Mutual information between two attributes of a dataset, by name.
inline double mutual_information(const Dataset& ds, const std::string& a, const std::string& b) {
    auto enc = EncodedDataset::from(ds);
    const auto& x = enc.columns[enc.index_of(a)];
    const auto& y = enc.columns[enc.index_of(b)];
    return mutual_information(x.values, y.values, x.cardinality, y.cardinality);
}

}  // namespace logodm
