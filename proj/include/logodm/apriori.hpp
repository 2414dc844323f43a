#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "logodm/error.hpp"
#include "logodm/relation.hpp"

namespace logodm {

/// Canonically sorted, duplicate-free itemset with its support fraction.
struct ItemsetSupport {
    std::vector<Item> items;
    double support = 0.0;
};

/// Levelwise bookkeeping of Apriori: frequent itemsets grouped by size.
struct FrequentItemsetTable {
    std::map<std::size_t, std::vector<ItemsetSupport>> by_size;

    [[nodiscard]] std::size_t total_itemsets() const {
        std::size_t n = 0;
        for (const auto& [sz, v] : by_size) n += v.size();
        return n;
    }
};

struct AssociationRule {
    std::vector<Item> antecedent;
    std::vector<Item> consequent;
    double support = 0.0;     // support(antecedent ∪ consequent)
    double confidence = 0.0;  // support(union) / support(antecedent)
};

namespace detail {

inline std::string itemset_key(const std::vector<Item>& items) {
    std::string key;
    for (const auto& it : items) {
        key += it.attribute;
        key += '\x1f';
        key += it.value;
        key += '\x1e';
    }
    return key;
}

inline bool transaction_contains(const Transaction& t, const std::vector<Item>& items) {
    for (const auto& it : items)
        if (!t.count(it)) return false;
    return true;
}

}  // namespace detail

/// Exact fraction of transactions containing every item of the set. The
/// empty itemset is vacuously contained everywhere.
inline double count_support(const std::vector<Item>& itemset, const TransactionSet& ts) {
    if (ts.transactions.empty())
        throw Error(errc::empty_input, "support over an empty transaction set");
    std::size_t hits = 0;
    for (const auto& t : ts.transactions)
        if (detail::transaction_contains(t, itemset)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(ts.transactions.size());
}

/// Apriori join + prune: pairs of (ℓ-1)-itemsets agreeing on their first ℓ-2
/// items combine into ℓ-candidates; candidates with an infrequent
/// (ℓ-1)-subset are pruned. Output canonically sorted and duplicate-free.
inline std::vector<std::vector<Item>> generate_candidates(
    const std::vector<std::vector<Item>>& frequent_prev) {
    if (frequent_prev.empty()) return {};
    const std::size_t len = frequent_prev.front().size();
    for (const auto& is : frequent_prev)
        if (is.size() != len)
            throw Error(errc::parameter, "input itemsets have mixed sizes");

    std::vector<std::vector<Item>> sorted = frequent_prev;
    for (auto& is : sorted) std::sort(is.begin(), is.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::set<std::vector<Item>> prev_set(sorted.begin(), sorted.end());
    std::vector<std::vector<Item>> out;
    for (std::size_t a = 0; a < sorted.size(); ++a) {
        for (std::size_t b = a + 1; b < sorted.size(); ++b) {
            // Candidates join on an identical (ℓ-2)-prefix.
            bool prefix_equal = true;
            for (std::size_t i = 0; i + 1 < len; ++i)
                if (sorted[a][i] != sorted[b][i]) {
                    prefix_equal = false;
                    break;
                }
            if (!prefix_equal) break;  // sorted order: later b's diverge earlier
            std::vector<Item> cand = sorted[a];
            cand.push_back(sorted[b].back());
            // Prune: every (ℓ-1)-subset must be frequent.
            bool keep = true;
            for (std::size_t skip = 0; skip < cand.size() && keep; ++skip) {
                std::vector<Item> sub;
                sub.reserve(cand.size() - 1);
                for (std::size_t i = 0; i < cand.size(); ++i)
                    if (i != skip) sub.push_back(cand[i]);
                if (!prev_set.count(sub)) keep = false;
            }
            if (keep) out.push_back(std::move(cand));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Levelwise Apriori: exactly the itemsets with support >= min_support.
inline FrequentItemsetTable frequent_itemsets(const TransactionSet& ts, double min_support) {
    if (!(min_support > 0.0) || min_support > 1.0)
        throw Error(errc::parameter, "min_support must lie in (0, 1]");
    if (ts.transactions.empty())
        throw Error(errc::empty_input, "mining an empty transaction set");

    // Level 1: the item universe.
    std::set<Item> universe;
    for (const auto& t : ts.transactions) universe.insert(t.begin(), t.end());

    FrequentItemsetTable table;
    std::vector<std::vector<Item>> level;
    for (const auto& item : universe) {
        std::vector<Item> single{item};
        const double sup = count_support(single, ts);
        if (sup >= min_support) {
            table.by_size[1].push_back({single, sup});
            level.push_back(std::move(single));
        }
    }

    std::size_t size = 2;
    while (!level.empty()) {
        std::vector<std::vector<Item>> candidates = generate_candidates(level);
        level.clear();
        for (auto& cand : candidates) {
            const double sup = count_support(cand, ts);
            if (sup >= min_support) {
                table.by_size[size].push_back({cand, sup});
                level.push_back(std::move(cand));
            }
        }
        if (table.by_size.count(size) && table.by_size[size].empty()) table.by_size.erase(size);
        ++size;
    }
    if (table.by_size.count(1) && table.by_size[1].empty()) table.by_size.erase(1);
    return table;
}

/// Every frequent itemset of size >= 2 spawns one rule per non-empty proper
/// subset used as antecedent; a rule survives iff its confidence reaches
/// min_confidence. Output sorted by descending confidence, then descending
/// support, then canonical itemset order.
inline std::vector<AssociationRule> generate_rules(const FrequentItemsetTable& table,
                                                   double min_confidence) {
    if (!(min_confidence > 0.0) || min_confidence > 1.0)
        throw Error(errc::parameter, "min_confidence must lie in (0, 1]");

    std::unordered_map<std::string, double> support_of;
    for (const auto& [sz, sets] : table.by_size)
        for (const auto& is : sets) {
            std::vector<Item> sorted_items = is.items;
            std::sort(sorted_items.begin(), sorted_items.end());
            support_of[detail::itemset_key(sorted_items)] = is.support;
        }

    std::vector<AssociationRule> rules;
    for (const auto& [sz, sets] : table.by_size) {
        if (sz < 2) continue;
        for (const auto& is : sets) {
            std::vector<Item> items = is.items;
            std::sort(items.begin(), items.end());
            const auto n = items.size();
            // Bitmask enumeration of non-empty proper subsets as antecedents.
            for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
                std::vector<Item> ante;
                std::vector<Item> cons;
                for (std::size_t i = 0; i < n; ++i)
                    ((mask >> i) & 1U ? ante : cons).push_back(items[i]);
                auto sup_it = support_of.find(detail::itemset_key(ante));
                if (sup_it == support_of.end())
                    throw Error(errc::parameter,
                                "itemset table violates downward closure (missing antecedent)");
                const double conf = is.support / sup_it->second;
                if (conf >= min_confidence)
                    rules.push_back({std::move(ante), std::move(cons), is.support, conf});
            }
        }
    }
    std::sort(rules.begin(), rules.end(), [](const AssociationRule& a, const AssociationRule& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        if (a.support != b.support) return a.support > b.support;
        if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
        return a.consequent < b.consequent;
    });
    return rules;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json items_to_json(const std::vector<Item>& items) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& it : items) {
        nlohmann::json j;
        j["attribute"] = it.attribute;
        j["value"] = it.value;
        out.push_back(std::move(j));
    }
    return out;
}

inline nlohmann::json rules_to_json(const std::vector<AssociationRule>& rules) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rules) {
        nlohmann::json j;
        j["antecedent"] = items_to_json(r.antecedent);
        j["consequent"] = items_to_json(r.consequent);
        j["support"] = r.support;
        j["confidence"] = r.confidence;
        out.push_back(std::move(j));
    }
    return out;
}

inline std::string items_to_text(const std::vector<Item>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i].attribute + "=" + items[i].value;
    }
    return out;
}

/// Human-readable rule table, one rule per line.
inline std::string rules_to_text(const std::vector<AssociationRule>& rules) {
    std::string out;
    char buf[64];
    for (const auto& r : rules) {
        out += items_to_text(r.antecedent);
        out += " => ";
        out += items_to_text(r.consequent);
        std::snprintf(buf, sizeof(buf), "  [support=%.4f confidence=%.4f]\n", r.support,
                      r.confidence);
        out += buf;
    }
    return out;
}

}  // namespace logodm
